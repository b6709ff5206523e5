//! Time integration: exact heat limit, convergence order, splitting,
//! determinism and the viscosity normalisation.

mod common;

use burgers3d::dynamics::*;
use burgers3d::spectral::SpectralVectorField;
use burgers3d::Error;

fn config(n: usize, dt: f64, t_end: f64) -> RunConfig {
    RunConfig { n, dt, t_end, initial_data: common::band(3.0, 1.0), ..Default::default() }
}

#[test]
fn heat_limit_is_exact_for_any_step() {
    for name in ["etdrk4", "if_rk4"] {
        for dt in [0.3, 0.05, 1e-3] {
            let mut cfg = config(6, dt, 0.6);
            cfg.integrator = name.into();
            cfg.nonlinear = false;
            cfg.output.snapshot_interval = Some(if dt < 0.01 { 0.1 } else { dt });
            let traj = integrate(&cfg).unwrap();
            let u0 = traj.initial().clone();
            for s in &traj.snapshots {
                let exact = heat_propagate(&u0, cfg.nu, s.t).unwrap();
                assert!(s.field.max_abs_diff(&exact) <= 1e-13 * u0.max_abs(), "{name} dt={dt} t={}", s.t);
                assert_eq!(s.field.mean(), u0.mean());
            }
        }
    }
}

#[test]
fn heat_multiplier_on_one_mode() {
    let g = burgers3d::spectral::WavenumberGrid::new(2).unwrap();
    let f = SpectralVectorField::cosine_mode(&g, [0, 1, 0], [1.0, 0.0, 0.0]).unwrap();
    let h = heat_propagate(&f, 1.0, 1.0).unwrap();
    assert!((h.coefficient([0, 1, 0]).unwrap()[0].re - 0.5 * (-1.0f64).exp()).abs() < 1e-16);
    let c = SpectralVectorField::constant(&g, [1.0, 2.0, 3.0]);
    assert_eq!(heat_propagate(&c, 1.0, 5.0).unwrap().max_abs_diff(&c), 0.0);
    assert!(matches!(heat_propagate(&f, 1.0, -1.0), Err(Error::Parameter(_))));
}

#[test]
fn heat_seminorm_identity_closed_form() {
    let cfg = config(8, 1e-3, 0.0);
    let v0 = initial_field(&cfg).unwrap();
    for t in [0.0, 1e-6, 0.01, 0.3, 2.0] {
        let id = heat_seminorm_identity(&v0, 0.8, t).unwrap();
        assert!(id.relative_defect() <= 1e-12, "t = {t}: {}", id.relative_defect());
    }
}

#[test]
fn constant_data_is_a_fixed_point() {
    let mut cfg = config(4, 0.01, 0.2);
    cfg.initial_data = InitialDataSpec::SingleMode { mode: [0, 0, 0], amplitude: [0.3, -1.0, 2.0] };
    let traj = integrate(&cfg).unwrap();
    assert_eq!(traj.final_state().field.max_abs_diff(traj.initial()), 0.0);
    let rhs = galerkin_rhs(traj.initial(), 1.0).unwrap();
    assert_eq!(rhs.max_abs(), 0.0);
}

fn final_state(cfg: &RunConfig) -> SpectralVectorField {
    integrate(cfg).unwrap().final_state().field.clone()
}

#[test]
fn fourth_order_self_convergence() {
    for name in ["etdrk4", "if_rk4"] {
        let mut cfg = config(6, 0.04, 0.4);
        cfg.initial_data = common::band(3.0, 6.0);
        cfg.integrator = name.into();
        cfg.output.interval = Some(0.4);
        let mut states = Vec::new();
        for dt in [0.04, 0.02, 0.005] {
            cfg.dt = dt;
            states.push(final_state(&cfg));
        }
        let e1 = (&states[0] - &states[2]).l2_norm();
        let e2 = (&states[1] - &states[2]).l2_norm();
        let order = (e1 / e2).log2();
        assert!((3.5..=4.5).contains(&order), "{name}: errors {e1:e} {e2:e}, order {order}");
    }
}

#[test]
fn integrators_agree() {
    let mut cfg = config(6, 0.01, 0.2);
    let a = final_state(&cfg);
    cfg.integrator = "if_rk4".into();
    let b = final_state(&cfg);
    assert!((&a - &b).l2_norm() < 1e-6 * a.l2_norm());
}

#[test]
fn unknown_integrator_lists_alternatives() {
    let mut cfg = config(4, 0.01, 0.02);
    cfg.integrator = "euler".into();
    // Validation collects every problem into one message.
    match integrate(&cfg) {
        Err(Error::Parameter(msg)) => assert!(msg.contains("euler") && msg.contains("etdrk4, if_rk4")),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        IntegratorRegistry::builtin().get("euler"),
        Err(Error::UnknownIntegrator { .. })
    ));
}

#[test]
fn runs_are_bit_identical() {
    let mut cfg = config(6, 0.01, 0.1);
    cfg.output.interval = Some(0.02);
    let a = integrate(&cfg).unwrap();
    let b = integrate(&cfg).unwrap();
    let bits = |t: &TrajectoryHandle| t.diagnostics.iter().flat_map(|r| r.values().map(f64::to_bits)).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn emitted_states_stay_in_the_ball() {
    let mut cfg = config(6, 0.01, 0.1);
    cfg.initial_data = InitialDataSpec::TaylorGreenLike { amplitude: 2.0 };
    cfg.output.snapshot_interval = Some(0.01);
    let traj = integrate(&cfg).unwrap();
    for s in &traj.snapshots {
        assert_eq!(s.field.project_ball().max_abs_diff(&s.field), 0.0);
    }
    let times = traj.snapshot_times();
    assert!(times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn split_parts_recombine() {
    let mut cfg = config(6, 0.01, 0.2);
    cfg.output.snapshot_interval = Some(0.05);
    let (v, w) = split_evolve(&cfg).unwrap();
    let u = integrate(&cfg).unwrap();
    assert_eq!(w.initial().max_abs(), 0.0);
    for ((a, b), c) in v.snapshots.iter().zip(&w.snapshots).zip(&u.snapshots) {
        assert!((&(&a.field + &b.field) - &c.field).l2_norm() <= 1e-9, "t = {}", a.t);
    }
    // w grows from zero.
    assert!(w.snapshots[1].field.seminorm(0.5) < w.final_state().field.seminorm(0.5) * 10.0);
    assert!(w.snapshots[1].field.seminorm(0.5) > 0.0);

    let mut zero = cfg.clone();
    zero.initial_data = InitialDataSpec::SingleMode { mode: [1, 0, 0], amplitude: [0.0; 3] };
    let (v, w) = split_evolve(&zero).unwrap();
    assert_eq!(v.final_state().field.max_abs() + w.final_state().field.max_abs(), 0.0);
}

#[test]
fn viscosity_normalisation_gives_the_same_solution() {
    let mut cfg = config(6, 0.01, 0.2);
    cfg.nu = 0.4;
    let physical = final_state(&cfg);
    cfg.normalize_viscosity = true;
    let normalised = final_state(&cfg);
    // U = u/ν at unit viscosity with τ = νt is the same Galerkin system, so
    // only round-off and the time discretisation differ.
    assert!((&physical - &normalised).l2_norm() <= 1e-8 * physical.l2_norm());
}

#[test]
fn blowup_is_reported_with_last_time() {
    let mut cfg = config(4, 0.01, 0.5);
    cfg.initial_data = common::band(3.0, 50.0);
    cfg.nu = 0.01;
    cfg.blowup_factor = 1.001;
    match integrate(&cfg) {
        Err(Error::Blowup { last_valid_time, .. }) => assert!(last_valid_time < 0.5),
        other => panic!("expected blowup, got {:?}", other.map(|t| t.final_state().t)),
    }
}

#[test]
fn scaling_residual_grows_like_lambda_cubed() {
    let mut cfg = config(6, 1e-3, 0.02);
    cfg.output.snapshot_interval = Some(0.002);
    let traj = integrate(&cfg).unwrap();
    let r1 = scaling_residual(&traj, 1).unwrap();
    let r2 = scaling_residual(&traj, 2).unwrap();
    assert!(r2 <= 10.0 * r1, "{r1:e} {r2:e}");
    let r3 = scaling_residual(&traj, 3).unwrap();
    assert!((r3 / r1 - 27.0).abs() < 1e-6 * 27.0);

    let short = config(6, 1e-3, 0.002);
    assert!(matches!(scaling_residual(&integrate(&short).unwrap(), 1), Err(Error::Cadence(_))));
}

#[test]
fn heat_scaling_residual_is_finite_difference_error() {
    // For the heat flow the residual is the centered-difference error alone,
    // which shrinks by 4 when the snapshot spacing halves.
    let mut cfg = config(4, 1e-3, 0.02);
    cfg.nonlinear = false;
    let mut res = Vec::new();
    for h in [0.004, 0.002] {
        cfg.output.snapshot_interval = Some(h);
        res.push(scaling_residual(&integrate(&cfg).unwrap(), 2).unwrap());
    }
    let ratio = res[0] / res[1];
    assert!((ratio - 4.0).abs() < 0.2, "{res:?}");
}
