//! Bound checks on flows where the answer is known in closed form.

mod common;

use std::f64::consts::PI;

use burgers3d::analysis::*;
use burgers3d::dynamics::{integrate, split_evolve, InitialDataSpec, OutputPolicy, RunConfig};
use burgers3d::spectral::{SpectralVectorField, WavenumberGrid};
use burgers3d::Error;

fn heat_run(n: usize, interval: f64, t_end: f64) -> RunConfig {
    RunConfig {
        n,
        dt: interval / 2.0,
        t_end,
        nonlinear: false,
        initial_data: common::band(n as f64, 1.0),
        output: OutputPolicy { interval: Some(interval), snapshot_interval: Some(interval), ..Default::default() },
        ..Default::default()
    }
}

#[test]
fn heat_flow_satisfies_the_scalar_bounds() {
    let mut cfg = heat_run(6, 0.02, 0.3);
    cfg.initial_data = InitialDataSpec::SingleMode { mode: [0, 0, 0], amplitude: [0.5, 0.0, 0.0] };
    let constant = integrate(&cfg).unwrap();
    let r = max_principle_check(&constant, MaxPrincipleOptions::default());
    assert!(r.ratios().iter().all(|&q| q == 1.0));

    cfg.initial_data = common::band(6.0, 1.0);
    let traj = integrate(&cfg).unwrap();
    let r = max_principle_check(&traj, MaxPrincipleOptions::default());
    assert_eq!(r.verdict, Verdict::Holds, "{r}");
    assert!(r.max_ratio <= 1.0 + 1e-9);

    // The heat flow keeps the mean exactly.
    let r = momentum_bound_check(&traj, 1e-12);
    assert!(r.extra["drift"].iter().all(|&d| d == 0.0));
    assert_eq!(r.verdict, Verdict::Holds);

    let r = energy_inequality_check(&traj).unwrap();
    assert_eq!(r.verdict, Verdict::Holds, "{r}");
    assert_eq!(interpolation_check_records(&traj.diagnostics).verdict, Verdict::Holds);
    let snaps = traj.snapshots.iter().map(|s| (s.t, &s.field));
    assert_eq!(interpolation_check(snaps).verdict, Verdict::Holds);
}

/// `∫₀ᵗ‖v‖²_{3/2}` for the heat flow, summed mode by mode.
fn exact_dissipation(v0: &SpectralVectorField, nu: f64, t: f64) -> f64 {
    let g = v0.grid();
    let mut sum = 0.0;
    for (k, idx) in g.modes() {
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if k2 == 0.0 {
            continue;
        }
        let a: f64 = (0..3).map(|c| v0.coeffs()[[c, idx.0, idx.1, idx.2]].norm_sqr()).sum();
        sum += k2.powf(1.5) * a * (-(-2.0 * nu * k2 * t).exp_m1()) / (2.0 * nu * k2);
    }
    8.0 * PI.powi(3) * sum
}

#[test]
fn running_integrals_converge_at_second_order() {
    let mut errors = Vec::new();
    for interval in [0.02, 0.01] {
        let traj = integrate(&heat_run(4, interval, 0.2)).unwrap();
        let last = traj.diagnostics.last().unwrap();
        let exact = exact_dissipation(traj.initial(), traj.config.nu, last.t);
        errors.push((last.cum_semi_1_5_sq - exact).abs());
    }
    let order = (errors[0] / errors[1]).log2();
    assert!(order >= 1.9, "{errors:?}");

    let t: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    let c = cumulative_trapezoid(&t, &t.iter().map(|x| 3.0 * x + 1.0).collect::<Vec<_>>());
    assert!((c[8] - 2.5).abs() < 1e-15 && c[0] == 0.0);
}

#[test]
fn existence_estimate_symmetries() {
    let g = WavenumberGrid::new(4).unwrap();
    let u = common::random_field(&g, 5);
    let base = existence_time(&u, None).unwrap();
    // Sign change and component permutation leave both norms unchanged.
    let neg = existence_time(&u.scaled(-1.0), None).unwrap();
    assert_eq!(neg.t_star, base.t_star);
    let src = u.coeffs();
    let perm = SpectralVectorField::from_coeffs(
        &g,
        ndarray::Array4::from_shape_fn(src.raw_dim(), |(c, i, j, l)| src[[(c + 1) % 3, i, j, l]]),
    )
    .unwrap();
    let p = existence_time(&perm, None).unwrap();
    assert!((p.t_star - base.t_star).abs() <= 1e-12 * base.t_star);
    assert!(base.t_star > 0.0 && base.t_star.is_finite());
    assert!(existence_time(&SpectralVectorField::zeros(&g), None).unwrap().t_star.is_infinite());

    // The bound curve starts at ‖u₀‖₁² and is increasing up to the asymptote.
    let times: Vec<f64> = (0..10).map(|i| i as f64 * 0.1 * base.t_star).collect();
    let curve: Vec<f64> = base.bound_curve(&times, 1.0).into_iter().map(Option::unwrap).collect();
    assert!((curve[0] - base.h1_sq).abs() <= 1e-12 * base.h1_sq);
    assert!(curve.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(base.bound(base.t_star * (1.0 + 1e-9), 1.0), None);
}

#[test]
fn splitting_of_zero_data() {
    let mut cfg = heat_run(4, 0.01, 0.05);
    cfg.nonlinear = true;
    cfg.initial_data = InitialDataSpec::SingleMode { mode: [1, 0, 0], amplitude: [0.0; 3] };
    let (v, w) = split_evolve(&cfg).unwrap();
    let rep = splitting_bound_report(&v, &w, SplittingConstants::default()).unwrap();
    for r in rep.reports() {
        assert!(!r.is_failure(), "{r}");
    }
    assert!(rep.w_bound.lhs.iter().all(|&x| x == 0.0));
    assert_eq!(rep.tau, None);
}

#[test]
fn splitting_heat_identity_holds_on_a_real_run() {
    let mut cfg = heat_run(4, 0.01, 0.05);
    cfg.nonlinear = true;
    let (v, w) = split_evolve(&cfg).unwrap();
    let rep = splitting_bound_report(&v, &w, SplittingConstants::default()).unwrap();
    assert_eq!(rep.heat_identity.verdict, Verdict::Holds, "{}", rep.heat_identity);
    assert!(rep.w_bound.lhs[1] > 0.0);
    assert!(matches!(splitting_bound_report(&v, &integrate(&heat_run(4, 0.02, 0.05)).unwrap(), Default::default()), Err(Error::Cadence(_))));
}

#[test]
fn heat_flow_tail_slope_steepens_by_the_shell_average() {
    // ln A_K gains about −νK²t (|k|² varies by O(K) inside a shell), and the
    // least-squares slope of K² against K over the integer shells a..=b is
    // a + b.
    let n = 12;
    let mut cfg = heat_run(n, 0.01, 0.04);
    cfg.initial_data = InitialDataSpec::RandomBand { k_min: 0.0, k_max: n as f64, target_semi_half: 1.0, spectral_slope: 0.0 };
    let traj = integrate(&cfg).unwrap();
    let s0 = tail_slope(traj.initial()).unwrap();
    let last = traj.final_state();
    let expected = s0 - cfg.nu * last.t * (n.div_ceil(3) + n) as f64;
    let got = tail_slope(&last.field).unwrap();
    assert!((got - expected).abs() < 0.05 * (s0 - expected).abs(), "{s0} {got} {expected}");

    // Flat data fills the tail, so the resolution guard has to be loosened.
    assert!(matches!(smoothing_check(&traj, 0.01, 1e-2), Err(Error::Precondition(_))));
    let rep = smoothing_check(&traj, 0.01, 1.0).unwrap();
    assert_eq!(rep.report.verdict, Verdict::Holds, "{}", rep.report);
    assert!(rep.sample_at(0.02).is_some());
    assert!(matches!(smoothing_check(&traj, 1.0, 1.0), Err(Error::Cadence(_))));
}

#[test]
fn report_verdicts() {
    let t = vec![0.0, 1.0, 2.0];
    let strict = BoundReport::new("s", CheckMode::Strict, t.clone(), vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0], 0.1, 0.0);
    assert_eq!(strict.verdict, Verdict::Violated);
    assert_eq!(strict.ratio_at(0), 0.0);
    assert_eq!(strict.argmax_t, 2.0);
    let ratio = BoundReport::new("r", CheckMode::Ratio, t.clone(), vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0], 0.1, 0.0);
    assert_eq!(ratio.verdict, Verdict::HoldsUpToConstant);
    let inf = BoundReport::new("i", CheckMode::Ratio, t, vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0], 0.0, 0.0);
    assert_eq!(inf.verdict, Verdict::Violated);
    assert!(inf.is_failure() && !ratio.is_failure());
}
