//! Invariants of the spectral representation, checked on random fields.

mod common;

use std::f64::consts::PI;

use burgers3d::spectral::{l1_norm, linf_norm, RealVectorSample, SpectralVectorField, WavenumberGrid};
use burgers3d::TORUS_VOLUME;
use proptest::prelude::*;

fn field(n: usize, seed: u64) -> SpectralVectorField {
    common::random_field(&WavenumberGrid::new(n).unwrap(), seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_through_physical_space(n in 1usize..6, seed in any::<u64>(), extra in 0usize..5) {
        let f = field(n, seed);
        let points = 2 * n + 2 + extra;
        let back = f.to_physical(points).unwrap().to_spectral(n).unwrap();
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * f.max_abs());
        prop_assert_eq!(back.hermitian_defect(), 0.0);
    }

    #[test]
    fn plancherel_consistency(n in 1usize..6, seed in any::<u64>()) {
        let f = field(n, seed);
        let a = f.l2_norm().powi(2);
        prop_assert!((f.inner_l2(&f).unwrap() - a).abs() <= 1e-12 * a);
        let h = f.lambda_pow(0.5).unwrap();
        let s = f.seminorm(0.5).powi(2);
        prop_assert!((h.inner_l2(&h).unwrap() - s).abs() <= 1e-12 * s);
    }

    #[test]
    fn multiplier_composition(seed in any::<u64>(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let f = field(3, seed);
        let two = f.lambda_pow(s).unwrap().lambda_pow(t).unwrap();
        let one = f.lambda_pow(s + t).unwrap();
        prop_assert!(two.max_abs_diff(&one) <= 1e-12 * one.max_abs().max(f.max_abs()));
    }

    #[test]
    fn interpolation_inequality(seed in any::<u64>()) {
        let w = field(4, seed);
        let lhs = w.seminorm(1.0).powi(2);
        let rhs = w.seminorm(0.5) * w.seminorm(1.5);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn seminorms_are_monotone_on_mean_zero_fields(seed in any::<u64>(), s in 0.01f64..2.0, d in 0.0f64..1.0) {
        let f = field(4, seed);
        let mean_free = f.scale_modes(&f.grid().radial_table(|k2| if k2 == 0.0 { 0.0 } else { 1.0 }));
        prop_assert!(mean_free.seminorm(s) <= mean_free.seminorm(s + d) * (1.0 + 1e-14));
    }

    #[test]
    fn ball_projection_is_idempotent(seed in any::<u64>(), m in 0i64..5) {
        let f = field(4, seed);
        let p = f.project(m).unwrap();
        prop_assert_eq!(p.project(m).unwrap().max_abs_diff(&p), 0.0);
        prop_assert_eq!(p.mean(), f.mean());
    }
}

#[test]
fn projection_error_is_the_tail_sum() {
    let f = field(5, 3);
    let g = f.grid();
    for m in 0..=5i64 {
        let err = (&f.project(m).unwrap() - &f).l2_norm().powi(2);
        let mut tail = 0.0;
        for (k, _) in g.modes() {
            if k.iter().map(|v| v * v).sum::<i64>() > m * m {
                tail += f.coefficient(k).unwrap().iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        assert!((err - TORUS_VOLUME * tail).abs() <= 1e-12 * f.l2_norm().powi(2));
    }
    assert_eq!(f.project(5).unwrap().max_abs_diff(&f.project_ball()), 0.0);
}

#[test]
fn lambda_squared_is_minus_laplacian() {
    let f = field(4, 1);
    let by_derivatives = &(&f.derivative(0).derivative(0) + &f.derivative(1).derivative(1)) + &f.derivative(2).derivative(2);
    assert!(f.lambda_pow(2.0).unwrap().max_abs_diff(&by_derivatives.scaled(-1.0)) < 1e-12 * f.max_abs() * 48.0);
}

#[test]
fn constants_are_invisible_to_seminorms() {
    let g = WavenumberGrid::new(3).unwrap();
    let f = field(3, 2);
    let shifted = &f + &SpectralVectorField::constant(&g, [2.5, 0.0, 0.0]);
    for s in [0.5, 1.0, 1.5, 2.0] {
        assert_eq!(shifted.seminorm(s), f.seminorm(s));
    }
    assert_eq!(f.lambda_pow(0.5).unwrap().mean(), [0.0; 3]);
    assert_eq!(SpectralVectorField::constant(&g, [1.0, 2.0, 3.0]).lambda_pow(1.0).unwrap().max_abs(), 0.0);
}

#[test]
fn cos_x1_reference_values() {
    let g = WavenumberGrid::new(2).unwrap();
    let f = SpectralVectorField::cosine_mode(&g, [1, 0, 0], [1.0, 0.0, 0.0]).unwrap();
    // 8π³ (¼ + ¼) = 4π³.
    assert!((f.seminorm(0.0) - 2.0 * PI.powf(1.5)).abs() < 1e-13);
    assert_eq!(f.seminorm(0.7), f.seminorm(0.0));
    assert!((linf_norm(&f, None).unwrap() - 1.0).abs() < 1e-10);
    // Independent quadrature: ∫₀^{2π}|cos x| dx = 4 by the midpoint rule on
    // a fine grid; the other two directions contribute (2π)².
    let m = 200_000;
    let h = 2.0 * PI / m as f64;
    let line: f64 = (0..m).map(|i| ((i as f64 + 0.5) * h).cos().abs() * h).sum();
    let oracle = line * 4.0 * PI * PI;
    assert!((l1_norm(&f, Some(512)).unwrap() - oracle).abs() < 1e-4 * oracle);
}

#[test]
fn sampled_cosine_has_two_coefficients() {
    let s = RealVectorSample::from_fn(8, |x| [x[0].cos(), 0.0, 0.0]);
    let f = s.to_spectral(3).unwrap();
    for (k, _) in f.grid().modes() {
        let c = f.coefficient(k).unwrap()[0];
        let expected = if k == [1, 0, 0] || k == [-1, 0, 0] { 0.5 } else { 0.0 };
        assert!((c.re - expected).abs() < 1e-14 && c.im.abs() < 1e-14, "{k:?}");
    }
    let c = RealVectorSample::from_fn(8, |_| [1.0, -2.0, 3.0]).to_spectral(3).unwrap();
    assert!((c.mean()[1] + 2.0 * TORUS_VOLUME).abs() < 1e-12);
}
