//! The pseudo-spectral product against a brute-force convolution sum.

mod common;

use burgers3d::colehopf::{make_gradient_data, PotentialField, PotentialTerm};
use burgers3d::dynamics::galerkin_rhs;
use burgers3d::spectral::{nonlinear_term, SpectralVectorField, WavenumberGrid};
use num_complex::Complex64;

/// `Σ_{p+q=k} (û_p · iq) û_q` on the cube `|k|∞ ≤ n`.
fn direct(u: &SpectralVectorField) -> Vec<([i64; 3], [Complex64; 3])> {
    let g = u.grid();
    let n = g.n() as i64;
    let modes: Vec<([i64; 3], [Complex64; 3])> =
        g.modes().map(|(k, _)| (k, u.coefficient(k).unwrap())).filter(|(_, c)| c.iter().any(|z| z.norm() > 0.0)).collect();
    let mut out = Vec::new();
    for (k, _) in g.modes() {
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for (p, up) in &modes {
            let q = [k[0] - p[0], k[1] - p[1], k[2] - p[2]];
            if q.iter().any(|v| v.abs() > n) {
                continue;
            }
            let uq = u.coefficient(q).unwrap();
            let dot: Complex64 = (0..3).map(|j| up[j] * Complex64::new(0.0, q[j] as f64)).sum();
            for c in 0..3 {
                acc[c] += dot * uq[c];
            }
        }
        out.push((k, acc));
    }
    out
}

fn assert_matches(u: &SpectralVectorField) {
    let fast = nonlinear_term(u).unwrap();
    let slow = direct(u);
    let scale = slow.iter().flat_map(|(_, c)| c.iter().map(|z| z.norm())).fold(u.max_abs().powi(2), f64::max);
    for (k, c) in slow {
        let got = fast.coefficient(k).unwrap();
        for i in 0..3 {
            assert!((got[i] - c[i]).norm() <= 1e-10 * scale, "k = {k:?}, component {i}: {} vs {}", got[i], c[i]);
        }
    }
}

#[test]
fn dense_random_fields() {
    for n in 1..=4 {
        let g = WavenumberGrid::new(n).unwrap();
        assert_matches(&common::random_field(&g, n as u64));
    }
}

#[test]
fn minimal_dealiasing_resolution_is_exact() {
    let g = WavenumberGrid::with_points(3, 10).unwrap();
    assert_matches(&common::random_field(&g, 5));
}

#[test]
fn fields_independent_of_some_coordinates() {
    let g = WavenumberGrid::new(4).unwrap();
    let u = common::random_field(&g, 9);
    let keep = |pred: fn([i64; 3]) -> bool| {
        let mut c = u.clone().into_coeffs();
        for ((_, i, j, l), z) in c.indexed_iter_mut() {
            if !pred(g.wavevector((i, j, l))) {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        SpectralVectorField::from_coeffs(&g, c).unwrap()
    };
    assert_matches(&keep(|k| k[2] == 0));
    assert_matches(&keep(|k| k[1] == 0 && k[2] == 0));
    assert_matches(&keep(|k| k[0] == 0));
}

#[test]
fn single_mode_gradient_field() {
    let g = WavenumberGrid::new(3).unwrap();
    let phi = PotentialField::from_terms(&g, &[PotentialTerm { k: [1, 2, 0], a: 0.7, b: -0.2 }]).unwrap();
    assert_matches(&make_gradient_data(&phi));
}

#[test]
fn rhs_linear_part_and_quadratic_part() {
    let g = WavenumberGrid::new(3).unwrap();
    let u = SpectralVectorField::cosine_mode(&g, [1, 1, 0], [0.3, 0.3, 0.0]).unwrap();
    let nu = 0.7;
    let rhs = galerkin_rhs(&u, nu).unwrap();
    let slow = direct(&u);
    let cutoff = (g.n() * g.n()) as i64;
    for (k, c) in slow {
        let uk = u.coefficient(k).unwrap();
        let k2 = k.iter().map(|v| v * v).sum::<i64>();
        let proj = if k2 <= cutoff { 1.0 } else { 0.0 };
        let got = rhs.coefficient(k).unwrap();
        for i in 0..3 {
            let expected = -proj * c[i] - nu * k2 as f64 * uk[i];
            assert!((got[i] - expected).norm() < 1e-13, "k = {k:?}");
        }
    }
    assert_eq!(rhs.hermitian_defect(), 0.0);
}
