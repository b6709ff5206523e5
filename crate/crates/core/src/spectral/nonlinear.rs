use ndarray::{Array3, Array4, Axis};
use num_complex::Complex64;

use super::field::SpectralVectorField;
use super::grid::WavenumberGrid;
use super::transform::{pack_pair, recycle, split_pair, Transform3};
use crate::{Error, Result};

/// Pseudo-spectral `(u·∇)u`, truncated to the cube `|k|∞ ≤ n`.
///
/// Uses `(u·∇)u = ∇(|u|²/2) − u × (∇×u)`, so only `u` and its curl are
/// synthesized (three packed transforms) and the scalar `|u|²/2` plus the
/// vector `u × ω` are analyzed (two packed transforms). Products are formed on
/// the grid's collocation resolution, which must be at least `3n + 1` so that
/// the result equals the exact truncated convolution.
pub fn nonlinear_term(u: &SpectralVectorField) -> Result<SpectralVectorField> {
    let grid = u.grid();
    let n = grid.n();
    let points = grid.physical_points();
    let required = WavenumberGrid::min_dealias_points(n);
    if points < required {
        return Err(Error::Resolution { points, required });
    }
    // Products of fields independent of a coordinate stay independent of it,
    // so such axes are collapsed to a single node.
    let active = u.active_axes();
    let t = Transform3::reduced(n, points, active);
    let offset = active.map(|on| if on { 0 } else { n });
    let k_at = |(i, j, l): (usize, usize, usize)| {
        grid.wavevector((i + offset[0], j + offset[1], l + offset[2])).map(|v| v as f64)
    };
    let ub = [0, 1, 2].map(|c| u.active_box(c, active));
    let omega = [(1, 2), (2, 0), (0, 1)].map(|(a, b)| {
        // ω_c = ∂_a u_b − ∂_b u_a for the cyclic (c, a, b).
        Array3::from_shape_fn(ub[0].raw_dim(), |idx| {
            let k = k_at(idx);
            Complex64::new(0.0, 1.0) * (k[a] * ub[b][idx] - k[b] * ub[a][idx])
        })
    });

    let synth = |a, b| {
        let packed = pack_pair(a, Some(b));
        let values = t.synthesize_flat(&packed);
        recycle(packed);
        values
    };
    // (u0 + i u1), (u2 + i ω0), (ω1 + i ω2) on the grid.
    let mut p = synth(ub[0], ub[1]);
    let mut r = synth(ub[2], omega[0].view());
    let w = synth(omega[1].view(), omega[2].view());
    drop(omega);

    // Overwrite in place with (q + i c0) and (c1 + i c2), where q = |u|²/2 and
    // c = u × ω.
    for ((a, b), c) in p.iter_mut().zip(r.iter_mut()).zip(w.iter()) {
        let (u0, u1, u2) = (a.re, a.im, b.re);
        let (w0, w1, w2) = (b.im, c.re, c.im);
        *a = Complex64::new(0.5 * (u0 * u0 + u1 * u1 + u2 * u2), u1 * w2 - u2 * w1);
        *b = Complex64::new(u2 * w0 - u0 * w2, u0 * w1 - u1 * w0);
    }
    recycle(w);

    let dims = t.cube_dims();
    let spec = t.analyze_flat(p);
    let (q_hat, c0_hat) = split_pair(dims, &spec);
    recycle(spec);
    let spec = t.analyze_flat(r);
    let (c1_hat, c2_hat) = split_pair(dims, &spec);
    recycle(spec);
    let cross = [c0_hat, c1_hat, c2_hat];

    // Embed the box back into the cube; modes outside it are zero.
    let side = grid.side();
    let mut out = Array4::<Complex64>::zeros((3, side, side, side));
    for (c, mut comp) in out.axis_iter_mut(Axis(0)).enumerate() {
        for ((i, j, l), &qh) in q_hat.indexed_iter() {
            let k = k_at((i, j, l))[c];
            let idx = (i + offset[0], j + offset[1], l + offset[2]);
            comp[idx] = Complex64::new(0.0, k) * qh - cross[c][[i, j, l]];
        }
    }
    SpectralVectorField::from_coeffs(grid, out)
}
