use num_complex::Complex64;

use super::run::galerkin_nonlinear;
use super::trajectory::TrajectoryHandle;
use crate::spectral::{SpectralVectorField, WavenumberGrid};
use crate::{Error, Result};

/// `λ f(λx)` on the truncation `λn`: the coefficient of `λk` is `λ f̂_k`.
pub fn dilate(f: &SpectralVectorField, lambda: usize) -> Result<SpectralVectorField> {
    if lambda == 0 {
        return Err(Error::Parameter("dilation factor must be a positive integer".into()));
    }
    let n = f.n();
    let grid = WavenumberGrid::new(lambda * n)?;
    let mut out = SpectralVectorField::zeros(&grid);
    {
        let src = f.coeffs();
        let dst = out.coeffs_mut();
        let (m, big) = (n as i64, (lambda * n) as i64);
        let l = lambda as i64;
        for ((c, i, j, k), z) in src.indexed_iter() {
            if *z == Complex64::new(0.0, 0.0) {
                continue;
            }
            let idx = [i, j, k].map(|v| ((v as i64 - m) * l + big) as usize);
            dst[[c, idx[0], idx[1], idx[2]]] = z * lambda as f64;
        }
    }
    Ok(out)
}

/// Residual of the rescaled trajectory `u_λ(x,t) = λu(λx, λ²t)` in the
/// equation the trajectory was computed for, at each interior snapshot.
///
/// `∂_t` is the centered difference over neighbouring snapshots, which must be
/// equally spaced. The Galerkin nonlinearity `P_{λn}[(u_λ·∇)u_λ]` is included
/// unless the run was the pure heat flow.
pub fn scaling_residual_trace(traj: &TrajectoryHandle, lambda: usize) -> Result<Vec<(f64, f64)>> {
    let snaps = &traj.snapshots;
    let nu = traj.config.nu;
    let l2 = (lambda * lambda) as f64;
    let dt = traj.config.dt;
    let mut out = Vec::new();
    for j in 1..snaps.len().saturating_sub(1) {
        let (a, b, c) = (snaps[j - 1].t, snaps[j].t, snaps[j + 1].t);
        let (h1, h2) = (b - a, c - b);
        if (h1 - h2).abs() > 1e-9 * h1.max(h2) {
            continue;
        }
        if h1 < dt * (1.0 - 1e-9) {
            return Err(Error::Cadence(format!("snapshot spacing {h1} is finer than dt = {dt}")));
        }
        let prev = dilate(&snaps[j - 1].field, lambda)?;
        let mid = dilate(&snaps[j].field, lambda)?;
        let next = dilate(&snaps[j + 1].field, lambda)?;
        // Rescaled time step is h/λ².
        let dts = h1 / l2;
        let inv = 0.5 / dts;
        let grid = mid.grid().clone();
        let dtm = grid.radial_table(|_| inv);
        let neg = grid.radial_table(|_| -inv);
        let diffusion = grid.radial_table(|k2| nu * k2);
        let mut terms = vec![(&dtm, &next), (&neg, &prev), (&diffusion, &mid)];
        // galerkin_nonlinear returns −P[(u·∇)u]; the residual needs +P[(u·∇)u].
        let minus_one = grid.radial_table(|_| -1.0);
        let nl;
        if traj.config.nonlinear {
            nl = galerkin_nonlinear(&mid)?;
            terms.push((&minus_one, &nl));
        }
        let r = SpectralVectorField::combine(&terms);
        out.push((b / l2, r.l2_norm()));
    }
    if out.is_empty() {
        return Err(Error::Cadence(
            "need at least three equally spaced snapshots for a centered time derivative".into(),
        ));
    }
    Ok(out)
}

/// Largest residual over the sampled times.
pub fn scaling_residual(traj: &TrajectoryHandle, lambda: usize) -> Result<f64> {
    Ok(scaling_residual_trace(traj, lambda)?.into_iter().map(|(_, r)| r).fold(0.0, f64::max))
}
