//! Exact solutions for gradient data through the Cole–Hopf transform.
//!
//! If `θ_t = νΔθ` with `θ > 0`, then `u = −2ν∇θ/θ` solves the viscous Burgers
//! system, and `u(0) = ∇φ` corresponds to `θ(0) = exp(−φ/2ν)`. The heat flow is
//! applied exactly in Fourier space on a fine grid whose resolution is checked
//! against the spectrum of `θ(0)`.

use std::sync::Arc;

use ndarray::{Array3, Array4, Axis, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectoryHandle;
use crate::spectral::{linf_norm, RealVectorSample, SpectralVectorField, WavenumberGrid};
use crate::{Error, Result, TORUS_VOLUME};

/// `a cos(k·x) + b sin(k·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialTerm {
    pub k: [i64; 3],
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

impl PotentialTerm {
    /// The potential `amplitude · cos x₁ cos x₂` as two terms.
    pub fn cos_cos(amplitude: f64) -> Vec<Self> {
        vec![
            Self { k: [1, 1, 0], a: 0.5 * amplitude, b: 0.0 },
            Self { k: [1, -1, 0], a: 0.5 * amplitude, b: 0.0 },
        ]
    }
}

/// A real scalar potential with zero mean, held as the first component of a
/// vector field so that the vector transforms apply unchanged.
#[derive(Debug, Clone)]
pub struct PotentialField {
    field: SpectralVectorField,
}

impl PotentialField {
    pub fn from_terms(grid: &Arc<WavenumberGrid>, terms: &[PotentialTerm]) -> Result<Self> {
        let mut field = SpectralVectorField::zeros(grid);
        {
            let c = field.coeffs_mut();
            for t in terms {
                if t.k == [0, 0, 0] {
                    continue;
                }
                let idx = grid.index_of(t.k).ok_or_else(|| {
                    Error::Parameter(format!("potential mode {:?} outside truncation {}", t.k, grid.n()))
                })?;
                let neg = grid.negate(idx);
                c[[0, idx.0, idx.1, idx.2]] += Complex64::new(0.5 * t.a, -0.5 * t.b);
                c[[0, neg.0, neg.1, neg.2]] += Complex64::new(0.5 * t.a, 0.5 * t.b);
            }
        }
        Ok(Self { field })
    }

    /// Potential from nodal values on a uniform grid, truncated to `grid`; the
    /// mean is removed.
    pub fn from_samples(grid: &Arc<WavenumberGrid>, values: &Array3<f64>) -> Result<Self> {
        let mut all = Array4::zeros((3, values.dim().0, values.dim().1, values.dim().2));
        all.index_axis_mut(Axis(0), 0).assign(values);
        let mut field = SpectralVectorField::from_reduced_physical(grid, &all)?;
        let n = grid.n();
        field.coeffs_mut()[[0, n, n, n]] = Complex64::new(0.0, 0.0);
        Ok(Self { field })
    }

    pub fn grid(&self) -> &Arc<WavenumberGrid> {
        self.field.grid()
    }

    /// Coefficient `φ̂_k`.
    pub fn coefficient(&self, k: [i64; 3]) -> Option<Complex64> {
        self.field.coefficient(k).map(|c| c[0])
    }

    /// `sup |φ|`.
    pub fn sup_norm(&self) -> Result<f64> {
        linf_norm(&self.field, None)
    }

    /// Largest `|k|∞` carrying a nonzero coefficient.
    pub fn band(&self) -> usize {
        let g = self.grid();
        g.modes()
            .filter(|(_, idx)| self.field.coeffs()[[0, idx.0, idx.1, idx.2]] != Complex64::new(0.0, 0.0))
            .map(|(k, _)| k.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}

/// `u₀ = ∇φ`, i.e. `û_k = i k φ̂_k`.
pub fn make_gradient_data(phi: &PotentialField) -> SpectralVectorField {
    let grid = phi.grid().clone();
    let side = grid.side();
    let src = phi.field.component(0);
    let coeffs = Array4::from_shape_fn((3, side, side, side), |(c, i, j, l)| {
        let k = grid.wavevector((i, j, l))[c] as f64;
        Complex64::new(0.0, k) * src[[i, j, l]]
    });
    SpectralVectorField::from_coeffs(&grid, coeffs).expect("shape matches the grid")
}

/// Safeguards of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleOptions {
    /// Nodes per axis of the evaluation grid.
    pub eval_points: usize,
    /// Refuse `ν < nu_floor_factor · sup|φ|`.
    pub nu_floor_factor: f64,
    /// Smallest admissible value of `θ`.
    pub theta_floor: f64,
    /// Largest admissible `|θ̂_k|/|θ̂_0|` over the outer third of the
    /// evaluation band.
    pub tail_tolerance: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { eval_points: 64, nu_floor_factor: 0.05, theta_floor: 1e-300, tail_tolerance: 1e-12 }
    }
}

impl OracleOptions {
    /// Smallest viscosity accepted for `φ`.
    pub fn nu_floor(&self, phi: &PotentialField) -> Result<f64> {
        Ok(self.nu_floor_factor * phi.sup_norm()?)
    }
}

/// `θ(0)` on the evaluation grid, checked for resolution.
struct HeatSolution {
    theta0: SpectralVectorField,
    nu: f64,
    theta_floor: f64,
    points: usize,
}

impl HeatSolution {
    fn new(phi: &PotentialField, nu: f64, opts: &OracleOptions) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Parameter(format!("viscosity must be positive, got {nu}")));
        }
        let floor = opts.nu_floor(phi)?;
        if nu < floor {
            return Err(Error::Oracle(format!(
                "nu = {nu} is below the floor {floor:e} = {} * sup|phi|; exp(-phi/2nu) cannot be resolved",
                opts.nu_floor_factor
            )));
        }
        let points = opts.eval_points;
        let band = phi.band();
        if points < 4 * band.max(1) {
            return Err(Error::Oracle(format!(
                "evaluation grid of {points} points is below 4x the potential band {band}"
            )));
        }
        let phi_values = phi.field.reduced_physical(points)?;
        let theta_values = phi_values.mapv(|p| (-p / (2.0 * nu)).exp());
        // Only the first component carries φ; the others evaluate to exp(0).
        let mut packed = Array4::zeros(theta_values.raw_dim());
        packed.index_axis_mut(Axis(0), 0).assign(&theta_values.index_axis(Axis(0), 0));
        let n_eval = (points - 2) / 2;
        let grid = WavenumberGrid::with_points(n_eval, points)?;
        let theta0 = SpectralVectorField::from_reduced_physical(&grid, &packed)?;

        let mean = theta0.coeffs()[[0, n_eval, n_eval, n_eval]].norm();
        let cutoff = (2 * n_eval).div_ceil(3) as i64;
        let tail = grid
            .modes()
            .filter(|(k, _)| k.iter().any(|v| v.abs() >= cutoff))
            .map(|(_, idx)| theta0.coeffs()[[0, idx.0, idx.1, idx.2]].norm())
            .fold(0.0, f64::max)
            / mean;
        if !(tail < opts.tail_tolerance) {
            return Err(Error::Oracle(format!(
                "spectral tail of theta(0) is {tail:e}, above {:e}; increase eval_points",
                opts.tail_tolerance
            )));
        }
        Ok(Self { theta0, nu, theta_floor: opts.theta_floor, points })
    }

    /// `u(t)` with shape `(3, N1, N2, N3)`, collapsed along axes `φ` ignores.
    fn velocity(&self, t: f64) -> Result<Array4<f64>> {
        if !(t >= 0.0) {
            return Err(Error::Parameter(format!("oracle time must be nonnegative, got {t}")));
        }
        let nu = self.nu;
        let grid = self.theta0.grid();
        let decay = grid.radial_table(|k2| (-nu * k2 * t).exp());
        let theta = self.theta0.scale_modes(&decay);
        // Pack (θ, ∂₁θ, ∂₂θ) and ∂₃θ into two vector fields for synthesis.
        let first = {
            let mut c = Array4::zeros(theta.coeffs().raw_dim());
            c.index_axis_mut(Axis(0), 0).assign(&theta.component(0));
            c.index_axis_mut(Axis(0), 1).assign(&theta.derivative(0).component(0));
            c.index_axis_mut(Axis(0), 2).assign(&theta.derivative(1).component(0));
            SpectralVectorField::from_coeffs(grid, c)?
        };
        let d3 = theta.derivative(2);
        let a = first.reduced_physical_like(self.points, &self.theta0)?;
        let b = d3.reduced_physical_like(self.points, &self.theta0)?;
        let th = a.index_axis(Axis(0), 0);
        let min = th.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > self.theta_floor) {
            return Err(Error::Oracle(format!(
                "theta reached {min:e}, not above the floor {:e}",
                self.theta_floor
            )));
        }
        let mut u = Array4::zeros(a.raw_dim());
        for (c, grad) in [a.index_axis(Axis(0), 1), a.index_axis(Axis(0), 2), b.index_axis(Axis(0), 0)]
            .into_iter()
            .enumerate()
        {
            Zip::from(u.index_axis_mut(Axis(0), c))
                .and(&grad)
                .and(&th)
                .for_each(|out, &g, &th| *out = -2.0 * nu * g / th);
        }
        Ok(u)
    }
}

impl SpectralVectorField {
    /// Values on the same collapsed layout as `reference` uses.
    fn reduced_physical_like(&self, points: usize, reference: &SpectralVectorField) -> Result<Array4<f64>> {
        let active = reference.active_axes();
        let values = self.reduced_physical(points)?;
        // `self` may vary along fewer axes than the reference; broadcast up.
        let (_, a, b, c) = values.dim();
        let dims = active.map(|on| if on { points } else { 1 });
        if [a, b, c] == dims {
            return Ok(values);
        }
        Ok(values.broadcast((3, dims[0], dims[1], dims[2])).expect("collapsed axes broadcast").to_owned())
    }
}

/// Exact `u(t)` sampled on `opts.eval_points³` nodes.
pub fn solve(phi: &PotentialField, nu: f64, t: f64, opts: &OracleOptions) -> Result<RealVectorSample> {
    let heat = HeatSolution::new(phi, nu, opts)?;
    let u = heat.velocity(t)?;
    let p = opts.eval_points;
    RealVectorSample::from_values(u.broadcast((3, p, p, p)).expect("collapsed axes broadcast").to_owned())
}

/// `−2ν log θ(t)`: continuing the oracle from this potential reproduces the
/// original solution at later times.
pub fn effective_potential(
    phi: &PotentialField,
    nu: f64,
    t: f64,
    opts: &OracleOptions,
) -> Result<PotentialField> {
    let heat = HeatSolution::new(phi, nu, opts)?;
    let decay = heat.theta0.grid().radial_table(|k2| (-nu * k2 * t).exp());
    let theta = heat.theta0.scale_modes(&decay).reduced_physical_like(opts.eval_points, &heat.theta0)?;
    let values = theta.index_axis(Axis(0), 0).mapv(|v| -2.0 * nu * v.ln());
    PotentialField::from_samples(heat.theta0.grid(), &values)
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: usize,
    pub dt: f64,
    pub t: f64,
    pub err_l2: f64,
    pub err_linf: f64,
    pub err_h05: f64,
}

impl ErrorRow {
    pub const COLUMNS: [&'static str; 6] = ["n", "dt", "t", "err_l2", "err_linf", "err_h05"];
}

/// Errors of every stored snapshot of `traj` against the oracle, measured on
/// the oracle's evaluation grid (raised to `2n + 2` points if needed). `L^∞`
/// is the nodal maximum.
pub fn compare(traj: &TrajectoryHandle, phi: &PotentialField, opts: &OracleOptions) -> Result<Vec<ErrorRow>> {
    if !traj.config.nonlinear {
        return Err(Error::Precondition(
            "trajectory was computed without the nonlinear term; the oracle solves the full equation".into(),
        ));
    }
    let grid = traj.grid();
    let on_grid = PotentialField { field: phi.field.retruncate(grid) };
    let expected = make_gradient_data(&on_grid).project_ball();
    let initial_gap = traj.initial().max_abs_diff(&expected);
    let scale = expected.max_abs().max(1e-300);
    if initial_gap > 1e-12 * scale {
        return Err(Error::Precondition(format!(
            "trajectory initial data differs from grad(phi) by {initial_gap:e}"
        )));
    }
    // The evaluation grid must also sample the numerical solution exactly.
    let opts = &OracleOptions { eval_points: opts.eval_points.max(2 * grid.n() + 2), ..*opts };
    let heat = HeatSolution::new(phi, traj.config.nu, opts)?;
    let eval_grid = heat.theta0.grid().clone();
    let mut rows = Vec::with_capacity(traj.snapshots.len());
    for snap in &traj.snapshots {
        let exact = heat.velocity(snap.t)?;
        let numeric = snap.field.reduced_physical_like(opts.eval_points, &heat.theta0)?;
        let diff = &numeric - &exact;
        let (_, a, b, c) = diff.dim();
        let cells = (a * b * c) as f64;
        let mut linf = 0.0_f64;
        let mut sq = 0.0;
        let (x, y, z) = (diff.index_axis(Axis(0), 0), diff.index_axis(Axis(0), 1), diff.index_axis(Axis(0), 2));
        Zip::from(&x).and(&y).and(&z).for_each(|p, q, r| {
            let m = p * p + q * q + r * r;
            linf = linf.max(m);
            sq += m;
        });
        let h05 = SpectralVectorField::from_reduced_physical(&eval_grid, &diff)?.seminorm(0.5);
        rows.push(ErrorRow {
            n: grid.n(),
            dt: traj.config.dt,
            t: snap.t,
            err_l2: (sq * TORUS_VOLUME / cells).sqrt(),
            err_linf: linf.sqrt(),
            err_h05: h05,
        });
    }
    Ok(rows)
}

/// Burgers residual `‖∂_t u + (u·∇)u − νΔu‖_{L²}` of the oracle output at time
/// `t`, with spectral space derivatives and centered time differences of
/// spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResidual {
    pub t: f64,
    pub h: f64,
    pub second_order: f64,
    pub fourth_order: f64,
}

pub fn oracle_residual(
    phi: &PotentialField,
    nu: f64,
    t: f64,
    h: f64,
    opts: &OracleOptions,
) -> Result<OracleResidual> {
    if !(h > 0.0) || t < 2.0 * h {
        return Err(Error::Cadence(format!("need t >= 2h > 0 for the stencil, got t = {t}, h = {h}")));
    }
    let heat = HeatSolution::new(phi, nu, opts)?;
    let sampled = heat.theta0.grid().clone();
    // Same modes on a grid fine enough for the dealiased product.
    let grid = WavenumberGrid::new(sampled.n())?;
    let at = |s: f64| -> Result<SpectralVectorField> {
        Ok(SpectralVectorField::from_reduced_physical(&sampled, &heat.velocity(s)?)?.retruncate(&grid))
    };
    let (m2, m1, u, p1, p2) = (at(t - 2.0 * h)?, at(t - h)?, at(t)?, at(t + h)?, at(t + 2.0 * h)?);
    let advection = crate::spectral::nonlinear_term(&u)?;
    let w = |c: f64| grid.radial_table(move |_| c);
    let diffusion = grid.radial_table(|k2| nu * k2);
    let (one, inv2, inv12) = (w(1.0), w(0.5 / h), w(1.0 / (12.0 * h)));
    let (neg2, neg12, eight12, neg8_12) = (w(-0.5 / h), w(-1.0 / (12.0 * h)), w(8.0 / (12.0 * h)), w(-8.0 / (12.0 * h)));
    let second = SpectralVectorField::combine(&[(&inv2, &p1), (&neg2, &m1), (&one, &advection), (&diffusion, &u)]);
    let fourth = SpectralVectorField::combine(&[
        (&neg12, &p2),
        (&eight12, &p1),
        (&neg8_12, &m1),
        (&inv12, &m2),
        (&one, &advection),
        (&diffusion, &u),
    ]);
    Ok(OracleResidual { t, h, second_order: second.l2_norm(), fourth_order: fourth.l2_norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_cos_cos(n: usize) -> PotentialField {
        PotentialField::from_terms(&WavenumberGrid::new(n).unwrap(), &PotentialTerm::cos_cos(0.5)).unwrap()
    }

    #[test]
    fn gradient_of_cos_x1_is_minus_sin() {
        let g = WavenumberGrid::new(3).unwrap();
        let phi = PotentialField::from_terms(&g, &[PotentialTerm { k: [1, 0, 0], a: 1.0, b: 0.0 }]).unwrap();
        let u = make_gradient_data(&phi);
        let s = u.to_physical(8).unwrap();
        for ((i, _, _), v) in s.component(0).indexed_iter() {
            let x = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
            assert!((v + x.sin()).abs() < 1e-14);
        }
        assert!(s.component(1).iter().all(|v| v.abs() < 1e-15));
        assert!(u.curl().max_abs() < 1e-13);
    }

    #[test]
    fn constant_potential_gives_zero_velocity() {
        let g = WavenumberGrid::new(2).unwrap();
        let phi = PotentialField::from_terms(&g, &[PotentialTerm { k: [0, 0, 0], a: 3.0, b: 0.0 }]).unwrap();
        assert_eq!(make_gradient_data(&phi).max_abs(), 0.0);
    }

    #[test]
    fn oracle_at_time_zero_is_the_gradient() {
        let phi = phi_cos_cos(4);
        let opts = OracleOptions { eval_points: 32, ..Default::default() };
        let u = solve(&phi, 1.0, 0.0, &opts).unwrap();
        let direct = make_gradient_data(&phi).to_physical(32).unwrap();
        assert!(u.max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn oracle_decays_for_long_times() {
        let phi = phi_cos_cos(4);
        let opts = OracleOptions { eval_points: 32, ..Default::default() };
        assert!(solve(&phi, 1.0, 20.0, &opts).unwrap().max_magnitude() < 1e-12);
    }

    #[test]
    fn small_viscosity_is_refused() {
        let phi = phi_cos_cos(4);
        assert!(matches!(solve(&phi, 0.001, 0.1, &OracleOptions::default()), Err(Error::Oracle(_))));
    }

    #[test]
    fn heat_only_trajectory_is_not_comparable() {
        let mut cfg = crate::dynamics::RunConfig {
            n: 4,
            t_end: 0.0,
            nonlinear: false,
            initial_data: crate::dynamics::InitialDataSpec::GradientPotential { terms: PotentialTerm::cos_cos(0.5) },
            ..Default::default()
        };
        cfg.output.norm_points = Some(16);
        let traj = crate::dynamics::integrate(&cfg).unwrap();
        assert!(matches!(compare(&traj, &phi_cos_cos(4), &OracleOptions::default()), Err(Error::Precondition(_))));
    }
}
