use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{build_initial, integrate_from, initial_field, sub_seed, InitialDataSpec, RunConfig, TrajectoryHandle};
use crate::{Error, Result};

use super::bounds::{common_snapshots, two_solution_momentum_check};
use super::diagnostics::cumulative_trapezoid;
use super::report::{BoundReport, CheckMode};

/// Difference of two runs that differ only in their initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityPair {
    pub times: Vec<f64>,
    /// `‖w(t)‖_{1/2}` for `w = u − v`.
    pub w_semi_half: Vec<f64>,
    /// `‖w(t)‖²_{1/2} ≤ ‖w(0)‖²_{1/2} exp(∫₀ᵗ G)` with
    /// `G = c(‖u‖⁴_{H¹} + ‖v‖²_{3/2})` and `‖·‖_{H¹} = ‖·‖_{L²} + ‖·‖₁`.
    pub gronwall: BoundReport,
    pub momentum: BoundReport,
}

impl StabilityPair {
    pub fn sup_w(&self) -> f64 {
        self.w_semi_half.iter().cloned().fold(0.0, f64::max)
    }

    pub fn final_w(&self) -> f64 {
        *self.w_semi_half.last().expect("at least two samples")
    }
}

/// Compares two trajectories on their common snapshot times.
pub fn stability_pair(u: &TrajectoryHandle, v: &TrajectoryHandle, c: f64) -> Result<StabilityPair> {
    let pairs = common_snapshots(u, v)?;
    let times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut w_half = Vec::new();
    let mut g = Vec::new();
    for (_, a, b) in &pairs {
        w_half.push((*a - *b).seminorm(0.5));
        let h1 = a.l2_norm() + a.seminorm(1.0);
        g.push(c * (h1.powi(4) + b.seminorm(1.5).powi(2)));
    }
    let int_g = cumulative_trapezoid(&times, &g);
    let w0_sq = w_half[0] * w_half[0];
    let gronwall = BoundReport::new(
        "stability_gronwall",
        CheckMode::Ratio,
        times.clone(),
        w_half.iter().map(|x| x * x).collect(),
        int_g.iter().map(|i| w0_sq * i.exp()).collect(),
        0.0,
        0.0,
    )
    .with_constant("c", c)
    .with_extra("integral_G", int_g);
    let momentum = two_solution_momentum_check(u, v, 1e-8)?;
    Ok(StabilityPair { times, w_semi_half: w_half, gronwall, momentum })
}

/// Outcome of a perturbation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOutcome {
    pub deltas: Vec<f64>,
    /// `sup_t ‖w(t)‖_{1/2}` per δ.
    pub sup_w: Vec<f64>,
    /// Least-squares slope of `log sup_t‖w‖_{1/2}` against `log δ`; `None`
    /// with fewer than two positive δ.
    pub order: Option<f64>,
    /// `‖w(t_end)‖_{1/2}` per δ and its order, which unlike the supremum is
    /// not pinned by `‖w(0)‖_{1/2} = δ`.
    pub final_w: Vec<f64>,
    pub final_order: Option<f64>,
    pub pairs: Vec<StabilityPair>,
}

/// Runs `u₀` and `u₀ + δ d` for each δ, where `d` is built from `direction`
/// (seeded with sub-seed 1) and normalised to `‖d‖_{1/2} = 1`. Snapshots are
/// kept at every diagnostics record so that `w` can be formed.
pub fn stability_experiment(
    config: &RunConfig,
    deltas: &[f64],
    direction: &InitialDataSpec,
    c: f64,
) -> Result<StabilityOutcome> {
    if deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::Parameter(format!("perturbation sizes must be finite and nonnegative: {deltas:?}")));
    }
    let mut cfg = config.clone();
    cfg.output.snapshot_interval = Some(cfg.output.interval.unwrap_or(cfg.dt));
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u0 = initial_field(&cfg)?;
    let d = build_initial(direction, &grid, sub_seed(cfg.seed, 1))?;
    let size = d.seminorm(0.5);
    if size == 0.0 {
        return Err(Error::Parameter("perturbation direction has zero H^1/2 seminorm".into()));
    }
    let d = d.scaled(1.0 / size);

    let base = integrate_from(&cfg, u0.clone())?;
    let pairs: Vec<StabilityPair> = deltas
        .par_iter()
        .map(|&delta| {
            let perturbed = integrate_from(&cfg, u0.axpy(delta, &d))?;
            stability_pair(&base, &perturbed, c)
        })
        .collect::<Result<_>>()?;
    let sup_w: Vec<f64> = pairs.iter().map(StabilityPair::sup_w).collect();
    let order = dependence_order(deltas, &sup_w);
    let final_w: Vec<f64> = pairs.iter().map(StabilityPair::final_w).collect();
    let final_order = dependence_order(deltas, &final_w);
    Ok(StabilityOutcome { deltas: deltas.to_vec(), sup_w, order, final_w, final_order, pairs })
}

/// Slope of the least-squares line through `(log δ, log y)` over entries
/// with both values positive.
pub fn dependence_order(deltas: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .zip(values)
        .filter(|(d, y)| **d > 0.0 && **y > 0.0)
        .map(|(d, y)| (d.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
