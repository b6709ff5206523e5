//! Maximum principle and momentum creation on seeded ensembles.

use burgers3d::analysis::{
    energy_inequality_check, interpolation_check_records, max_principle_check, momentum_bound_check,
    MaxPrincipleOptions,
};
use burgers3d::dynamics::{integrate, RunConfig, TrajectoryHandle};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{band, base_run, max, member_name, member_seed};
use crate::{Artifacts, Experiment, RunnerError};

/// Seeded copies of `base`, integrated concurrently; each trajectory is
/// written to its own member directory before the results are gathered.
pub(crate) fn ensemble(
    base: &RunConfig,
    seed: u64,
    runs: usize,
    prefix: &str,
    out: &Artifacts,
) -> Result<Vec<(String, TrajectoryHandle)>, RunnerError> {
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let name = member_name(prefix, i);
            let cfg = RunConfig { seed: member_seed(seed, i), ..base.clone() };
            let traj = integrate(&cfg)?;
            out.write_trajectory(&name, &traj)?;
            Ok((name, traj))
        })
        .collect()
}

/// A coarse, weakly viscous run whose spectral tail is not resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnderResolved {
    pub n: usize,
    pub nu: f64,
    pub target_semi_half: f64,
}

impl Default for UnderResolved {
    fn default() -> Self {
        Self { n: 4, nu: 0.02, target_semi_half: 40.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxPrincipleParams {
    pub runs: usize,
    pub tail_threshold: f64,
    pub tolerance: f64,
    /// `false` skips the documented under-resolved run.
    pub under_resolved_enabled: bool,
    pub under_resolved: UnderResolved,
}

impl Default for MaxPrincipleParams {
    fn default() -> Self {
        Self {
            runs: 10,
            tail_threshold: 1e-10,
            tolerance: 1e-6,
            under_resolved_enabled: true,
            under_resolved: UnderResolved::default(),
        }
    }
}

#[derive(Debug, Serialize)]
struct MaxPrincipleRow<'a> {
    member: &'a str,
    seed: u64,
    n: usize,
    linf_0: f64,
    max_linf: f64,
    max_ratio: f64,
    max_tail_fraction: f64,
}

pub struct MaxPrinciple;

impl Experiment for MaxPrinciple {
    type Params = MaxPrincipleParams;

    fn name(&self) -> &'static str {
        "max_principle"
    }

    fn description(&self) -> &'static str {
        "sup-norm never exceeds its initial value on resolved runs; one under-resolved run is documented"
    }

    fn default_run(&self) -> RunConfig {
        base_run(8, 0.5, 0.01, band(1.0, 2.0, 1.0, 1.0))
    }

    fn problems(&self, run: &RunConfig, p: &Self::Params) -> Vec<String> {
        let mut errs = Vec::new();
        if p.runs == 0 {
            errs.push("params.runs must be at least 1".into());
        }
        if !(p.tolerance >= 0.0) || !(p.tail_threshold > 0.0) {
            errs.push("params.tolerance must be >= 0 and params.tail_threshold > 0".into());
        }
        if p.under_resolved_enabled {
            let base = run.problems();
            let probe = under_resolved_run(run, &p.under_resolved).problems();
            errs.extend(probe.into_iter().filter(|m| !base.contains(m)).map(|m| format!("under_resolved: {m}")));
        }
        errs
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let opts = MaxPrincipleOptions { tail_threshold: p.tail_threshold, tolerance: p.tolerance };
        let mut members = ensemble(run, seed, p.runs, "run", out)?;
        if p.under_resolved_enabled {
            let cfg = RunConfig { seed: member_seed(seed, p.runs), ..under_resolved_run(run, &p.under_resolved) };
            let traj = integrate(&cfg)?;
            out.write_trajectory("under_resolved", &traj)?;
            members.push(("under_resolved".into(), traj));
        }
        let mut rows = Vec::new();
        for (name, traj) in &members {
            let mp = max_principle_check(traj, opts);
            let d = &traj.diagnostics;
            rows.push(MaxPrincipleRow {
                member: name,
                seed: traj.config.seed,
                n: traj.config.n,
                linf_0: d[0].linf,
                max_linf: max(d.iter().map(|r| r.linf)),
                max_ratio: mp.max_ratio,
                max_tail_fraction: max(d.iter().map(|r| r.tail_fraction)),
            });
            if name == "under_resolved" {
                out.note(format!(
                    "under-resolved run (n = {}, nu = {}): tail fraction up to {:.3e}, sup-norm ratio {:.6}",
                    traj.config.n,
                    traj.config.nu,
                    rows.last().map_or(0.0, |r| r.max_tail_fraction),
                    mp.max_ratio
                ));
            }
            out.report(name, mp);
            out.report(name, energy_inequality_check(traj)?);
            out.report(name, interpolation_check_records(d));
        }
        out.write_csv("max_principle.csv", &rows)
    }
}

fn under_resolved_run(run: &RunConfig, u: &UnderResolved) -> RunConfig {
    RunConfig {
        n: u.n,
        nu: u.nu,
        dealias_points: None,
        initial_data: band(1.0, u.n as f64, u.target_semi_half, 0.0),
        ..run.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentumParams {
    pub runs: usize,
    /// Absolute slack for the trapezoid time integral.
    pub abs_tolerance: f64,
    /// Drift regarded as visible momentum creation.
    pub drift_threshold: f64,
}

impl Default for MomentumParams {
    fn default() -> Self {
        Self { runs: 10, abs_tolerance: 1e-8, drift_threshold: 1e-6 }
    }
}

#[derive(Debug, Serialize)]
struct MomentumRow<'a> {
    member: &'a str,
    seed: u64,
    momentum_0: f64,
    max_drift: f64,
    max_componentwise: f64,
    max_ratio: f64,
}

pub struct Momentum;

impl Experiment for Momentum {
    type Params = MomentumParams;

    fn name(&self) -> &'static str {
        "momentum"
    }

    fn description(&self) -> &'static str {
        "created momentum stays below the time integral of the squared H^1/2 seminorm"
    }

    fn default_run(&self) -> RunConfig {
        base_run(8, 0.5, 0.01, band(1.0, 2.0, 1.0, 1.0))
    }

    fn problems(&self, _run: &RunConfig, p: &Self::Params) -> Vec<String> {
        let mut errs = Vec::new();
        if p.runs == 0 {
            errs.push("params.runs must be at least 1".into());
        }
        if !(p.abs_tolerance >= 0.0) {
            errs.push("params.abs_tolerance must be nonnegative".into());
        }
        errs
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let members = ensemble(run, seed, p.runs, "run", out)?;
        let mut rows = Vec::new();
        for (name, traj) in &members {
            let r = momentum_bound_check(traj, p.abs_tolerance);
            rows.push(MomentumRow {
                member: name,
                seed: traj.config.seed,
                momentum_0: r.lhs[0],
                max_drift: max(r.extra["drift"].iter().copied()),
                max_componentwise: max(r.extra["componentwise_max"].iter().copied()),
                max_ratio: r.max_ratio,
            });
            out.report(name, r);
        }
        let largest = max(rows.iter().map(|r| r.max_drift));
        let created = rows.iter().filter(|r| r.max_drift >= p.drift_threshold).count();
        out.note(format!(
            "largest momentum drift {largest:.3e}; {created} of {} runs exceed {:e}",
            rows.len(),
            p.drift_threshold
        ));
        out.write_csv("momentum.csv", &rows)
    }
}
