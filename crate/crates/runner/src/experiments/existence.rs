//! Existence time `T*` and the closed-form `H¹` bound curve.

use burgers3d::analysis::{existence_time, h1_bound_check, BoundReport, CheckMode, ExistenceEstimate};
use burgers3d::dynamics::{initial_field, integrate_from, OutputPolicy, RunConfig};
use burgers3d::Error;
use serde::{Deserialize, Serialize};

use super::{band, base_run, member_name, member_seed};
use crate::{Artifacts, Experiment, RunnerError};

/// `run` with seed `seed`, its initial data and estimate.
fn estimate(run: &RunConfig, seed: u64) -> Result<(RunConfig, ExistenceEstimate), RunnerError> {
    let cfg = RunConfig { seed, ..run.clone() };
    let u0 = initial_field(&cfg)?;
    let est = existence_time(&u0, cfg.output.norm_points)?;
    Ok((cfg, est))
}

/// Integrates to `t_end` in `steps` equal steps, recording every step.
fn run_to(cfg: &RunConfig, t_end: f64, steps: usize) -> RunConfig {
    RunConfig {
        t_end,
        dt: t_end / steps as f64,
        output: OutputPolicy { interval: None, snapshot_interval: None, ..cfg.output.clone() },
        ..cfg.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExistenceParams {
    pub runs: usize,
    /// Time steps on `[0, T*]`.
    pub steps: usize,
    /// Absorbed constant of the bound curve.
    pub c: f64,
    /// The curve is checked on `[0, (1 − margin) T*/c]`.
    pub margin: f64,
}

impl Default for ExistenceParams {
    fn default() -> Self {
        Self { runs: 3, steps: 50, c: 1.0, margin: 0.02 }
    }
}

#[derive(Debug, Serialize)]
struct ExistenceRow<'a> {
    member: &'a str,
    seed: u64,
    h1_sq: f64,
    l1: f64,
    alpha: f64,
    beta: f64,
    t_star: f64,
    reached: f64,
}

fn check_common(steps: usize, c: &[f64], margin: f64) -> Vec<String> {
    let mut errs = Vec::new();
    if steps < 2 {
        errs.push("params.steps must be at least 2".into());
    }
    if c.is_empty() || c.iter().any(|c| !(*c > 0.0)) {
        errs.push("params.c must be positive".into());
    }
    if !(margin > 0.0 && margin < 1.0) {
        errs.push(format!("params.margin must lie in (0, 1), got {margin}"));
    }
    errs
}

pub struct ExistenceTime;

impl Experiment for ExistenceTime {
    type Params = ExistenceParams;

    fn name(&self) -> &'static str {
        "existence_time"
    }

    fn description(&self) -> &'static str {
        "alpha, beta and T* from the initial data; no blowup on [0, T*]"
    }

    fn default_run(&self) -> RunConfig {
        base_run(8, 0.1, 0.01, band(1.0, 2.0, 1.0, 1.0))
    }

    fn problems(&self, _run: &RunConfig, p: &Self::Params) -> Vec<String> {
        let mut errs = check_common(p.steps, &[p.c], p.margin);
        if p.runs == 0 {
            errs.push("params.runs must be at least 1".into());
        }
        errs
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let mut rows = Vec::new();
        let mut names = Vec::new();
        for i in 0..p.runs {
            let name = member_name("run", i);
            let (cfg, est) = estimate(run, member_seed(seed, i))?;
            if !est.t_star.is_finite() {
                out.note(format!("{name}: zero initial data, T* is infinite; nothing to integrate"));
                continue;
            }
            let cfg = run_to(&cfg, est.t_star, p.steps);
            let u0 = initial_field(&cfg)?;
            let reached = match integrate_from(&cfg, u0) {
                Ok(traj) => {
                    out.write_trajectory(&name, &traj)?;
                    out.report(&name, h1_bound_check(&traj, &est, p.c, p.margin)?);
                    traj.final_state().t
                }
                Err(Error::Blowup { last_valid_time, reason }) => {
                    out.note(format!("{name}: blowup at t = {last_valid_time:e}: {reason}"));
                    last_valid_time
                }
                Err(e) => return Err(e.into()),
            };
            out.report(
                &name,
                BoundReport::new("no_blowup_before_t_star", CheckMode::Strict, vec![est.t_star], vec![est.t_star], vec![reached], 1e-12, 0.0)
                    .with_note("lhs is T*, rhs the last time the run reached"),
            );
            names.push(name);
            rows.push((cfg.seed, est, reached));
        }
        let rows: Vec<ExistenceRow> = names
            .iter()
            .zip(&rows)
            .map(|(name, (seed, e, reached))| ExistenceRow {
                member: name,
                seed: *seed,
                h1_sq: e.h1_sq,
                l1: e.l1,
                alpha: e.alpha,
                beta: e.beta,
                t_star: e.t_star,
                reached: *reached,
            })
            .collect();
        out.write_csv("existence.csv", &rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct H1BoundParams {
    /// Absorbed constants to check; the run covers the longest window.
    pub c: Vec<f64>,
    pub margin: f64,
    pub steps: usize,
}

impl Default for H1BoundParams {
    fn default() -> Self {
        Self { c: vec![1.0, 0.5], margin: 0.02, steps: 100 }
    }
}

#[derive(Debug, Serialize)]
struct CurveRow {
    c: f64,
    t: f64,
    h1_sq: f64,
    bound: f64,
}

pub struct H1Bound;

impl Experiment for H1Bound {
    type Params = H1BoundParams;

    fn name(&self) -> &'static str {
        "h1_bound"
    }

    fn description(&self) -> &'static str {
        "squared H^1 seminorm against the closed-form bound curve up to the asymptote"
    }

    fn default_run(&self) -> RunConfig {
        base_run(8, 0.1, 0.01, band(1.0, 2.0, 1.0, 1.0))
    }

    fn problems(&self, _run: &RunConfig, p: &Self::Params) -> Vec<String> {
        check_common(p.steps, &p.c, p.margin)
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let (cfg, est) = estimate(run, member_seed(seed, 0))?;
        if !est.t_star.is_finite() {
            out.note("zero initial data: T* is infinite and the bound is constant");
            return Ok(());
        }
        let c_min = p.c.iter().cloned().fold(f64::INFINITY, f64::min);
        let horizon = (1.0 - p.margin) * est.t_star / c_min;
        let traj = integrate_from(&run_to(&cfg, horizon, p.steps), initial_field(&cfg)?)?;
        out.write_trajectory("run_00", &traj)?;
        let mut rows = Vec::new();
        for &c in &p.c {
            let r = h1_bound_check(&traj, &est, c, p.margin)?;
            for i in 0..r.times.len() {
                rows.push(CurveRow { c, t: r.times[i], h1_sq: r.lhs[i], bound: r.rhs[i] });
            }
            out.report("run_00", r);
        }
        out.note(format!("T* = {:e} (alpha = {}, beta = {})", est.t_star, est.alpha, est.beta));
        out.write_csv("h1_bound.csv", &rows)
    }
}
