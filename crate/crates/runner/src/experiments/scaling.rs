//! Residual of the rescaled trajectory `λu(λx, λ²t)`.

use burgers3d::analysis::{BoundReport, CheckMode};
use burgers3d::dynamics::{integrate, scaling_residual_trace, RunConfig};
use serde::{Deserialize, Serialize};

use super::{band, base_run, member_seed};
use crate::{Artifacts, Experiment, RunnerError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingParams {
    pub lambda: usize,
    /// Accepted growth of the residual over the `λ = 1` baseline.
    pub factor: f64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self { lambda: 2, factor: 10.0 }
    }
}

#[derive(Debug, Serialize)]
struct ResidualRow {
    t: f64,
    residual_1: f64,
    residual_lambda: f64,
}

pub struct Scaling;

impl Experiment for Scaling {
    type Params = ScalingParams;

    fn name(&self) -> &'static str {
        "scaling"
    }

    fn description(&self) -> &'static str {
        "the rescaled trajectory solves the rescaled Galerkin system up to the time-difference error"
    }

    fn default_run(&self) -> RunConfig {
        let mut run = base_run(8, 0.05, 0.005, band(1.0, 2.0, 1.0, 1.0));
        run.output.snapshot_interval = Some(0.005);
        run
    }

    fn problems(&self, run: &RunConfig, p: &Self::Params) -> Vec<String> {
        let mut errs = Vec::new();
        if p.lambda < 2 {
            errs.push("params.lambda must be an integer >= 2".into());
        }
        if !(p.factor > 0.0) {
            errs.push("params.factor must be positive".into());
        }
        if run.output.snapshot_interval.is_none() {
            errs.push("scaling needs run.output.snapshot_interval".into());
        }
        errs
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let cfg = RunConfig { seed: member_seed(seed, 0), ..run.clone() };
        let traj = integrate(&cfg)?;
        out.write_trajectory("run_00", &traj)?;
        let base = scaling_residual_trace(&traj, 1)?;
        let scaled = scaling_residual_trace(&traj, p.lambda)?;
        let rows: Vec<ResidualRow> = base
            .iter()
            .zip(&scaled)
            .map(|(a, b)| ResidualRow { t: a.0, residual_1: a.1, residual_lambda: b.1 })
            .collect();
        out.write_csv("scaling.csv", &rows)?;
        out.report(
            "run_00",
            BoundReport::new(
                "scaling_residual",
                CheckMode::Strict,
                rows.iter().map(|r| r.t).collect(),
                rows.iter().map(|r| r.residual_lambda).collect(),
                rows.iter().map(|r| p.factor * r.residual_1).collect(),
                0.0,
                0.0,
            )
            .with_constant("lambda", p.lambda as f64)
            .with_constant("factor", p.factor)
            .with_note("times are those of the unscaled run"),
        );
        Ok(())
    }
}
