//! Instantaneous smoothing of rough data.

use burgers3d::analysis::smoothing_check;
use burgers3d::dynamics::{integrate, RunConfig};
use serde::{Deserialize, Serialize};

use super::{band, base_run, member_seed};
use crate::{Artifacts, Experiment, RunnerError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothingParams {
    /// First time at which smoothness is asserted.
    pub eps: f64,
    /// Largest tail fraction at `eps` for which the tail counts as resolved.
    pub max_tail: f64,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self { eps: 0.01, max_tail: 0.05 }
    }
}

#[derive(Debug, Serialize)]
struct SampleRow {
    t: f64,
    semi_1: f64,
    semi_1_5: f64,
    semi_2: f64,
    tail_fraction: f64,
    slope: Option<f64>,
}

pub struct Smoothing;

impl Experiment for Smoothing {
    type Params = SmoothingParams;

    fn name(&self) -> &'static str {
        "smoothing"
    }

    fn description(&self) -> &'static str {
        "rough random-band data: higher seminorms finite and the spectral tail steepening for t >= eps"
    }

    fn default_run(&self) -> RunConfig {
        let mut run = base_run(16, 0.1, 0.01, band(1.0, 16.0, 1.0, 1.0));
        run.output.snapshot_interval = Some(0.01);
        run
    }

    fn problems(&self, run: &RunConfig, p: &Self::Params) -> Vec<String> {
        let mut errs = Vec::new();
        if !(p.eps > 0.0 && p.eps <= run.t_end) {
            errs.push(format!("params.eps must lie in (0, t_end], got {}", p.eps));
        }
        if run.output.snapshot_interval.is_none() {
            errs.push("smoothing needs run.output.snapshot_interval".into());
        }
        if !(p.max_tail > 0.0) {
            errs.push("params.max_tail must be positive".into());
        }
        errs
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let cfg = RunConfig { seed: member_seed(seed, 0), ..run.clone() };
        let traj = integrate(&cfg)?;
        out.write_trajectory("run_00", &traj)?;
        let rep = smoothing_check(&traj, p.eps, p.max_tail)?;
        let rows: Vec<SampleRow> = rep
            .samples
            .iter()
            .map(|s| SampleRow {
                t: s.t,
                semi_1: s.semi_1,
                semi_1_5: s.semi_1_5,
                semi_2: s.semi_2,
                tail_fraction: s.tail_fraction,
                slope: s.slope,
            })
            .collect();
        out.write_csv("smoothing.csv", &rows)?;
        for t in [p.eps, 10.0 * p.eps] {
            if let Some(s) = rep.sample_at(t) {
                out.note(format!("t = {t}: tail slope {:?}, H^2 seminorm {:.6e}", s.slope, s.semi_2));
            }
        }
        out.report("run_00", rep.report);
        Ok(())
    }
}
