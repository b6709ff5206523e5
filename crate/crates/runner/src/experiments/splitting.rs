//! Heat/nonlinear splitting `u = v + w`.

use burgers3d::analysis::{interpolation_check, splitting_bound_report, SplittingConstants};
use burgers3d::dynamics::{heat_seminorm_identity, split_evolve, RunConfig};
use serde::{Deserialize, Serialize};

use super::{band, base_run, member_seed};
use crate::{Artifacts, Experiment, RunnerError};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplittingParams {
    pub constants: SplittingConstants,
}

#[derive(Debug, Serialize)]
struct SplittingRow {
    t: f64,
    v_semi_half_sq: f64,
    v_dissipation: f64,
    w_lhs: f64,
    w_rhs: f64,
    e: f64,
    f: f64,
}

pub struct Splitting;

impl Experiment for Splitting {
    type Params = SplittingParams;

    fn name(&self) -> &'static str {
        "splitting"
    }

    fn description(&self) -> &'static str {
        "heat seminorm identity for v, the bound for w, and the stopping times tau and T"
    }

    fn default_run(&self) -> RunConfig {
        let mut run = base_run(8, 0.2, 0.01, band(1.0, 2.0, 1.0, 1.0));
        run.output.snapshot_interval = Some(0.01);
        run
    }

    fn problems(&self, _run: &RunConfig, p: &Self::Params) -> Vec<String> {
        let c = p.constants;
        if [c.a1, c.a2, c.a3, c.c_prime].iter().all(|v| *v > 0.0) {
            Vec::new()
        } else {
            vec!["params.constants must all be positive".into()]
        }
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let cfg = RunConfig { seed: member_seed(seed, 0), ..run.clone() };
        let (v, w) = split_evolve(&cfg)?;
        out.write_trajectory("heat_part", &v)?;
        out.write_trajectory("nonlinear_part", &w)?;
        let rep = splitting_bound_report(&v, &w, p.constants)?;
        let mut rows = Vec::new();
        for (i, r) in v.diagnostics.iter().enumerate() {
            let id = heat_seminorm_identity(v.initial(), cfg.nu, r.t)?;
            rows.push(SplittingRow {
                t: r.t,
                v_semi_half_sq: id.semi_half_sq,
                v_dissipation: id.dissipation,
                w_lhs: rep.w_bound.lhs[i],
                w_rhs: rep.w_bound.rhs[i],
                e: rep.w_bound.extra["E"][i],
                f: rep.w_bound.extra["F"][i],
            });
        }
        let fmt = |t: Option<f64>| t.map_or(format!("beyond t_end = {}", cfg.t_end), |t| format!("{t}"));
        out.note(format!("tau = {}, T = {}", fmt(rep.tau), fmt(rep.t_bound)));
        out.report("split", rep.heat_identity);
        out.report("split", rep.w_bound);
        out.report("split", rep.ceiling);
        out.report("nonlinear_part", interpolation_check(w.snapshots.iter().map(|s| (s.t, &s.field))));
        out.write_csv("splitting.csv", &rows)
    }
}
