//! Continuous dependence on the initial data.

use burgers3d::analysis::{stability_experiment, BoundReport, CheckMode};
use burgers3d::dynamics::{InitialDataSpec, RunConfig};
use serde::{Deserialize, Serialize};

use super::{band, base_run, member_name, member_seed};
use crate::{Artifacts, Experiment, RunnerError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityParams {
    pub deltas: Vec<f64>,
    /// Constant in the Gronwall weight.
    pub c: f64,
    /// Recipe for the perturbation direction (normalised to unit `‖·‖_{1/2}`).
    pub direction: InitialDataSpec,
    /// Accepted distance of the measured order from 1.
    pub order_tolerance: f64,
}

impl Default for StabilityParams {
    fn default() -> Self {
        Self {
            deltas: vec![1e-2, 1e-3, 1e-4],
            c: 1.0,
            direction: band(1.0, 2.0, 1.0, 1.0),
            order_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Serialize)]
struct SweepRow {
    delta: f64,
    sup_w: f64,
    final_w: f64,
}

#[derive(Debug, Serialize)]
struct TraceRow {
    t: f64,
    w_semi_half: f64,
    gronwall_rhs: f64,
}

pub struct Stability;

impl Experiment for Stability {
    type Params = StabilityParams;

    fn name(&self) -> &'static str {
        "stability"
    }

    fn description(&self) -> &'static str {
        "delta sweep: sup_t of the H^1/2 difference scales linearly in the perturbation"
    }

    fn default_run(&self) -> RunConfig {
        base_run(8, 0.2, 0.01, band(1.0, 2.0, 1.0, 1.0))
    }

    fn problems(&self, run: &RunConfig, p: &Self::Params) -> Vec<String> {
        let mut errs = Vec::new();
        if p.deltas.len() < 2 || p.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            errs.push("params.deltas needs at least two positive values".into());
        }
        if !(p.c > 0.0) || !(p.order_tolerance > 0.0) {
            errs.push("params.c and params.order_tolerance must be positive".into());
        }
        let probe = RunConfig { initial_data: p.direction.clone(), ..run.clone() };
        let base = run.problems();
        errs.extend(probe.problems().into_iter().filter(|m| !base.contains(m)).map(|m| format!("direction: {m}")));
        errs
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let cfg = RunConfig { seed: member_seed(seed, 0), ..run.clone() };
        let outcome = stability_experiment(&cfg, &p.deltas, &p.direction, p.c)?;
        let rows: Vec<SweepRow> = (0..p.deltas.len())
            .map(|i| SweepRow { delta: p.deltas[i], sup_w: outcome.sup_w[i], final_w: outcome.final_w[i] })
            .collect();
        out.write_csv("stability.csv", &rows)?;
        for (i, pair) in outcome.pairs.into_iter().enumerate() {
            let name = member_name("delta", i);
            let trace: Vec<TraceRow> = (0..pair.times.len())
                .map(|j| TraceRow { t: pair.times[j], w_semi_half: pair.w_semi_half[j], gronwall_rhs: pair.gronwall.rhs[j] })
                .collect();
            out.write_csv(&format!("{name}/trace.csv"), &trace)?;
            out.report(&name, pair.gronwall);
            out.report(&name, pair.momentum);
        }
        let order = outcome.order.unwrap_or(f64::NAN);
        let final_order = outcome.final_order.unwrap_or(f64::NAN);
        out.note(format!("dependence order: sup over time {order:.6}, final time {final_order:.6}"));
        out.report(
            "sweep",
            BoundReport::new(
                "stability_order",
                CheckMode::Strict,
                vec![cfg.t_end],
                vec![(order - 1.0).abs()],
                vec![p.order_tolerance],
                0.0,
                0.0,
            )
            .with_constant("order", order)
            .with_constant("final_time_order", final_order)
            .with_note("lhs is |order - 1| for sup_t of the H^1/2 difference"),
        );
        Ok(())
    }
}
