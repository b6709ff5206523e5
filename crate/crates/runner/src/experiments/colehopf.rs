//! Agreement with the Cole–Hopf solution over an `n` sweep.

use burgers3d::analysis::{BoundReport, CheckMode};
use burgers3d::colehopf::{compare, oracle_residual, ErrorRow, OracleOptions, PotentialField, PotentialTerm};
use burgers3d::dynamics::{integrate, InitialDataSpec, RunConfig};
use burgers3d::spectral::WavenumberGrid;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::base_run;
use crate::{Artifacts, Experiment, RunnerError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualParams {
    pub t: f64,
    /// Spacing of the centered time differences.
    pub h: f64,
    pub tolerance: f64,
}

impl Default for ResidualParams {
    fn default() -> Self {
        Self { t: 0.25, h: 1e-3, tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColeHopfParams {
    /// Truncation orders; `run.n` is ignored.
    pub ns: Vec<usize>,
    /// `φ`; the initial data is `∇φ` whatever `run.initial_data` says.
    pub potential: Vec<PotentialTerm>,
    pub oracle: OracleOptions,
    /// Largest accepted `L^∞` error at the finest `n`.
    pub error_tolerance: f64,
    /// Required error reduction per sweep step...
    pub reduction: f64,
    /// ...unless both errors are already below this time-discretisation floor.
    pub floor: f64,
    pub residual: ResidualParams,
}

impl Default for ColeHopfParams {
    fn default() -> Self {
        Self {
            ns: vec![8, 16, 32],
            potential: PotentialTerm::cos_cos(0.5),
            oracle: OracleOptions::default(),
            error_tolerance: 1e-8,
            reduction: 10.0,
            floor: 1e-12,
            residual: ResidualParams::default(),
        }
    }
}

fn potential(terms: &[PotentialTerm]) -> Result<PotentialField, burgers3d::Error> {
    let radius = terms.iter().map(|t| t.k.iter().map(|c| c * c).sum::<i64>()).max().unwrap_or(0);
    let n = ((radius as f64).sqrt().ceil() as usize).max(1);
    PotentialField::from_terms(&WavenumberGrid::new(n)?, terms)
}

pub struct ColeHopfConvergence;

impl Experiment for ColeHopfConvergence {
    type Params = ColeHopfParams;

    fn name(&self) -> &'static str {
        "colehopf_convergence"
    }

    fn description(&self) -> &'static str {
        "gradient data against the exact Cole-Hopf solution for an n sweep, plus the oracle's own residual"
    }

    fn default_run(&self) -> RunConfig {
        let mut run = base_run(8, 0.5, 0.05, InitialDataSpec::GradientPotential { terms: PotentialTerm::cos_cos(0.5) });
        run.output.snapshot_interval = Some(0.05);
        run
    }

    fn problems(&self, run: &RunConfig, p: &Self::Params) -> Vec<String> {
        let mut errs = Vec::new();
        if p.ns.is_empty() || p.ns.contains(&0) {
            errs.push("params.ns must list positive truncation orders".into());
        }
        if p.potential.is_empty() {
            errs.push("params.potential is empty".into());
        }
        // Problems of the base run itself are reported once, by the caller.
        let base = run.problems();
        for &n in &p.ns {
            let probe = RunConfig {
                n,
                initial_data: InitialDataSpec::GradientPotential { terms: p.potential.clone() },
                dealias_points: None,
                ..run.clone()
            };
            errs.extend(probe.problems().into_iter().filter(|m| !base.contains(m)).map(|m| format!("n = {n}: {m}")));
        }
        if !p.potential.is_empty() {
            match potential(&p.potential).and_then(|phi| Ok((p.oracle.nu_floor(&phi)?, phi.sup_norm()?))) {
                Ok((floor, sup)) if run.nu < floor => errs.push(format!(
                    "nu = {} is below the oracle floor {floor:e} = {} * sup|phi| (sup|phi| = {sup})",
                    run.nu, p.oracle.nu_floor_factor
                )),
                Ok(_) => {}
                Err(e) => errs.push(format!("params.potential: {e}")),
            }
        }
        let r = &p.residual;
        if !(r.h > 0.0 && r.t >= 2.0 * r.h) {
            errs.push("params.residual needs h > 0 and t >= 2h".into());
        }
        errs
    }

    fn execute(&self, run: &RunConfig, p: &Self::Params, _seed: u64, out: &mut Artifacts) -> Result<(), RunnerError> {
        let phi = potential(&p.potential)?;
        let tables: Vec<Vec<ErrorRow>> = p
            .ns
            .par_iter()
            .map(|&n| {
                let cfg = RunConfig {
                    n,
                    dealias_points: None,
                    initial_data: InitialDataSpec::GradientPotential { terms: p.potential.clone() },
                    ..run.clone()
                };
                let traj = integrate(&cfg)?;
                let rows = compare(&traj, &phi, &p.oracle)?;
                // Snapshots at the finest orders are large; keep the tables only.
                out.write_csv(&format!("n_{n:03}/errors.csv"), &rows)?;
                out.write_csv(&format!("n_{n:03}/diagnostics.csv"), &traj.diagnostics)?;
                Ok(rows)
            })
            .collect::<Result<_, RunnerError>>()?;
        let finals: Vec<ErrorRow> = tables.iter().map(|t| *t.last().expect("final snapshot")).collect();
        out.write_csv("convergence.csv", &finals)?;

        let finest = tables.last().expect("at least one n");
        out.report(
            &format!("n_{:03}", finals.last().expect("at least one n").n),
            BoundReport::new(
                "colehopf_linf_error",
                CheckMode::Strict,
                finest.iter().map(|r| r.t).collect(),
                finest.iter().map(|r| r.err_linf).collect(),
                vec![p.error_tolerance; finest.len()],
                0.0,
                0.0,
            ),
        );
        let steps: Vec<(f64, f64, f64)> = finals
            .windows(2)
            .map(|w| (w[1].n as f64, w[1].err_linf, (w[0].err_linf / p.reduction).max(p.floor)))
            .collect();
        out.report(
            "sweep",
            BoundReport::new(
                "colehopf_sweep_reduction",
                CheckMode::Strict,
                steps.iter().map(|s| s.0).collect(),
                steps.iter().map(|s| s.1).collect(),
                steps.iter().map(|s| s.2).collect(),
                0.0,
                0.0,
            )
            .with_constant("reduction", p.reduction)
            .with_constant("floor", p.floor)
            .with_note("the times column holds n; rhs is max(previous error / reduction, floor)"),
        );

        let r = &p.residual;
        let res = oracle_residual(&phi, run.nu, r.t, r.h, &p.oracle)?;
        out.write_csv("oracle_residual.csv", &[res])?;
        out.report(
            "oracle",
            BoundReport::new("oracle_residual", CheckMode::Strict, vec![r.t], vec![res.fourth_order], vec![r.tolerance], 0.0, 0.0)
                .with_extra("second_order", vec![res.second_order])
                .with_note("lhs uses fourth-order centered differences in time"),
        );
        for row in &finals {
            out.note(format!("n = {:>3}: L^inf error {:.3e} at t = {}", row.n, row.err_linf, row.t));
        }
        Ok(())
    }
}
