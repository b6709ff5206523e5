use serde::{Deserialize, Serialize};

use crate::dynamics::{heat_seminorm_identity, TrajectoryHandle};
use crate::spectral::l1_norm;
use crate::{Error, Result};

use super::diagnostics::{cumulative_trapezoid, DiagnosticsRecord};
use super::report::{BoundReport, CheckMode};

/// Unnamed constants of the splitting estimate; all default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplittingConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub c_prime: f64,
}

impl Default for SplittingConstants {
    fn default() -> Self {
        Self { a1: 1.0, a2: 1.0, a3: 1.0, c_prime: 1.0 }
    }
}

/// The three parts of the splitting analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    /// `‖v(t)‖²_{1/2} + 2ν∫₀ᵗ‖v‖²_{3/2} = ‖P_n u₀‖²_{1/2}` (closed-form integral).
    pub heat_identity: BoundReport,
    /// Both sides of the bound for the nonlinear part `w`.
    pub w_bound: BoundReport,
    /// `½ sup‖w‖²_{1/2} + ν∫‖w‖²_{3/2} ≤ F(t)` for `t < T`.
    pub ceiling: BoundReport,
    /// Empirical `τ = sup{t : E(t) ≤ 1}` within the run (`None` if `E ≤ 1`
    /// throughout, so `τ ≥ t_end`).
    pub tau: Option<f64>,
    /// `T = sup{t : F(t) < min((16 a₃c' t⁵)^{-1/3}, 1/(2a₂))}` within the run
    /// (`None` if the condition holds throughout).
    pub t_bound: Option<f64>,
}

impl SplittingReport {
    pub fn reports(&self) -> [&BoundReport; 3] {
        [&self.heat_identity, &self.w_bound, &self.ceiling]
    }
}

fn running_max(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut m = f64::NEG_INFINITY;
    values.map(|v| {
        m = m.max(v);
        m
    })
    .collect()
}

/// Evaluates the splitting estimates along `v` (heat part) and `w`
/// (nonlinear part) from [`crate::dynamics::split_evolve`].
pub fn splitting_bound_report(
    v: &TrajectoryHandle,
    w: &TrajectoryHandle,
    constants: SplittingConstants,
) -> Result<SplittingReport> {
    let (rv, rw) = (&v.diagnostics, &w.diagnostics);
    if rv.len() != rw.len() || rv.iter().zip(rw).any(|(a, b)| a.t != b.t) {
        return Err(Error::Cadence("heat and nonlinear parts were recorded at different times".into()));
    }
    let SplittingConstants { a1, a2, a3, c_prime } = constants;
    let nu = v.config.nu;
    let v0 = v.initial();
    let times: Vec<f64> = rv.iter().map(|r| r.t).collect();

    // (i) Heat part, with the per-mode closed-form dissipation integral.
    let mut lhs_i = Vec::new();
    let mut trapezoid = Vec::new();
    let initial = v0.seminorm(0.5).powi(2);
    for r in rv {
        let id = heat_seminorm_identity(v0, nu, r.t)?;
        lhs_i.push(r.semi_0_5.powi(2) + id.dissipation);
        trapezoid.push(r.semi_0_5.powi(2) + 2.0 * nu * r.cum_semi_1_5_sq);
    }
    let sup_form: Vec<f64> = {
        let sup = running_max(rv.iter().map(|r| r.semi_0_5.powi(2)));
        sup.iter().zip(rv).map(|(s, r)| s + 2.0 * nu * r.cum_semi_1_5_sq).collect()
    };
    let heat_identity = BoundReport::new(
        "splitting_heat_identity",
        CheckMode::Strict,
        times.clone(),
        lhs_i,
        vec![initial; times.len()],
        1e-10,
        0.0,
    )
    .with_extra("trapezoid_form", trapezoid)
    .with_extra("sup_form", sup_form)
    .with_note("identity in seminorm form; the sup form is bounded by twice the initial value");

    // (ii) Both sides of the bound for w.
    let l1_u0 = l1_norm(v0, v.config.output.norm_points)?;
    let sup_w_sq = running_max(rw.iter().map(|r| r.semi_0_5.powi(2)));
    let int_v1_4 = cumulative_trapezoid(&times, &rv.iter().map(|r| r.semi_1.powi(4)).collect::<Vec<_>>());
    let int_w32 = column(rw, |r| r.cum_semi_1_5_sq);
    let int_v12 = column(rv, |r| r.cum_semi_0_5_sq);
    let mut lhs_ii = Vec::new();
    let mut rhs_ii = Vec::new();
    let mut f_trace = Vec::new();
    let mut e_trace = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let f = a1 * int_v1_4[i] + a3 * c_prime * t * int_v12[i].powi(4) + a3 * c_prime * t * l1_u0.powi(4);
        lhs_ii.push(sup_w_sq[i] + 2.0 * nu * int_w32[i]);
        rhs_ii.push(f + a2 * int_w32[i].powi(2) + a3 * c_prime * t.powi(5) * sup_w_sq[i].powi(4));
        f_trace.push(f);
        e_trace.push(a2 * int_w32[i] + a3 * c_prime * t.powi(5) * sup_w_sq[i].powi(3));
    }
    let with_constants = |r: BoundReport| {
        r.with_constant("a1", a1).with_constant("a2", a2).with_constant("a3", a3).with_constant("c_prime", c_prime)
    };
    let w_bound = with_constants(BoundReport::new(
        "splitting_w_bound",
        CheckMode::Ratio,
        times.clone(),
        lhs_ii,
        rhs_ii,
        0.0,
        0.0,
    ))
    .with_extra("E", e_trace.clone())
    .with_extra("F", f_trace.clone())
    .with_constant("l1_u0", l1_u0);

    // (iii) Stopping times and the ceiling on w for t < T.
    let tau = e_trace.iter().position(|&e| e > 1.0).map(|i| times[i]);
    let admissible = |i: usize| {
        let t = times[i];
        let first = if t > 0.0 { (16.0 * a3 * c_prime * t.powi(5)).powf(-1.0 / 3.0) } else { f64::INFINITY };
        f_trace[i] < first.min(1.0 / (2.0 * a2))
    };
    let t_bound = (0..times.len()).find(|&i| !admissible(i)).map(|i| times[i]);
    let window = t_bound.unwrap_or(f64::INFINITY);
    let keep: Vec<usize> = (0..times.len()).filter(|&i| times[i] < window).collect();
    let ceiling = with_constants(BoundReport::new(
        "splitting_ceiling",
        CheckMode::Ratio,
        keep.iter().map(|&i| times[i]).collect(),
        keep.iter().map(|&i| 0.5 * sup_w_sq[i] + nu * int_w32[i]).collect(),
        keep.iter().map(|&i| f_trace[i]).collect(),
        0.0,
        0.0,
    ))
    .with_note(match tau {
        Some(t) => format!("E(t) first exceeds 1 at t = {t}"),
        None => "E(t) <= 1 on the whole run".into(),
    })
    .with_note(match t_bound {
        Some(t) => format!("the admissibility condition defining T first fails at t = {t}"),
        None => "the admissibility condition defining T holds on the whole run".into(),
    });

    Ok(SplittingReport { heat_identity, w_bound, ceiling, tau, t_bound })
}

fn column(records: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<f64> {
    records.iter().map(f).collect()
}
