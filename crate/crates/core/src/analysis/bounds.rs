use crate::dynamics::TrajectoryHandle;
use crate::spectral::SpectralVectorField;
use crate::{Error, Result, TORUS_VOLUME};

use super::diagnostics::{cumulative_trapezoid, DiagnosticsRecord};
use super::existence::ExistenceEstimate;
use super::report::{BoundReport, CheckMode};

fn column(records: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<f64> {
    records.iter().map(f).collect()
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxPrincipleOptions {
    /// Runs whose tail fraction stays below this are treated as resolved and
    /// checked strictly.
    pub tail_threshold: f64,
    pub tolerance: f64,
}

impl Default for MaxPrincipleOptions {
    fn default() -> Self {
        Self { tail_threshold: 1e-10, tolerance: 1e-6 }
    }
}

/// `‖u(t)‖_{L^∞} ≤ ‖u(0)‖_{L^∞}`.
///
/// The continuous argument does not survive the projection of the nonlinear
/// term, so the check is strict only on runs whose spectral tail stays below
/// the threshold; otherwise the report is informational.
pub fn max_principle_check(traj: &TrajectoryHandle, opts: MaxPrincipleOptions) -> BoundReport {
    let rec = &traj.diagnostics;
    let u0 = rec.first().map_or(0.0, |r| r.linf);
    let max_tail = rec.iter().map(|r| r.tail_fraction).fold(0.0, f64::max);
    let resolved = max_tail < opts.tail_threshold;
    let mode = if resolved { CheckMode::Strict } else { CheckMode::Informational };
    let report = BoundReport::new(
        "max_principle",
        mode,
        column(rec, |r| r.t),
        column(rec, |r| r.linf),
        vec![u0; rec.len()],
        opts.tolerance,
        0.0,
    )
    .with_extra("tail_fraction", column(rec, |r| r.tail_fraction))
    .with_constant("tail_threshold", opts.tail_threshold);
    if resolved {
        report
    } else {
        report.with_note(format!(
            "tail fraction reaches {max_tail:e} >= {:e}; the projected system need not obey the maximum principle",
            opts.tail_threshold
        ))
    }
}

/// `|∫u(t)| ≤ 8π³∫₀ᵗ‖u‖²_{1/2} + |∫u₀|`, with the drift measured as a
/// Euclidean norm; the largest componentwise drift is kept as an extra trace.
pub fn momentum_bound_check(traj: &TrajectoryHandle, abs_tolerance: f64) -> BoundReport {
    let rec = &traj.diagnostics;
    let m0 = rec.first().map_or([0.0; 3], |r| r.momentum());
    let rhs = column(rec, |r| TORUS_VOLUME * r.cum_semi_0_5_sq + norm3(m0));
    let componentwise = column(rec, |r| {
        let m = r.momentum();
        m.iter().map(|v| v.abs()).fold(0.0, f64::max)
    });
    let drift = column(rec, |r| {
        let m = r.momentum();
        norm3([m[0] - m0[0], m[1] - m0[1], m[2] - m0[2]])
    });
    BoundReport::new(
        "momentum_bound",
        CheckMode::Strict,
        column(rec, |r| r.t),
        column(rec, |r| norm3(r.momentum())),
        rhs,
        0.0,
        abs_tolerance,
    )
    .with_extra("componentwise_max", componentwise)
    .with_extra("drift", drift)
    .with_note("time integral by the trapezoid rule on the diagnostics cadence")
}

/// Two-solution form: `|∫(w(t) − w₀)| ≤ 8π³∫₀ᵗ‖w‖_{1/2}(‖u‖_{1/2} + ‖v‖_{1/2})`
/// with `w = u − v`, evaluated on the common snapshot times.
pub fn two_solution_momentum_check(
    u: &TrajectoryHandle,
    v: &TrajectoryHandle,
    abs_tolerance: f64,
) -> Result<BoundReport> {
    let pairs = common_snapshots(u, v)?;
    let times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let w0 = pairs[0].1 - pairs[0].2;
    let m0 = w0.mean();
    let mut lhs = Vec::new();
    let mut componentwise = Vec::new();
    let mut integrand = Vec::new();
    for (_, a, b) in &pairs {
        let w = *a - *b;
        let m = w.mean();
        let d = [m[0] - m0[0], m[1] - m0[1], m[2] - m0[2]];
        lhs.push(norm3(d));
        componentwise.push(d.iter().map(|x| x.abs()).fold(0.0, f64::max));
        integrand.push(w.seminorm(0.5) * (a.seminorm(0.5) + b.seminorm(0.5)));
    }
    let rhs = cumulative_trapezoid(&times, &integrand).into_iter().map(|v| TORUS_VOLUME * v).collect();
    Ok(BoundReport::new("momentum_two_solution", CheckMode::Strict, times, lhs, rhs, 0.0, abs_tolerance)
        .with_extra("componentwise_max", componentwise)
        .with_note("time integral by the trapezoid rule on the snapshot cadence"))
}

/// Snapshots of two runs at identical times.
pub(crate) fn common_snapshots<'a>(
    u: &'a TrajectoryHandle,
    v: &'a TrajectoryHandle,
) -> Result<Vec<(f64, &'a SpectralVectorField, &'a SpectralVectorField)>> {
    let gu = u.grid();
    let gv = v.grid();
    if gu.n() != gv.n() {
        return Err(Error::GridMismatch { left: gu.n(), right: gv.n() });
    }
    let pairs: Vec<_> =
        u.snapshots.iter().filter_map(|s| v.snapshot_at(s.t).map(|f| (s.t, &s.field, f))).collect();
    if pairs.len() < 2 || pairs[0].0 != 0.0 {
        return Err(Error::Cadence("the two runs share fewer than two snapshot times including t = 0".into()));
    }
    Ok(pairs)
}

/// First derivative at interior samples by the three-point formula for
/// uneven spacing.
pub(crate) fn centered_derivative(t: &[f64], f: &[f64]) -> Vec<(usize, f64)> {
    (1..t.len().saturating_sub(1))
        .map(|i| {
            let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
            let d = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i]
                + h1 / (h2 * (h1 + h2)) * f[i + 1];
            (i, d)
        })
        .collect()
}

/// `d/dt‖u‖²_{L²} + ν‖∇u‖²_{L²} ≤ ‖u‖²_{L²}‖u‖²_{L^∞}/ν` at interior records,
/// with the time derivative by centered differences. The relative tolerance
/// is `10 h²` for the largest record spacing `h`.
pub fn energy_inequality_check(traj: &TrajectoryHandle) -> Result<BoundReport> {
    let rec = &traj.diagnostics;
    if rec.len() < 3 {
        return Err(Error::Cadence(format!("energy inequality needs at least 3 records, have {}", rec.len())));
    }
    let nu = traj.config.nu;
    let t = column(rec, |r| r.t);
    let energy = column(rec, |r| r.l2 * r.l2);
    let h = t.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let mut times = Vec::new();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut derivative = Vec::new();
    for (i, d) in centered_derivative(&t, &energy) {
        let r = &rec[i];
        times.push(t[i]);
        derivative.push(d);
        lhs.push(d + nu * r.semi_1 * r.semi_1);
        rhs.push(r.l2 * r.l2 * r.linf * r.linf / nu);
    }
    let floor = rhs.iter().cloned().fold(0.0, f64::max) * 1e-14;
    Ok(BoundReport::new("energy_inequality", CheckMode::Strict, times, lhs, rhs, 10.0 * h * h, floor)
        .with_extra("d_dt_l2_sq", derivative)
        .with_constant("nu", nu))
}

/// `‖u(t)‖₁²` against the closed-form bound curve with absorbed constant `c`
/// on `[0, min(t_end, (1 − margin) T*/c)]`.
pub fn h1_bound_check(
    traj: &TrajectoryHandle,
    est: &ExistenceEstimate,
    c: f64,
    margin: f64,
) -> Result<BoundReport> {
    if !(c > 0.0) || !(margin > 0.0 && margin < 1.0) {
        return Err(Error::Parameter(format!("need c > 0 and margin in (0, 1), got {c}, {margin}")));
    }
    let limit = (1.0 - margin) * est.t_star / c;
    let mut times = Vec::new();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for r in traj.diagnostics.iter().filter(|r| r.t <= limit) {
        let bound = est.bound(r.t, c).ok_or_else(|| {
            Error::Parameter(format!("t = {} is beyond the asymptote of the bound curve", r.t))
        })?;
        times.push(r.t);
        lhs.push(r.semi_1 * r.semi_1);
        rhs.push(bound);
    }
    let mut report = BoundReport::new("h1_bound", CheckMode::Ratio, times, lhs, rhs, 1e-12, 0.0)
        .with_constant("c", c)
        .with_constant("t_star", est.t_star)
        .with_constant("alpha", est.alpha)
        .with_constant("beta", est.beta);
    if traj.diagnostics.last().is_some_and(|r| r.t > limit) {
        report = report.with_note(format!("records after t = {limit:e} are beyond the checked window"));
    }
    Ok(report)
}

/// `‖w‖₁² ≤ ‖w‖_{1/2}‖w‖_{3/2}` (Cauchy–Schwarz on the Fourier side).
pub fn interpolation_check<'a>(fields: impl IntoIterator<Item = (f64, &'a SpectralVectorField)>) -> BoundReport {
    let mut times = Vec::new();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for (t, f) in fields {
        times.push(t);
        lhs.push(f.seminorm(1.0).powi(2));
        rhs.push(f.seminorm(0.5) * f.seminorm(1.5));
    }
    BoundReport::new("interpolation", CheckMode::Strict, times, lhs, rhs, 1e-12, 0.0)
}

/// [`interpolation_check`] from recorded seminorms.
pub fn interpolation_check_records(records: &[DiagnosticsRecord]) -> BoundReport {
    BoundReport::new(
        "interpolation",
        CheckMode::Strict,
        column(records, |r| r.t),
        column(records, |r| r.semi_1 * r.semi_1),
        column(records, |r| r.semi_0_5 * r.semi_1_5),
        1e-12,
        0.0,
    )
}
