use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectoryHandle;
use crate::spectral::SpectralVectorField;
use crate::{Error, Result};

use super::report::{BoundReport, CheckMode};

/// Shells whose amplitude is below this fraction of the largest shell are
/// treated as round-off and left out of the slope fit.
const SHELL_FLOOR: f64 = 1e-13;

/// Slope of the least-squares line through `(K, ln A_K)`, where `A_K` is the
/// RMS coefficient magnitude on the shell `round(|k|) = K`, over the upper
/// two thirds `n/3 ≤ K ≤ n`. `None` when fewer than two shells qualify.
pub fn tail_slope(f: &SpectralVectorField) -> Option<f64> {
    let grid = f.grid();
    let n = grid.n();
    let mut energy = vec![0.0; n + 1];
    let mut count = vec![0usize; n + 1];
    for (_, idx) in grid.modes() {
        let shell = grid.k_norm()[idx].round() as usize;
        if shell == 0 || shell > n {
            continue;
        }
        energy[shell] += (0..3).map(|c| f.coeffs()[[c, idx.0, idx.1, idx.2]].norm_sqr()).sum::<f64>();
        count[shell] += 1;
    }
    let amp: Vec<f64> = (0..=n).map(|k| if count[k] > 0 { (energy[k] / count[k] as f64).sqrt() } else { 0.0 }).collect();
    let top = amp.iter().cloned().fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = (n.div_ceil(3).max(1)..=n)
        .filter(|&k| amp[k] > SHELL_FLOOR * top)
        .map(|k| (k as f64, amp[k].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSample {
    pub t: f64,
    pub semi_1: f64,
    pub semi_1_5: f64,
    pub semi_2: f64,
    pub tail_fraction: f64,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub eps: f64,
    /// Every stored snapshot, including those before `eps`.
    pub samples: Vec<SmoothingSample>,
    /// `|slope(ε)| ≤ |slope(t)|` for snapshots at `t ≥ ε`; a non-finite
    /// seminorm counts as an infinite ratio.
    pub report: BoundReport,
}

impl SmoothingReport {
    pub fn sample_at(&self, t: f64) -> Option<&SmoothingSample> {
        self.samples.iter().find(|s| (s.t - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

/// Instantaneous smoothing: finite higher seminorms and a steepening
/// exponential tail for `t ≥ eps`. Fails with a precondition error when the
/// tail fraction at `eps` exceeds `max_tail` (the tail is not resolved).
pub fn smoothing_check(traj: &TrajectoryHandle, eps: f64, max_tail: f64) -> Result<SmoothingReport> {
    let samples: Vec<SmoothingSample> = traj
        .snapshots
        .iter()
        .map(|s| SmoothingSample {
            t: s.t,
            semi_1: s.field.seminorm(1.0),
            semi_1_5: s.field.seminorm(1.5),
            semi_2: s.field.seminorm(2.0),
            tail_fraction: s.field.tail_fraction(),
            slope: tail_slope(&s.field),
        })
        .collect();
    let late: Vec<&SmoothingSample> = samples.iter().filter(|s| s.t >= eps * (1.0 - 1e-12)).collect();
    let first = *late
        .first()
        .ok_or_else(|| Error::Cadence(format!("no snapshot at or after eps = {eps}")))?;
    if first.tail_fraction > max_tail {
        return Err(Error::Precondition(format!(
            "tail fraction {:e} at t = {} exceeds {max_tail:e}; the tail is under-resolved",
            first.tail_fraction, first.t
        )));
    }
    let reference = first
        .slope
        .ok_or_else(|| Error::Precondition(format!("no tail slope can be fitted at t = {}", first.t)))?
        .abs();
    let lhs = late
        .iter()
        .map(|s| {
            let finite = s.semi_1.is_finite() && s.semi_1_5.is_finite() && s.semi_2.is_finite();
            if finite {
                reference
            } else {
                f64::INFINITY
            }
        })
        .collect();
    // Without a fitted slope the tail is below round-off: infinitely steep.
    let rhs = late.iter().map(|s| s.slope.map_or(f64::INFINITY, |v| -v)).collect();
    let report = BoundReport::new(
        "smoothing",
        CheckMode::Strict,
        late.iter().map(|s| s.t).collect(),
        lhs,
        rhs,
        0.0,
        0.0,
    )
    .with_constant("eps", eps)
    .with_extra("semi_2", late.iter().map(|s| s.semi_2).collect());
    Ok(SmoothingReport { eps, samples, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::heat_propagate;
    use crate::spectral::WavenumberGrid;

    #[test]
    fn heat_flow_steepens_the_tail() {
        let g = WavenumberGrid::new(8).unwrap();
        let mut u = SpectralVectorField::zeros(&g);
        for k in 1..=8i64 {
            u = &u + &SpectralVectorField::cosine_mode(&g, [k, 0, 0], [0.0, 1.0 / k as f64, 0.0]).unwrap();
        }
        let s0 = tail_slope(&u).unwrap();
        let s1 = tail_slope(&heat_propagate(&u, 1.0, 0.01).unwrap()).unwrap();
        let s2 = tail_slope(&heat_propagate(&u, 1.0, 0.1).unwrap()).unwrap();
        assert!(s2 < s1 && s1 < s0, "{s0} {s1} {s2}");
    }
}
