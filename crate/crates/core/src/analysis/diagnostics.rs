use serde::{Deserialize, Serialize};

use crate::spectral::{l1_norm, linf_norm_with, LinfOptions, SpectralVectorField};
use crate::Result;

/// One time sample of the monitored quantities.
///
/// Field order matches the diagnostics CSV schema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2: f64,
    pub l1: f64,
    pub linf: f64,
    pub semi_0_5: f64,
    pub semi_1: f64,
    pub semi_1_5: f64,
    pub semi_2: f64,
    pub mom_x: f64,
    pub mom_y: f64,
    pub mom_z: f64,
    /// `∫₀ᵗ ‖u‖²_{1/2}` by the trapezoid rule on the record cadence.
    pub cum_semi_0_5_sq: f64,
    /// `∫₀ᵗ ‖u‖²_{3/2}` by the trapezoid rule on the record cadence.
    pub cum_semi_1_5_sq: f64,
    pub tail_fraction: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 14] = [
        "t",
        "l2",
        "l1",
        "linf",
        "semi_0_5",
        "semi_1",
        "semi_1_5",
        "semi_2",
        "mom_x",
        "mom_y",
        "mom_z",
        "cum_semi_0_5_sq",
        "cum_semi_1_5_sq",
        "tail_fraction",
    ];

    pub fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.l2,
            self.l1,
            self.linf,
            self.semi_0_5,
            self.semi_1,
            self.semi_1_5,
            self.semi_2,
            self.mom_x,
            self.mom_y,
            self.mom_z,
            self.cum_semi_0_5_sq,
            self.cum_semi_1_5_sq,
            self.tail_fraction,
        ]
    }

    pub fn from_values(v: [f64; 14]) -> Self {
        Self {
            t: v[0],
            l2: v[1],
            l1: v[2],
            linf: v[3],
            semi_0_5: v[4],
            semi_1: v[5],
            semi_1_5: v[6],
            semi_2: v[7],
            mom_x: v[8],
            mom_y: v[9],
            mom_z: v[10],
            cum_semi_0_5_sq: v[11],
            cum_semi_1_5_sq: v[12],
            tail_fraction: v[13],
        }
    }

    pub fn momentum(&self) -> [f64; 3] {
        [self.mom_x, self.mom_y, self.mom_z]
    }
}

/// Resolution used for the physical-space norms of a record.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormOptions {
    /// Nodes per axis for `L¹` and `L^∞`; `None` means `4n`.
    pub points: Option<usize>,
    /// Skip Newton refinement of the sup norm.
    pub coarse_linf: bool,
}

/// Evaluates every norm of `u` at time `t`; the cumulative integrals are left
/// at zero (see [`DiagnosticsAccumulator`]).
pub fn measure(u: &SpectralVectorField, t: f64, opts: NormOptions) -> Result<DiagnosticsRecord> {
    let mom = u.mean();
    let linf = linf_norm_with(
        u,
        LinfOptions { points: opts.points, refine: !opts.coarse_linf, ..LinfOptions::default() },
    )?;
    Ok(DiagnosticsRecord {
        t,
        l2: u.l2_norm(),
        l1: l1_norm(u, opts.points)?,
        linf,
        semi_0_5: u.seminorm(0.5),
        semi_1: u.seminorm(1.0),
        semi_1_5: u.seminorm(1.5),
        semi_2: u.seminorm(2.0),
        mom_x: mom[0],
        mom_y: mom[1],
        mom_z: mom[2],
        cum_semi_0_5_sq: 0.0,
        cum_semi_1_5_sq: 0.0,
        tail_fraction: u.tail_fraction(),
    })
}

/// Appends records while accumulating the running time integrals.
#[derive(Debug, Clone, Default)]
pub struct DiagnosticsAccumulator {
    records: Vec<DiagnosticsRecord>,
}

impl DiagnosticsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, mut rec: DiagnosticsRecord) {
        if let Some(prev) = self.records.last() {
            let dt = rec.t - prev.t;
            rec.cum_semi_0_5_sq =
                prev.cum_semi_0_5_sq + 0.5 * dt * (prev.semi_0_5.powi(2) + rec.semi_0_5.powi(2));
            rec.cum_semi_1_5_sq =
                prev.cum_semi_1_5_sq + 0.5 * dt * (prev.semi_1_5.powi(2) + rec.semi_1_5.powi(2));
        } else {
            rec.cum_semi_0_5_sq = 0.0;
            rec.cum_semi_1_5_sq = 0.0;
        }
        self.records.push(rec);
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<DiagnosticsRecord> {
        self.records
    }
}

/// Cumulative trapezoid integral of `values` sampled at `times`.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for i in 0..values.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::WavenumberGrid;

    #[test]
    fn cumulative_integrals_are_trapezoid_sums() {
        let g = WavenumberGrid::new(2).unwrap();
        let u = SpectralVectorField::cosine_mode(&g, [1, 0, 0], [1.0, 0.0, 0.0]).unwrap();
        let mut acc = DiagnosticsAccumulator::new();
        for (i, scale) in [1.0, 0.5, 0.25].iter().enumerate() {
            acc.push(measure(&u.scaled(*scale), 0.1 * i as f64, NormOptions::default()).unwrap());
        }
        let r = acc.records();
        let s: Vec<f64> = r.iter().map(|x| x.semi_0_5.powi(2)).collect();
        let expected = 0.05 * (s[0] + s[1]) + 0.05 * (s[1] + s[2]);
        assert!((r[2].cum_semi_0_5_sq - expected).abs() < 1e-12 * expected);
        assert!(r.windows(2).all(|w| w[1].cum_semi_1_5_sq >= w[0].cum_semi_1_5_sq));
    }

    #[test]
    fn record_round_trips_through_value_array() {
        let v: [f64; 14] = std::array::from_fn(|i| i as f64 * 0.5);
        assert_eq!(DiagnosticsRecord::from_values(v).values(), v);
    }
}
