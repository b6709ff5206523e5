use serde::{Deserialize, Serialize};

use crate::spectral::{l1_norm, SpectralVectorField};
use crate::Result;

/// Lower bound on the Galerkin existence time from `‖u₀‖₁` and `‖u₀‖_{L¹}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExistenceEstimate {
    /// `(4 + ‖u₀‖⁴_{L¹})^{1/5}`.
    pub alpha: f64,
    /// `(2 + 4‖u₀‖⁴_{L¹})^{1/5}`.
    pub beta: f64,
    /// `1 / (4α(α‖u₀‖₁² + β)⁴)`, or `∞` for the zero field.
    pub t_star: f64,
    /// `‖u₀‖₁²`.
    pub h1_sq: f64,
    pub l1: f64,
}

/// `existence_time` from the two norms directly.
pub fn existence_from_norms(h1_sq: f64, l1: f64) -> ExistenceEstimate {
    let alpha = (4.0 + l1.powi(4)).powf(0.2);
    let beta = (2.0 + 4.0 * l1.powi(4)).powf(0.2);
    let t_star = 1.0 / (4.0 * alpha * (alpha * h1_sq + beta).powi(4));
    ExistenceEstimate { alpha, beta, t_star, h1_sq, l1 }
}

/// Evaluates the estimate for `u₀`. `‖u₀‖_{L¹}` uses `points` nodes per axis
/// (default `4n`). The zero field never blows up and gets `T* = ∞`.
pub fn existence_time(u0: &SpectralVectorField, points: Option<usize>) -> Result<ExistenceEstimate> {
    let mut est = existence_from_norms(u0.seminorm(1.0).powi(2), l1_norm(u0, points)?);
    if u0.max_abs() == 0.0 {
        est.t_star = f64::INFINITY;
    }
    Ok(est)
}

impl ExistenceEstimate {
    /// Bound on `‖u(t)‖₁²` with the absorbed constant set to `c`; `None` at
    /// and beyond the vertical asymptote `T*/c`.
    pub fn bound(&self, t: f64, c: f64) -> Option<f64> {
        let s = self.alpha * self.h1_sq + self.beta;
        let q = 1.0 - 4.0 * c * self.alpha * t * s.powi(4);
        (q > 0.0).then(|| s / (self.alpha * q.powf(0.25)) - self.beta / self.alpha)
    }

    pub fn bound_curve(&self, times: &[f64], c: f64) -> Vec<Option<f64>> {
        times.iter().map(|&t| self.bound(t, c)).collect()
    }
}
