use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::integrator::IntegratorRegistry;
use crate::analysis::NormOptions;
use crate::colehopf::PotentialTerm;
use crate::spectral::WavenumberGrid;
use crate::{Error, Result};

/// Everything that determines a single trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Viscosity `ν > 0`.
    pub nu: f64,
    /// Galerkin truncation order.
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Registered integrator name (`etdrk4` or `if_rk4` built in).
    pub integrator: String,
    /// Collocation points per axis for products; `None` means `3n + 2`.
    pub dealias_points: Option<usize>,
    pub initial_data: InitialDataSpec,
    pub seed: u64,
    /// Include the advection term; `false` gives the pure heat flow.
    pub nonlinear: bool,
    /// Integrate the `ν = 1` problem for `U = u/ν` in time `νt` and map back.
    pub normalize_viscosity: bool,
    /// Blowup is declared when `‖u‖_{L²}` exceeds this multiple of its
    /// initial value.
    pub blowup_factor: f64,
    pub output: OutputPolicy,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            n: 8,
            dt: 1e-3,
            t_end: 0.1,
            integrator: "etdrk4".into(),
            dealias_points: None,
            initial_data: InitialDataSpec::default(),
            seed: 0,
            nonlinear: true,
            normalize_viscosity: false,
            blowup_factor: 1e6,
            output: OutputPolicy::default(),
        }
    }
}

/// Sampling of diagnostics and snapshots along a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPolicy {
    /// Time between diagnostics records; `None` records every step. Must be
    /// a multiple of `dt`.
    pub interval: Option<f64>,
    /// Time between stored snapshots; `None` keeps only the initial and final
    /// states. Must be a multiple of `dt`.
    pub snapshot_interval: Option<f64>,
    /// Nodes per axis for `L¹`/`L^∞`; `None` means `4n`.
    pub norm_points: Option<usize>,
    /// Grid maximum only, without Newton refinement of the sup norm.
    pub coarse_linf: bool,
}

impl OutputPolicy {
    pub fn norm_options(&self) -> NormOptions {
        NormOptions { points: self.norm_points, coarse_linf: self.coarse_linf }
    }
}

/// Recipe for `u₀`. Every variant produces a real (Hermitian) field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDataSpec {
    /// `amplitude · cos(mode · x)`.
    SingleMode { mode: [i64; 3], amplitude: [f64; 3] },
    /// Gaussian coefficients on the shell `k_min ≤ |k| ≤ k_max` with envelope
    /// `|k|^{-spectral_slope}`, rescaled so that `‖u₀‖_{1/2}` equals
    /// `target_semi_half`. The mean is zero when `k_min ≥ 1`.
    RandomBand { k_min: f64, k_max: f64, target_semi_half: f64, spectral_slope: f64 },
    /// `u₀ = ∇φ` for a trigonometric potential.
    GradientPotential { terms: Vec<PotentialTerm> },
    /// `A (sin x₁ cos x₂ cos x₃, −cos x₁ sin x₂ cos x₃, 0)`.
    TaylorGreenLike { amplitude: f64 },
    /// A snapshot file, re-truncated to `n`.
    FromFile { path: PathBuf },
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        Self::RandomBand { k_min: 1.0, k_max: 3.0, target_semi_half: 1.0, spectral_slope: 1.0 }
    }
}

impl RunConfig {
    /// Collocation resolution actually used.
    pub fn points(&self) -> usize {
        self.dealias_points.unwrap_or_else(|| WavenumberGrid::default_points(self.n))
    }

    pub fn grid(&self) -> Result<std::sync::Arc<WavenumberGrid>> {
        WavenumberGrid::with_points(self.n, self.points())
    }

    /// Number of steps; the last one is shortened to land on `t_end`.
    pub fn step_count(&self) -> usize {
        if self.t_end <= 0.0 {
            return 0;
        }
        let raw = self.t_end / self.dt;
        let whole = raw.round();
        if (raw - whole).abs() <= 1e-9 * raw.max(1.0) {
            whole as usize
        } else {
            raw.ceil() as usize
        }
    }

    /// Time after `i` steps.
    pub fn time_at(&self, i: usize) -> f64 {
        if i >= self.step_count() {
            self.t_end
        } else {
            i as f64 * self.dt
        }
    }

    /// Steps between diagnostics records.
    pub fn record_stride(&self) -> usize {
        self.output.interval.map_or(1, |iv| (iv / self.dt).round().max(1.0) as usize)
    }

    /// Steps between snapshots; `None` for endpoints only.
    pub fn snapshot_stride(&self) -> Option<usize> {
        self.output.snapshot_interval.map(|iv| (iv / self.dt).round().max(1.0) as usize)
    }

    /// Every violated constraint, one message each.
    pub fn problems(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            errs.push(format!("nu must be positive and finite, got {}", self.nu));
        }
        if self.n == 0 {
            errs.push("n must be at least 1".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            errs.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            errs.push(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if let Err(e) = IntegratorRegistry::builtin().get(&self.integrator) {
            errs.push(e.to_string());
        }
        if self.n > 0 {
            let points = self.points();
            let required = if self.nonlinear {
                WavenumberGrid::min_dealias_points(self.n)
            } else {
                WavenumberGrid::min_sampling_points(self.n)
            };
            if points < required {
                errs.push(format!(
                    "dealias_points = {points} is below {required}, the minimum for n = {}",
                    self.n
                ));
            }
        }
        if !(self.blowup_factor > 1.0) {
            errs.push(format!("blowup_factor must exceed 1, got {}", self.blowup_factor));
        }
        if self.dt > 0.0 {
            for (name, iv) in [
                ("output.interval", self.output.interval),
                ("output.snapshot_interval", self.output.snapshot_interval),
            ] {
                let Some(iv) = iv else { continue };
                let ratio = iv / self.dt;
                if !(iv > 0.0) || ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
                    errs.push(format!("{name} = {iv} is not a positive multiple of dt = {}", self.dt));
                }
            }
        }
        if let Some(p) = self.output.norm_points {
            if self.n > 0 && p < WavenumberGrid::min_sampling_points(self.n) {
                errs.push(format!(
                    "output.norm_points = {p} is below {} for n = {}",
                    WavenumberGrid::min_sampling_points(self.n),
                    self.n
                ));
            }
        }
        errs.extend(self.initial_data.problems(self.n));
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(problems.join("; ")))
        }
    }
}

impl InitialDataSpec {
    fn problems(&self, n: usize) -> Vec<String> {
        let mut errs = Vec::new();
        let n = n as i64;
        match self {
            Self::SingleMode { mode, amplitude } => {
                if mode.iter().any(|c| c.abs() > n) || mode.iter().map(|c| c * c).sum::<i64>() > n * n {
                    errs.push(format!("initial_data.mode {mode:?} lies outside the ball |k| <= {n}"));
                }
                if amplitude.iter().any(|a| !a.is_finite()) {
                    errs.push("initial_data.amplitude must be finite".into());
                }
            }
            Self::RandomBand { k_min, k_max, target_semi_half, spectral_slope } => {
                if !(*k_min >= 0.0 && k_min <= k_max) {
                    errs.push(format!("initial_data band [{k_min}, {k_max}] is empty or negative"));
                }
                if *k_max > n as f64 {
                    errs.push(format!("initial_data.k_max = {k_max} exceeds n = {n}"));
                }
                if *k_max < 1.0 {
                    errs.push("initial_data.k_max must be at least 1 (a nonzero seminorm is needed)".into());
                }
                if !(*target_semi_half > 0.0 && target_semi_half.is_finite()) {
                    errs.push(format!("initial_data.target_semi_half must be positive, got {target_semi_half}"));
                }
                if !spectral_slope.is_finite() {
                    errs.push("initial_data.spectral_slope must be finite".into());
                }
            }
            Self::GradientPotential { terms } => {
                if terms.is_empty() {
                    errs.push("initial_data.terms is empty".into());
                }
                for t in terms {
                    if t.k.iter().map(|c| c * c).sum::<i64>() > n * n {
                        errs.push(format!("potential mode {:?} lies outside the ball |k| <= {n}", t.k));
                    }
                }
            }
            Self::TaylorGreenLike { amplitude } => {
                if n < 2 {
                    errs.push("taylor_green_like data needs n >= 2".into());
                }
                if !amplitude.is_finite() {
                    errs.push("initial_data.amplitude must be finite".into());
                }
            }
            Self::FromFile { path } => {
                if !path.exists() {
                    errs.push(format!("initial_data.path {} does not exist", path.display()));
                }
            }
        }
        errs
    }
}
