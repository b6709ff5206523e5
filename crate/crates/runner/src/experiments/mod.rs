//! The built-in experiments.

mod bounds;
mod colehopf;
mod existence;
mod scaling;
mod smoothing;
mod splitting;
mod stability;

pub use bounds::{MaxPrinciple, MaxPrincipleParams, Momentum, MomentumParams, UnderResolved};
pub use colehopf::{ColeHopfConvergence, ColeHopfParams, ResidualParams};
pub use existence::{ExistenceParams, ExistenceTime, H1Bound, H1BoundParams};
pub use scaling::{Scaling, ScalingParams};
pub use smoothing::{Smoothing, SmoothingParams};
pub use splitting::{Splitting, SplittingParams};
pub use stability::{Stability, StabilityParams};

use burgers3d::dynamics::{sub_seed, InitialDataSpec, OutputPolicy, RunConfig};

/// Seed of sweep member `index` (0-based).
pub fn member_seed(master: u64, index: usize) -> u64 {
    sub_seed(master, index as u64 + 1)
}

pub(crate) fn member_name(prefix: &str, index: usize) -> String {
    format!("{prefix}_{index:02}")
}

pub(crate) fn band(k_min: f64, k_max: f64, target: f64, slope: f64) -> InitialDataSpec {
    InitialDataSpec::RandomBand { k_min, k_max, target_semi_half: target, spectral_slope: slope }
}

/// `ν = 1`, `dt = 1e-3`, ETDRK4, records every `interval`.
pub(crate) fn base_run(n: usize, t_end: f64, interval: f64, initial_data: InitialDataSpec) -> RunConfig {
    RunConfig {
        n,
        nu: 1.0,
        dt: 1e-3,
        t_end,
        initial_data,
        output: OutputPolicy { interval: Some(interval), ..OutputPolicy::default() },
        ..RunConfig::default()
    }
}

pub(crate) fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}
