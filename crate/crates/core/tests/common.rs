#![allow(dead_code)]

use std::sync::Arc;

use burgers3d::dynamics::{build_initial, InitialDataSpec};
use burgers3d::spectral::{SpectralVectorField, WavenumberGrid};

/// Real random field with every stored mode populated.
pub fn random_field(grid: &Arc<WavenumberGrid>, seed: u64) -> SpectralVectorField {
    let spec = InitialDataSpec::RandomBand {
        k_min: 0.0,
        k_max: 10.0 * grid.n() as f64,
        target_semi_half: 1.0,
        spectral_slope: 0.5,
    };
    build_initial(&spec, grid, seed).unwrap()
}

pub fn band(k_max: f64, target: f64) -> InitialDataSpec {
    InitialDataSpec::RandomBand { k_min: 1.0, k_max, target_semi_half: target, spectral_slope: 1.0 }
}
