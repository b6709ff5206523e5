use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{InitialDataSpec, RunConfig};
use crate::colehopf::{make_gradient_data, PotentialField};
use crate::spectral::{RealVectorSample, SpectralVectorField, WavenumberGrid};
use crate::{io, Error, Result};

/// `P_n u₀` for the configured recipe and seed.
pub fn initial_field(config: &RunConfig) -> Result<SpectralVectorField> {
    let grid = config.grid()?;
    build(&config.initial_data, &grid, config.seed)
}

/// Seed of sub-run `stream` under `master`: the first output of ChaCha8
/// seeded with `master` on stream `stream`. Stream 0 is reserved for the
/// master run itself, which uses `master` unchanged.
pub fn sub_seed(master: u64, stream: u64) -> u64 {
    if stream == 0 {
        return master;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Builds `P_n u₀` on `grid`; only `random_band` consumes the seed.
pub fn build(spec: &InitialDataSpec, grid: &Arc<WavenumberGrid>, seed: u64) -> Result<SpectralVectorField> {
    let field = match spec {
        InitialDataSpec::SingleMode { mode, amplitude } => {
            SpectralVectorField::cosine_mode(grid, *mode, *amplitude)?
        }
        InitialDataSpec::RandomBand { k_min, k_max, target_semi_half, spectral_slope } => {
            random_band(grid, seed, *k_min, *k_max, *target_semi_half, *spectral_slope)?
        }
        InitialDataSpec::GradientPotential { terms } => {
            make_gradient_data(&PotentialField::from_terms(grid, terms)?)
        }
        InitialDataSpec::TaylorGreenLike { amplitude } => {
            let a = *amplitude;
            let points = WavenumberGrid::min_sampling_points(grid.n());
            RealVectorSample::from_fn(points, |[x, y, z]| {
                [a * x.sin() * y.cos() * z.cos(), -a * x.cos() * y.sin() * z.cos(), 0.0]
            })
            .to_spectral_on(grid)?
        }
        InitialDataSpec::FromFile { path } => io::read_snapshot(path)?.field.retruncate(grid),
    };
    Ok(field.project_ball())
}

fn random_band(
    grid: &Arc<WavenumberGrid>,
    seed: u64,
    k_min: f64,
    k_max: f64,
    target: f64,
    slope: f64,
) -> Result<SpectralVectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = SpectralVectorField::zeros(grid);
    {
        let coeffs = raw.coeffs_mut();
        for (k, (i, j, l)) in grid.modes() {
            let norm = grid.k_norm()[(i, j, l)];
            if norm < k_min || norm > k_max {
                continue;
            }
            let envelope = if norm == 0.0 { 1.0 } else { norm.powf(-slope) };
            for c in 0..3 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                coeffs[[c, i, j, l]] = Complex64::new(re, im) * envelope;
            }
            debug_assert!(k.iter().all(|v| v.unsigned_abs() as usize <= grid.n()));
        }
    }
    let field = raw.symmetrize();
    let semi = field.seminorm(0.5);
    if semi == 0.0 {
        return Err(Error::Parameter(format!(
            "band [{k_min}, {k_max}] contains no nonzero wavevector"
        )));
    }
    Ok(field.scaled(target / semi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_band_hits_target_and_is_real() {
        let g = WavenumberGrid::new(6).unwrap();
        let spec = InitialDataSpec::RandomBand { k_min: 1.0, k_max: 4.0, target_semi_half: 0.7, spectral_slope: 1.5 };
        let u = build(&spec, &g, 11).unwrap();
        assert!((u.seminorm(0.5) - 0.7).abs() < 1e-10 * 0.7);
        assert_eq!(u.hermitian_defect(), 0.0);
        assert_eq!(u.mean(), [0.0; 3]);
        let again = build(&spec, &g, 11).unwrap();
        assert_eq!(u.max_abs_diff(&again), 0.0);
        let other = build(&spec, &g, 12).unwrap();
        assert!(u.max_abs_diff(&other) > 0.0);
    }

    #[test]
    fn taylor_green_has_eight_modes_per_component() {
        let g = WavenumberGrid::new(2).unwrap();
        let u = build(&InitialDataSpec::TaylorGreenLike { amplitude: 2.0 }, &g, 0).unwrap();
        let z = u.coefficient([1, 1, 1]).unwrap();
        // sin x cos y cos z has coefficient 1/(8i) at (1,1,1).
        assert!((z[0] - Complex64::new(0.0, -0.25)).norm() < 1e-14);
        assert!((z[1] - Complex64::new(0.0, 0.25)).norm() < 1e-14);
        assert!(z[2].norm() < 1e-15);
    }
}
