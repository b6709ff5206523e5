//! Truncated Fourier series on the 2π-periodic box.
//!
//! Coefficients are stored on the cube `|k|∞ ≤ n` with index `k + n` along
//! each axis; the first wavenumber component varies slowest. Fields are real,
//! so the coefficients obey `û(−k) = conj(û(k))`.

mod field;
mod grid;
mod nonlinear;
mod norms;
pub(crate) mod transform;

pub use field::{RealVectorSample, SpectralVectorField};
pub use grid::WavenumberGrid;
pub use nonlinear::nonlinear_term;
pub use norms::{l1_norm, linf_norm, linf_norm_with, LinfOptions};

