//! Fourier-Galerkin solver for the viscous, vector-valued Burgers equations
//! on the periodic box `[0, 2π)³`, together with a harness that evaluates the
//! a-priori estimates of the well-posedness theory along computed trajectories.
//!
//! The crate is organised as
//!
//! * [`spectral`]: truncated Fourier representations, transforms, fractional
//!   Sobolev seminorms and the dealiased nonlinearity,
//! * [`dynamics`]: exponential time integrators (behind a name-keyed registry),
//!   the exact heat propagator, the heat/nonlinear splitting and the scaling
//!   residual,
//! * [`analysis`]: diagnostics records and bound reports (maximum principle,
//!   momentum creation, H¹ growth, splitting, stability, smoothing),
//! * [`colehopf`]: exact gradient solutions used as an oracle,
//! * [`io`]: snapshot files and CSV schemas.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod colehopf;
pub mod dynamics;
mod error;
pub mod io;
pub mod spectral;

pub use error::{Error, Result};

/// Volume of the periodic box `[0, 2π)³`; every L² quantity carries it.
pub const TORUS_VOLUME: f64 = 8.0 * std::f64::consts::PI * std::f64::consts::PI * std::f64::consts::PI;
