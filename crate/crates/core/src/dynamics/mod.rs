//! Time integration of the Galerkin system, the exact heat flow, the
//! heat/nonlinear splitting and the scaling residual.

mod config;
mod heat;
mod initial;
mod integrator;
mod run;
mod scaling;
mod trajectory;

pub use config::{InitialDataSpec, OutputPolicy, RunConfig};
pub use heat::{heat_propagate, heat_seminorm_identity, HeatIdentity};
pub use initial::{build as build_initial, initial_field, sub_seed};
pub use integrator::{Etdrk4, IfRk4, Integrator, IntegratorRegistry, NonlinearFn, Stepper};
pub use run::{galerkin_nonlinear, galerkin_rhs, integrate, integrate_from, split_evolve, split_evolve_from};
pub use scaling::{dilate, scaling_residual, scaling_residual_trace};
pub use trajectory::{Snapshot, TrajectoryHandle};
