//! Diagnostics along trajectories and reports comparing both sides of each
//! estimate of the well-posedness theory.
//!
//! Statements with explicit constants are checked strictly. Statements with
//! unnamed constants are evaluated with user-supplied values (default 1) and
//! reported as ratios.

mod bounds;
mod diagnostics;
mod existence;
mod report;
mod smoothing;
mod splitting;
mod stability;

pub use bounds::{
    energy_inequality_check, h1_bound_check, interpolation_check, interpolation_check_records,
    max_principle_check, momentum_bound_check, two_solution_momentum_check, MaxPrincipleOptions,
};
pub use diagnostics::{cumulative_trapezoid, measure, DiagnosticsAccumulator, DiagnosticsRecord, NormOptions};
pub use existence::{existence_from_norms, existence_time, ExistenceEstimate};
pub use report::{BoundReport, CheckMode, Verdict};
pub use smoothing::{smoothing_check, tail_slope, SmoothingReport, SmoothingSample};
pub use splitting::{splitting_bound_report, SplittingConstants, SplittingReport};
pub use stability::{dependence_order, stability_experiment, stability_pair, StabilityOutcome, StabilityPair};
