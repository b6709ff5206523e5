use std::sync::Arc;

use super::config::RunConfig;
use crate::analysis::DiagnosticsRecord;
use crate::spectral::{SpectralVectorField, WavenumberGrid};

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub field: SpectralVectorField,
}

/// A computed run: the configuration that produced it, stored states at
/// strictly increasing times, and the diagnostics stream.
#[derive(Debug, Clone)]
pub struct TrajectoryHandle {
    pub config: RunConfig,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticsRecord>,
}

impl TrajectoryHandle {
    pub fn grid(&self) -> &Arc<WavenumberGrid> {
        self.snapshots[0].field.grid()
    }

    /// `P_n u₀`.
    pub fn initial(&self) -> &SpectralVectorField {
        &self.snapshots[0].field
    }

    pub fn final_state(&self) -> &Snapshot {
        self.snapshots.last().expect("a trajectory holds at least the initial state")
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    /// Stored state at time `t` (exact match up to `1e-12`).
    pub fn snapshot_at(&self, t: f64) -> Option<&SpectralVectorField> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= 1e-12 * t.abs().max(1.0)).map(|s| &s.field)
    }
}
