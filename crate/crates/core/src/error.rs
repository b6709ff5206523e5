use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution {points} is below the required {required} points per axis")]
    Resolution { points: usize, required: usize },

    #[error("fields live on different grids (n = {left} vs n = {right})")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid truncation order {0}")]
    Truncation(i64),

    #[error("negative Sobolev order {0} is not supported")]
    NegativeOrder(f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("solution became non-finite or exceeded the growth ceiling after t = {last_valid_time}: {reason}")]
    Blowup { last_valid_time: f64, reason: String },

    #[error("unknown integrator `{name}` (available: {available})")]
    UnknownIntegrator { name: String, available: String },

    #[error("snapshot cadence insufficient: {0}")]
    Cadence(String),

    #[error("oracle is not trustworthy: {0}")]
    Oracle(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
