use thiserror::Error;

/// Errors raised across the simulator, learners and run harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distance {distance} m is below the {min} m singularity guard")]
    DistanceTooSmall { distance: f64, min: f64 },

    #[error("power {value} dBW is below the {guard} dBW guard")]
    PowerGuardViolation { value: f64, guard: f64 },

    #[error("power must be strictly positive in watts, got {0}")]
    NonPositivePower(f64),

    #[error("no active base station in this time-step")]
    NoActiveBs,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("replay memory holds {available} transitions, need strictly more than {requested}")]
    InsufficientSamples { available: usize, requested: usize },

    #[error("replay memory is empty")]
    EmptyMemory,

    #[error("network architectures differ: {0:?} vs {1:?}")]
    ArchitectureMismatch(Vec<usize>, Vec<usize>),

    #[error("joint action space of {0} assignments exceeds the exhaustive search limit")]
    SearchSpaceTooLarge(u128),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
