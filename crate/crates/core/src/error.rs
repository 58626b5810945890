use thiserror::Error;

use crate::estimation::FitResult;

pub type Result<T> = std::result::Result<T, RemError>;

#[derive(Debug, Error)]
pub enum RemError {
    #[error("row {row}: first column must be strictly increasing ({prev} followed by {found})")]
    Ordering { row: usize, prev: f64, found: f64 },

    #[error("row {row}: event time {time} coincides with the preceding event or the onset of observation")]
    Simultaneity { row: usize, time: f64 },

    #[error("row {row}: actor id {id} outside 1..={n}")]
    IdRange { row: usize, id: f64, n: usize },

    #[error("row {row}: missing value")]
    MissingValue { row: usize },

    #[error("row {row}: sender and receiver are both {id}; self-loops are not in the support")]
    SelfLoop { row: usize, id: usize },

    #[error("covariate `{entry}`: expected {expected}, found {found}")]
    Shape {
        entry: String,
        expected: String,
        found: String,
    },

    #[error("unknown effect `{0}`")]
    UnknownEffect(String),

    #[error("effect `{effect}`: {reason}")]
    Binding { effect: String, reason: String },

    #[error("unsupported: {0}")]
    UnsupportedFeature(String),

    #[error("event {index} ({sender}->{receiver}) is outside the support")]
    Support {
        index: usize,
        sender: usize,
        receiver: usize,
    },

    #[error("invalid parameter vector: {0}")]
    Parameter(String),

    #[error("optimizer did not converge after {} iterations (max |gradient| = {:.3e})", .0.convergence.iterations, .0.convergence.gradient_norm)]
    NotConverged(Box<FitResult>),

    #[error("fits are not comparable: {0}")]
    Comparability(String),

    #[error("numerical range: {0}")]
    NumericalRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl RemError {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            RemError::NotConverged(_) | RemError::NumericalRange(_) | RemError::Parameter(_)
        )
    }
}
