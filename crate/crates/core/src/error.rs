use thiserror::Error;

#[derive(Debug, Error)]
pub enum RkoError {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("key {value} at index {index} is outside [0, 1)")]
    KeyOutOfRange { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("refused: {what} needs ~{estimate} evaluations, limit is {limit}")]
    GuardExceeded {
        what: String,
        estimate: f64,
        limit: f64,
    },

    #[error("decoder returned non-finite cost {cost} at call {call}")]
    DecoderFailure { call: u64, cost: f64 },

    #[error("missing reference values for: {0:?}")]
    MissingReference(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl RkoError {
    pub fn config(msg: impl Into<String>) -> Self {
        RkoError::InvalidConfig(msg.into())
    }

    pub(crate) fn instance(msg: impl Into<String>) -> Self {
        RkoError::InvalidInstance(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        RkoError::Schema {
            path: path.into(),
            message: msg.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            RkoError::GuardExceeded { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = RkoError> = std::result::Result<T, E>;
