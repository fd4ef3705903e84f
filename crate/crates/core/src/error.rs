use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid value for `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("time {0} is not a point of the path grid")]
    NotOnGrid(f64),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("price at row {row} must be positive and finite, got {value}")]
    NonPositivePrice { row: usize, value: f64 },

    #[error("dates must be strictly increasing: {previous} is followed by {next}")]
    UnorderedDates {
        previous: chrono::NaiveDate,
        next: chrono::NaiveDate,
    },

    #[error("malformed input {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
