use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) | CliError::Write { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }

    /// Error for a bad flag value, naming the flag.
    pub fn flag(flag: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("invalid --{flag}: {reason}"))
    }
}

impl From<itolab::Error> for CliError {
    fn from(e: itolab::Error) -> Self {
        match e {
            itolab::Error::Numerical(msg) => CliError::Numerical(msg),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
