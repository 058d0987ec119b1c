use thiserror::Error;

/// Run failures, each mapped to a process exit code. I/O problems count as
/// invalid input: the run never started.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration at `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("numerical failure (seed {seed}{}): {message}", path.map(|p| format!(", path {p}")).unwrap_or_default())]
    Numerical { message: String, seed: u64, path: Option<u64> },
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn validation(key: impl Into<String>, message: impl ToString) -> Self {
        RunError::Validation { key: key.into(), message: message.to_string() }
    }

    pub fn numerical(message: impl ToString, seed: u64, path: Option<u64>) -> Self {
        RunError::Numerical { message: message.to_string(), seed, path }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation { .. } | RunError::Io(_) => 2,
            RunError::Numerical { .. } => 3,
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.to_string())
    }
}
