use std::path::PathBuf;

use crate::chart::ChartError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Reading, parsing or writing a file.
    #[error("{}: {message}", path.display())]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Compute(#[from] mortality::Error),
    #[error("chart: {0}")]
    Chart(String),
}

impl CliError {
    pub fn file(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::File { path: path.into(), message: message.to_string() }
    }

    /// 1 for failures inside a computation, 2 for usage and I/O problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) | CliError::Chart(_) => 1,
            CliError::Usage(_) | CliError::File { .. } => 2,
        }
    }
}

impl From<ChartError> for CliError {
    fn from(e: ChartError) -> Self {
        match e {
            ChartError::Io { path, source } => CliError::file(path, source),
            other => CliError::Chart(other.to_string()),
        }
    }
}
