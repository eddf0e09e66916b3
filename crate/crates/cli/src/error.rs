use std::io;
use std::path::Path;

use thiserror::Error;
use windbid::ingest::IngestError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("file not found: {0}")]
    MissingFile(String),
    #[error("{0}")]
    Data(String),
    #[error("missing day: {0}")]
    MissingDay(String),
    #[error("insufficient history: {0}")]
    InsufficientHistory(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::MissingFile(_) => 2,
            CliError::Data(_) => 3,
            CliError::MissingDay(_) => 4,
            CliError::InsufficientHistory(_) => 5,
        }
    }

    /// Ingest failure attributed to `path`.
    pub fn ingest(path: &Path, err: IngestError) -> Self {
        match err {
            IngestError::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => {
                CliError::MissingFile(path.display().to_string())
            }
            IngestError::Io { source, .. } => {
                CliError::Data(format!("{}: {source}", path.display()))
            }
            other => CliError::Data(format!("{}: {other}", path.display())),
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        if err.kind() == io::ErrorKind::NotFound {
            CliError::MissingFile(path.display().to_string())
        } else {
            CliError::Data(format!("{}: {err}", path.display()))
        }
    }

    pub fn data(err: impl std::fmt::Display) -> Self {
        CliError::Data(err.to_string())
    }

    pub fn usage(err: impl std::fmt::Display) -> Self {
        CliError::Usage(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
