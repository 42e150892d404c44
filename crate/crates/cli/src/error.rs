use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed data file.
    #[error("input error: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Analysis(#[from] uncertest::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for input and configuration problems, 3 for
    /// numeric failures during the analysis.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(uncertest::Error::DegenerateSample(_))
            | CliError::Analysis(uncertest::Error::Domain(_)) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
