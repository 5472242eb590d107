use std::io;
use std::path::PathBuf;

/// Failures of the file formats and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] optdict_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}: schema mismatch: {message}", path.display())]
    Schema { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl AppError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        AppError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn schema(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        AppError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 2 for invalid input, 3 for infeasible problems, 4 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(optdict_core::Error::TooFewVectors { .. })
            | AppError::Core(optdict_core::Error::InfeasibleProfile) => 3,
            AppError::Io { .. } => 4,
            _ => 2,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
