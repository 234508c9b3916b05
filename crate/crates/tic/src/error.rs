use std::io;
use std::path::PathBuf;

pub type Result<T, E = TicError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum TicError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}:{line}: {message}")]
    Config { path: PathBuf, line: usize, message: String },

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error("{path}:{line}:{column}: {message}")]
    Syntax { path: PathBuf, line: usize, column: usize, message: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Core(#[from] tic_core::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl TicError {
    pub fn usage(msg: impl Into<String>) -> Self {
        TicError::Usage(msg.into())
    }

    pub fn data(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        TicError::Data { path: path.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        TicError::Io { path: path.into(), source }
    }

    /// 1 for usage and configuration problems, 2 for unreadable or invalid
    /// data, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        use tic_core::Error as E;
        match self {
            TicError::Usage(_) | TicError::Config { .. } => 1,
            TicError::Data { .. } | TicError::Syntax { .. } | TicError::Io { .. } => 2,
            TicError::Core(e) => match e {
                E::InvalidArgument(_) | E::DuplicateTemplate(_) => 1,
                E::Schema(_) | E::Example { .. } | E::NoLabeledExamples | E::EmptyCluster => 2,
                _ => 3,
            },
            TicError::Internal(_) => 3,
        }
    }
}
