use std::io;
use std::path::PathBuf;

/// Everything a command can fail with, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] thermolap_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 usage, 3 data format or unreadable file, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        use thermolap_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Format(_) | CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                E::Instability(_) | E::Degenerate(_) => 4,
                E::InvalidFrame(_) | E::DimensionMismatch(_) => 3,
                E::InvalidKernel(_) | E::Domain(_) | E::Config(_) | E::CannotReduce { .. } | E::Geometry(_) => 2,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
