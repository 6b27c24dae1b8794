use alloc::string::String;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot reduce a {width}x{height} frame")]
    CannotReduce { width: usize, height: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("numerical instability: {0}")]
    Instability(String),
}

impl Error {
    /// True for errors raised by numerical checks (stability, divergence)
    /// rather than malformed inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Instability(_))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
