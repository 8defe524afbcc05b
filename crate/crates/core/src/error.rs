use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode {mode} out of range for a registry of {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("mode-count mismatch: {left} vs {right}")]
    ModeCountMismatch { left: usize, right: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("fringe visibility is undefined for an all-zero pattern")]
    UndefinedVisibility,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for every variant caused by bad caller input.
    pub fn is_invalid_argument(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::ModeOutOfRange { .. } | Error::ModeCountMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
