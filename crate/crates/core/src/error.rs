use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlvError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state ({x}, {y}) is outside the open positive quadrant")]
    Domain { x: f64, y: f64 },

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// `det C = 0`: the equilibria form a continuum or do not exist.
    #[error("det C = 0 (zip case): {0}")]
    ZipCase(String),

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl GlvError {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        GlvError::Precondition(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GlvError::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, GlvError>;
