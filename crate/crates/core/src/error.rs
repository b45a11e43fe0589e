use alloc::string::String;

/// Errors raised by the calibration toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A series or quadrature could not reach the requested tolerance.
    #[error(
        "numerical accuracy failure in {context}: error bound {bound:e} exceeds tolerance {tol:e}"
    )]
    Accuracy {
        context: &'static str,
        bound: f64,
        tol: f64,
    },

    #[error("quantile search failed to bracket probability {0}")]
    NonBracketing(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
