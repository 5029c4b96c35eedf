use thiserror::Error;

/// Errors raised across the library.
///
/// Variants are grouped by the kind of contract that was broken rather than by
/// module, so callers (the CLI in particular) can map them onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value lies outside the range an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrices or sequences have mismatched or ragged dimensions.
    #[error("shape error: {0}")]
    Shape(String),

    /// The input violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A builder was asked for a configuration it does not support.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Set endpoints do not line up with the model grid.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// The model space is too small for the requested construction.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A finite-horizon procedure ran out of candidates.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Liminal seminorms need at least two blocks.
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    /// The operator is not of a class the construction handles.
    #[error("unsupported operator: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
