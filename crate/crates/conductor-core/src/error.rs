//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A valuation or residue could not be determined from the known terms.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    /// A residue computation needs a root or splitting that F_q lacks.
    #[error("residue field too small: {0} (enlarge q)")]
    ResidueFieldTooSmall(String),

    /// Zeros sit on a boundary circle in a way the achiever data cannot resolve.
    #[error("boundary-zero ambiguity: {0}")]
    BoundaryZeroAmbiguity(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The component structure of a cover cannot be certified.
    #[error("unsupported decomposition: {0}")]
    UnsupportedDecomposition(String),

    /// A conductor operation was requested at a critical radius.
    #[error("critical radius: {0}")]
    CriticalRadius(String),

    /// An internal consistency identity failed; this is a bug or a model
    /// violation and must surface loudly.
    #[error("model error: {0}")]
    ModelError(String),

    /// Bad scenario input.
    #[error("scenario error: {0}")]
    Scenario(String),
}

pub type CoreResult<T> = Result<T, CoreError>;
