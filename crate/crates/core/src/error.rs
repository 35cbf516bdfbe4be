use thiserror::Error;

/// Errors raised by the library. Each variant maps onto a distinct CLI exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A tangent with zero direction vector.
    #[error("degenerate tangent: direction vector is zero")]
    DegenerateTangent,

    /// A disc tangent with zero derivative where a direction is required.
    #[error("degenerate direction: derivative vanishes")]
    DegenerateDirection,

    /// A denominator or matrix that should be invertible is not.
    #[error("singular {what} (magnitude {magnitude:e})")]
    Singular { what: &'static str, magnitude: f64 },

    /// Invalid parameters for a constructor (wrong automorphism kind, t outside [0,1], ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A family precondition failed (e.g. the tangent is not of the required type).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Numerical evidence contradicts a structural fact (e.g. more than two
    /// extremal angles without the royal/flat pre-test firing).
    #[error("inconsistent classification: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
