//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MagError {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at the pole f = -1 of the double integral.
    #[error("pole: the integral has a pole at f = -1")]
    Pole,

    /// Series reciprocal or logarithm of a series with vanishing constant term.
    #[error("singular series: {0}")]
    SingularSeries(String),

    /// An operation was asked to run at a truncation order it cannot support.
    #[error("insufficient series order: need at least {need}, have {have}")]
    InsufficientOrder { need: usize, have: usize },

    /// The quadrature oracle is capped at a modest precision.
    #[error("unsupported precision: {0}")]
    UnsupportedPrecision(String),

    /// Pointwise evaluation too close to a pole of the modular form.
    #[error("pole proximity: |denominator| = {0}")]
    PoleProximity(String),

    /// A truncated sum cannot reach the requested tolerance.
    #[error("truncation: {0}")]
    Truncation(String),

    /// Rational reconstruction from a high-precision value failed.
    #[error("rational reconstruction failed: {0}")]
    Reconstruction(String),

    /// A conjectural property failed a mechanical check.  Reported, never
    /// silently swallowed.
    #[error("conjecture violation: {0}")]
    ConjectureViolation(String),

    /// The singularity-location algorithm could not build a matrix.
    #[error("construction error: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MagError>;
