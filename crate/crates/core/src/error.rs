use thiserror::Error;

/// Errors raised by the geometric and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite input `{name}`")]
    NonFinite { name: &'static str },

    #[error("point lies outside the closed domain")]
    OutsideDomain,

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The nearest-point analysis does not cover points on the t-axis for
    /// the gauge metric; only the distance is available there.
    #[error("minimizer undetermined on the t-axis (distance {distance})")]
    AxisMinimizerUndetermined { distance: f64 },

    #[error("point lies on the singular set of the field")]
    SingularSet,

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
