use thiserror::Error;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Oracle,
    Expansion,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unsupported order {order} for {what} (maximum {max})")]
    UnsupportedOrder {
        what: &'static str,
        order: usize,
        max: usize,
    },

    #[error("insufficient order: need at least {need}, got {got}")]
    InsufficientOrder { need: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("quadrature did not converge (achieved relative error {achieved:.3e}, requested {requested:.3e})")]
    OracleFailure { achieved: f64, requested: f64 },

    #[error("likelihood maximum lies on the support boundary near {at}")]
    BoundaryMaximum { at: f64 },

    #[error("likelihood is not unimodal: {maxima} local maxima found")]
    NonUnimodal { maxima: usize },

    #[error("non-negative loglikelihood curvature {value} at {at}")]
    Curvature { value: f64, at: f64 },

    #[error("derivative of order {order} unavailable at {point}")]
    Derivative { order: usize, point: f64 },

    #[error("centering iteration did not converge; iterates {trace:?}")]
    Centering { trace: Vec<f64> },

    #[error("Laplace moment expansion broke down: {0}")]
    Expansion(String),

    #[error("series kind mismatch: expected {expected}, got {got}")]
    KindMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("recentering variance factor {factor} is not positive")]
    DegenerateRecentering { factor: f64 },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::UnsupportedOrder { .. }
            | Error::InsufficientOrder { .. }
            | Error::Domain(_)
            | Error::Validation(_)
            | Error::KindMismatch { .. } => ErrorCategory::Validation,
            Error::OracleFailure { .. }
            | Error::BoundaryMaximum { .. }
            | Error::NonUnimodal { .. }
            | Error::Curvature { .. } => ErrorCategory::Oracle,
            Error::Derivative { .. }
            | Error::Centering { .. }
            | Error::Expansion(_)
            | Error::DegenerateRecentering { .. } => ErrorCategory::Expansion,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
