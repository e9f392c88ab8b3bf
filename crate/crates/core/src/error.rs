use thiserror::Error;

/// Errors produced by every module of the crate.
///
/// The CLI maps each variant onto a process exit code, see [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("all input vectors are numerically zero")]
    AllZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("direct sum violated: {0}")]
    DirectSumViolation(String),

    #[error("not a frame: {0}")]
    NotAFrame(String),

    #[error("not an oblique dual: residual {residual:e} exceeds tolerance {tol:e}")]
    NotADual { residual: f64, tol: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("support point {index} lies outside the subspace (distance {distance:e})")]
    SupportOutsideSubspace { index: usize, distance: f64 },

    #[error("map value at support point {index} leaves the target subspace (distance {distance:e})")]
    RangeViolation { index: usize, distance: f64 },

    #[error("marginal mismatch: {0}")]
    MarginalMismatch(String),

    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status for the CLI: 2 validation, 3 hypothesis, 4 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 4,
            Error::DirectSumViolation(_)
            | Error::NotAFrame(_)
            | Error::NotADual { .. }
            | Error::HypothesisViolated(_) => 3,
            Error::AllZero
            | Error::DimensionMismatch(_)
            | Error::InvalidSubspace(_)
            | Error::InvalidMeasure(_)
            | Error::SupportOutsideSubspace { .. }
            | Error::RangeViolation { .. }
            | Error::MarginalMismatch(_)
            | Error::Parse(_)
            | Error::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
