use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge: achieved error estimate {estimate:e} (tolerance {tolerance:e})")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },

    #[error("integral is not absolutely integrable: value grew by {growth:.3} per domain doubling")]
    NonIntegrable { growth: f64 },

    #[error("trajectory covers [{start}, {end}] but time {requested} was requested")]
    InsufficientCoverage { start: f64, end: f64, requested: f64 },

    #[error("Picard iteration failed to contract after {iterations} iterations (ratios {ratios:?})")]
    NonContraction { iterations: usize, ratios: Vec<f64> },

    #[error("Picard iteration did not reach tolerance {tolerance:e} in {iterations} iterations (last difference {last:e})")]
    IterationLimit { iterations: usize, tolerance: f64, last: f64 },

    #[error("non-finite values at t = {t}")]
    NonFinite { t: f64 },

    #[error("resolution loss: {0}")]
    ResolutionLoss(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed snapshot: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
