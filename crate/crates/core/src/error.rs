use thiserror::Error;

/// Errors raised by the estimators, the models and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("undefined measure: {0}")]
    UndefinedMeasure(String),

    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    Quadrature { estimate: f64, error_bound: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual_norm:e})")]
    NonConvergence { iterations: usize, residual_norm: f64 },

    #[error("duplicate support point at index {index}; bin the samples before fitting")]
    DuplicatePoints { index: usize },

    #[error("{fit} fit failed: {source}")]
    Fit {
        fit: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::UndefinedMeasure(_)
            | Error::Quadrature { .. }
            | Error::NonConvergence { .. }
            | Error::DuplicatePoints { .. } => true,
            Error::Fit { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
