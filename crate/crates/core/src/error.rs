use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Adaptive quadrature hit `max_depth` before meeting the tolerance.
    #[error(
        "quadrature did not converge: best estimate {estimate:e}, error bound {error_bound:e}"
    )]
    Integration { estimate: f64, error_bound: f64 },

    #[error("integration failed for index {index}: {source}")]
    IntegrationAt {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{what}: identity residual {residual:e} exceeds tolerance {tolerance:e}")]
    IdentityViolation {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("total variation estimate diverges under grid refinement (last estimate {last:e})")]
    UnboundedVariation { last: f64 },

    #[error("sign change of the primitive not resolved at sampling resolution on [{lo}, {hi}]")]
    RefinementRequired { lo: f64, hi: f64 },

    #[error("index budget {budget} exhausted after selecting {} of the requested indices", partial.len())]
    BudgetExceeded { budget: usize, partial: Vec<usize> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
