use thiserror::Error;

/// Errors raised by the evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Gamma function pole at {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("inconsistent coefficients: pole strip lower bound {lower} is not below upper bound {upper}")]
    InconsistentCoefficients { lower: f64, upper: f64 },

    #[error(
        "contour integral did not converge after {refinements} refinements \
         (value {value:e}, estimated error {est_abs_error:e})"
    )]
    NoConvergence {
        value: f64,
        est_abs_error: f64,
        refinements: u32,
    },

    #[error("contour integral is not real: {re:e}{im:+e}i")]
    NonReal { re: f64, im: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not converge within {terms} terms (last term {last_term:e})")]
    OracleDiverged { terms: usize, last_term: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
