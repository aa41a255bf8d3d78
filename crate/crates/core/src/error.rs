use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: `{field}` = {value} ({reason})")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A result would overflow the floating-point range.
    #[error("range error in {what}: exponent {exponent} exceeds the double-precision range")]
    Range { what: &'static str, exponent: f64 },

    /// The evaluation point violates the validity region of an approximation.
    #[error("precondition violated in {what}: {detail}")]
    Precondition { what: &'static str, detail: String },

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature did not converge in {what}: estimated error {estimate:.3e} (value {value:.6e})")]
    Numerical {
        what: &'static str,
        estimate: f64,
        value: f64,
    },

    /// The requested operation does not apply to this source model.
    #[error("unsupported source model: {0}")]
    Unsupported(&'static str),

    /// Invalid argument (grid sizes, image resolution, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
