use thiserror::Error;

/// Errors raised by the numerical core.
///
/// The CLI maps `Domain` and `Config` to exit code 2 and `Accuracy` and
/// `Numerical` to exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grid or tolerance settings are invalid or too small for the request.
    #[error("configuration error: {0}")]
    Config(String),

    /// The discretization cannot resolve the requested quantity.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// A solve failed or its residual exceeded tolerance.
    #[error("numerical error: {message} (residual {residual:.3e})")]
    Numerical { message: String, residual: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn accuracy(msg: impl Into<String>) -> Self {
        Error::Accuracy(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
