use thiserror::Error;

/// Failures raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of the function (poles, zero detuning, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid construction parameters for a domain type.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative solve hit its iteration cap.
    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },

    /// Quadrature finished but the error estimate is above the requested tolerance.
    #[error("accuracy failure in {what}: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Accuracy {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    /// The time integrator lost unitarity or could not take a step.
    #[error("integrator failure: {0}")]
    Integrator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
