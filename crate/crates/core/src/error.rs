use thiserror::Error;

/// Errors raised by the component models and the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// One or more configuration invariants are violated. Every issue found is listed.
    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    /// The integrator produced a non-finite state.
    #[error("numerical abort at step {step} (t = {time} s): non-finite state in {component}")]
    NumericalAbort {
        step: usize,
        time: f64,
        component: String,
    },

    #[error("singular {0}")]
    Singular(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Issues carried by a validation error; empty for every other variant.
    pub fn issues(&self) -> &[String] {
        match self {
            Error::Validation(v) => v,
            _ => &[],
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
