use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("label sets differ: {0}")]
    LabelMismatch(String),

    #[error("{name} = {value} is out of range: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not positive semidefinite")]
    NotPsd,

    #[error("invalid joint model: {0}")]
    InvalidModel(String),

    #[error("unknown selection label {0:?}")]
    UnknownSelection(String),

    #[error("conditional law given selection {0:?} is undefined: it has probability zero")]
    UndefinedConditional(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }

    /// True when the error was caused by the caller's input rather than by a
    /// failed computation.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence(_) | Error::UndefinedConditional(_)
        )
    }
}
