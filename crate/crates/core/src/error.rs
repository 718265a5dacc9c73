use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("non-finite gradient at iteration {iteration}")]
    NonFiniteGradient { iteration: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("enumeration over {n} variables refused (cap is {cap})")]
    OracleCap { n: usize, cap: usize },

    #[error("selection is not a vertex cover ({uncovered} uncovered edges)")]
    NotACover { uncovered: usize },

    #[error("least squares failed: {0}")]
    LeastSquares(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
