use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Separation and conditioning need at least two pieces. A single piece
    /// always wins, so its probability is 1.
    #[error("geometry undefined for k = 1 (pi_min = 1, b_max = {b_max})")]
    GeometryUndefined { b_max: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unsupported size: k = {k} exceeds the limit of {max}")]
    UnsupportedSize { k: usize, max: usize },

    #[error("insufficient samples: retained {retained}, need at least {required}")]
    InsufficientSamples { retained: usize, required: usize },

    #[error("sample budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
