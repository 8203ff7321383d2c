use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order must be at least 1")]
    ZeroOrder,

    #[error("order {order} is outside the supported range 1..={max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invariant {name} is defined for order {expected}, not {order}")]
    InvariantOrder {
        name: String,
        expected: usize,
        order: usize,
    },

    #[error("unknown invariant `{0}`")]
    UnknownInvariant(String),

    #[error("infeasible before search: {0}")]
    Infeasible(String),

    #[error("catalog: {0}")]
    Catalog(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
