use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("derivative order {requested} exceeds the configured cap {cap}")]
    OrderCap { requested: usize, cap: usize },

    #[error("unknown symbol family `{0}`")]
    UnknownFamily(String),

    #[error("family `{family}` requires parameter `{param}`")]
    MissingParam { family: String, param: String },

    #[error("parse error at token `{token}` (offset {offset}): {message}")]
    Parse {
        token: String,
        offset: usize,
        message: String,
    },

    #[error("tensor with {entries} entries exceeds the materialization limit of {limit}")]
    TensorTooLarge { entries: usize, limit: usize },

    #[error(
        "symbol is not frequency-localized: boundary magnitude {boundary:.3e} vs peak {peak:.3e}"
    )]
    NotLocalized { boundary: f64, peak: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("insufficient range: {usable} usable shells, at least {required} required")]
    InsufficientRange { usable: usize, required: usize },

    #[error("invalid exponents: {0}")]
    Exponents(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symbol spec: {0}")]
    SymbolSpec(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
