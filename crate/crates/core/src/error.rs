use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric or structural guard on the inputs was violated.
    #[error("configuration guard `{guard}` violated: {detail}")]
    Config { guard: &'static str, detail: String },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("signature mismatch: Cl({0},{1}) vs Cl({2},{3})")]
    Signature(usize, usize, usize, usize),

    #[error("no snapshot triple available at t = {0}")]
    MissingSnapshot(f64),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("unknown {kind} `{name}`; valid names: {valid}")]
    Unknown {
        kind: &'static str,
        name: String,
        valid: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(guard: &'static str, detail: impl Into<String>) -> Self {
        Error::Config {
            guard,
            detail: detail.into(),
        }
    }
}
