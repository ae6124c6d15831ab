use thiserror::Error;

/// Unified error type. The CLI maps `Config` and `Json` to exit code 3;
/// everything else surfaces as an ordinary failure.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside an operation's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration is structurally invalid or numerically degenerate
    /// (step degeneracy, grid mismatch, empty suite, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A pointwise evaluation produced a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn evaluation(msg: impl Into<String>) -> Self {
        Error::Evaluation(msg.into())
    }
}
