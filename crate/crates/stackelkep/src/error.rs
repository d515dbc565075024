use thiserror::Error;

/// Errors produced across the toolkit.
///
/// The CLI maps these onto its exit-code contract: validation and parse
/// failures exit with 2, resource guards with 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{what} exceeds the configured cap ({actual} > {limit}); raise the cap to override")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
