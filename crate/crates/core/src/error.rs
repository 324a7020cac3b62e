use thiserror::Error;

/// Errors raised by curve construction, geometry and the numerical engines.
#[derive(Debug, Error)]
pub enum KnotError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curve is not embedded: segments {i} and {j} are {gap:.3e} apart (threshold {threshold:.3e})")]
    NotEmbedded {
        i: usize,
        j: usize,
        gap: f64,
        threshold: f64,
    },

    #[error("pole: {0}")]
    Pole(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid diagram: {0}")]
    Diagram(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("degenerate curve: {rejected} of {drawn} projection draws were irregular")]
    Degenerate { rejected: usize, drawn: usize },

    #[error("direction pair is not generic: {0}")]
    NonGeneric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KnotError>;
