use thiserror::Error;

/// Errors surfaced by the clustering engine.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration.
    #[error("config: {0}")]
    Config(String),
    /// Malformed or unusable input data.
    #[error("data: {0}")]
    Data(String),
    /// Dimension disagreement between components.
    #[error("shape: {0}")]
    Shape(String),
    /// Clustering-evaluation failure.
    #[error("eval: {0}")]
    Eval(String),
    /// Hardware-cost-model failure.
    #[error("hw: {0}")]
    Hw(String),
    /// Malformed model or snapshot file.
    #[error("model file: {0}")]
    ModelFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
