use thiserror::Error;

/// Errors raised across the library. The CLI maps each variant to an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KzError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("singularity: {0}")]
    Singular(String),

    #[error("resonance at alpha = {alpha:?}: <alpha, mu> = 0 while Delta_+ is nonzero")]
    Resonance { alpha: Vec<u32> },

    #[error("convergence error: {0}")]
    Convergence(String),

    #[error("accuracy error: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy { achieved: f64, requested: f64 },

    #[error("conditioning error: {0}")]
    Conditioning(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, KzError>;

impl KzError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        KzError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
