use thiserror::Error;

/// Errors raised by the placement learning engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("euler encoding is singular at pitch {pitch:.9} rad")]
    GimbalLock { pitch: f64 },

    #[error("quaternion block norm {norm:e} is too small to normalize")]
    DegenerateQuaternion { norm: f64 },

    #[error("degenerate feature cloud: {0}")]
    DegenerateCloud(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no candidate encoding produced a usable distribution")]
    NoViableEncoding,

    #[error("object `{0}` is missing")]
    MissingObject(String),

    #[error("need at least {needed} scenes, got {found}")]
    InsufficientScenes { needed: usize, found: usize },

    #[error("no placement model for object `{0}`")]
    MissingModel(String),

    #[error("invalid template: {0}")]
    InvalidTemplate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersionMismatch { expected: u32, found: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
