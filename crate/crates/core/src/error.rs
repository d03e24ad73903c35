use thiserror::Error;

#[derive(Debug, Error)]
pub enum SbmError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("optimizer failure: {message} (iterate: {iterate:?})")]
    Optimizer { message: String, iterate: Vec<f64> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SbmError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(SbmError::Domain(msg.into()))
}
