//! Error type shared by the experiment harness.

use thiserror::Error;

/// Anything the harness can fail with, from config parsing to the
/// underlying numerics.
#[derive(Debug, Error)]
pub enum Error {
    /// Failure inside an algorithm pipeline.
    #[error(transparent)]
    Core(#[from] loctrig_core::Error),

    /// Filesystem trouble while reading configs or writing outputs.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON config, or a report that failed to serialize.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed dataset CSV.
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// An experiment configuration that parsed but makes no sense.
    #[error("config: {0}")]
    Config(String),
}

/// Convenience alias used throughout the harness.
pub type Result<T> = std::result::Result<T, Error>;
