//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by dataset handling, transforms, classifiers and
/// checkpointing.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed dataset text. `row` is the 1-based physical line number
    /// (0 when the whole input is unusable).
    #[error("format error at row {row}: {reason}")]
    Format { row: usize, reason: String },

    /// A stratified train/test split could not be produced.
    #[error("stratification error: {0}")]
    Stratification(String),

    /// A subsample policy precondition was violated.
    #[error("subsample policy error: {0}")]
    Policy(String),

    /// Invalid transform or classifier parameters.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A train-accuracy estimate could not be computed.
    #[error("estimate error: {0}")]
    Estimate(String),

    /// An ensemble build failed.
    #[error("build error: {0}")]
    Build(String),

    /// An ensemble configuration violates its invariants.
    #[error("config error: {0}")]
    Config(String),

    /// A checkpoint could not be written, read or validated.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    /// No checkpoint file at the given path.
    #[error("checkpoint not found: {0}")]
    NotFound(PathBuf),

    /// The checkpoint was written by an unsupported format version.
    #[error("unsupported checkpoint format version {found} (supported: {supported})")]
    Version { found: u32, supported: u32 },

    /// The checkpoint was taken against a different dataset.
    #[error("checkpoint dataset fingerprint does not match the provided dataset")]
    DatasetMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
