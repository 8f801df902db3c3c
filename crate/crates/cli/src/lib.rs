//! Experiment machinery behind the `rboss` binary: synthetic dataset
//! generation, the classifier variant registry, and the resampled
//! experiment runner with CSV reporting.

pub mod runner;
pub mod synthetic;
pub mod variants;

pub use runner::{run_experiment, DatasetSource, ExperimentConfig, ResultRecord};
pub use synthetic::{generate_synthetic, SyntheticSpec};
pub use variants::{resolve_variant, ClassifierConfig, Variant, VariantOverrides};

/// Errors surfaced by the experiment runner and CLI.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("synthetic spec error: {0}")]
    Spec(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rboss::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
