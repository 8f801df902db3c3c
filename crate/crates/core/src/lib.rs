//! Dictionary-based time series classification.
//!
//! The BOSS base classifier turns each series into a histogram of SFA
//! words (sliding window, truncated Fourier transform, per-coefficient
//! equal-frequency discretization, numerosity reduction) and classifies
//! new series by 1-nearest-neighbour under an asymmetric histogram
//! distance. On top of that this crate provides:
//!
//! - the classic grid-search BOSS ensemble keeping every parameter
//!   combination within 92% of the best leave-one-out accuracy;
//! - the randomized RBOSS family: a fixed number of uniformly drawn
//!   parameter sets instead of a grid search, with optional per-member
//!   train subsampling, CAWPE accuracy weighting, and a fixed-capacity
//!   pool that keeps only the most accurate members;
//! - time-contracted building (a wall-clock budget replaces the ensemble
//!   size) with a hard member cap;
//! - periodic checkpointing of in-progress builds and exact, seeded
//!   resumption.

pub mod base;
pub mod checkpoint;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod sfa;

pub use base::{
    boss_distance, build_base_boss, fast_loocv_estimate, loocv_estimate, predict_1nn,
    BaseBossModel, TrainEstimate,
};
pub use checkpoint::{
    load_checkpoint, resume_build, resume_build_with, save_checkpoint, BuildCheckpoint,
    DatasetFingerprint, FORMAT_VERSION,
};
pub use data::{
    parse_dataset, serialize_dataset, stratified_resample, subsample, z_normalize,
    LabeledDataset, ResampleSplit, SubsamplePolicy,
};
pub use ensemble::{
    build_grid_boss, build_rboss, build_rboss_contracted, cawpe_weight,
    enumerate_parameter_space, predict_ensemble, window_candidates, AccuracyFilteredPool,
    BuildConfigEcho, BuildMetadata, CheckpointInterval, CheckpointSettings, Combiner,
    EnsembleMember, EnsembleModel, EstimateMode, MaxWindowFactor, ParameterSpace, PoolAction,
    RbossBuilder, RbossConfig, DEFAULT_CAWPE_EXPONENT, DEFAULT_CONTRACT_MEMBER_CAP,
    DEFAULT_RETENTION,
};
pub use error::{Error, Result};
pub use sfa::{
    bag_of_words, dft_truncated, fit_mcb, sfa_word, sliding_windows, Breakpoints, SfaParameters,
    Word, WordHistogram,
};
