//! Named classifier presets and their resolution against command-line
//! overrides.

use std::time::Duration;

use rboss::ensemble::{EstimateMode, RbossConfig};
use rboss::SubsamplePolicy;
use rboss::DEFAULT_RETENTION;

use crate::{CliError, Result};

/// Default ensemble size for unfiltered randomized variants.
pub const DEFAULT_K: usize = 100;
/// Default number of parameter sets tried by filtered variants.
pub const DEFAULT_K_FILTERED: usize = 250;
/// Default capacity of the filtered member pool.
pub const DEFAULT_MAX_ENSEMBLE: usize = 50;
/// Default per-member train subsample fraction.
pub const DEFAULT_SUBSAMPLE_FRACTION: f64 = 0.7;
/// Default per-class cap for the fast leave-one-out estimate.
pub const DEFAULT_FAST_ESTIMATE_PER_CLASS: usize = 50;
/// Default stratified train-size cap.
pub const DEFAULT_MAX_TRAIN: usize = 500;

/// The documented classifier registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Full grid search, members within 92% of the best kept.
    GridBoss,
    /// Fixed-size randomized ensemble, no estimates, half-length windows.
    Rboss,
    /// `Rboss` with a 70% per-member train subsample.
    RbossSubsample,
    /// Fixed-size randomized ensemble with CAWPE-weighted voting.
    RbossCawpe,
    /// 250 parameter sets filtered into the 50 most accurate members.
    RbossFiltered,
    /// Filtered ensemble with CAWPE weights and 70% subsampling.
    RbossFilteredCawpe,
    /// Filtered ensemble using the per-class-capped fast estimate.
    RbossFastEstimate,
    /// Filtered ensemble built on a stratified train cap of 500.
    RbossMaxTrain,
    /// Time-contracted randomized ensemble (requires a budget).
    RbossContract,
}

impl Variant {
    pub const ALL: [Variant; 9] = [
        Variant::GridBoss,
        Variant::Rboss,
        Variant::RbossSubsample,
        Variant::RbossCawpe,
        Variant::RbossFiltered,
        Variant::RbossFilteredCawpe,
        Variant::RbossFastEstimate,
        Variant::RbossMaxTrain,
        Variant::RbossContract,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::GridBoss => "grid-boss",
            Variant::Rboss => "rboss",
            Variant::RbossSubsample => "rboss-subsample",
            Variant::RbossCawpe => "rboss-cawpe",
            Variant::RbossFiltered => "rboss-filtered",
            Variant::RbossFilteredCawpe => "rboss-filtered-cawpe",
            Variant::RbossFastEstimate => "rboss-fast-estimate",
            Variant::RbossMaxTrain => "rboss-max-train",
            Variant::RbossContract => "rboss-contract",
        }
    }

    pub fn parse(name: &str) -> Result<Variant> {
        Variant::ALL
            .iter()
            .copied()
            .find(|v| v.name() == name)
            .ok_or_else(|| {
                let known: Vec<&str> = Variant::ALL.iter().map(Variant::name).collect();
                CliError::Usage(format!(
                    "unknown variant {name:?}; known variants: {}",
                    known.join(", ")
                ))
            })
    }
}

/// Command-line adjustments applied on top of a preset.
#[derive(Debug, Clone, Default)]
pub struct VariantOverrides {
    pub k: Option<usize>,
    pub max_ensemble: Option<usize>,
    pub contract_minutes: Option<f64>,
    pub member_cap: Option<usize>,
    pub subsample_fraction: Option<f64>,
    pub max_train: Option<usize>,
    pub fast_estimate_per_class: Option<usize>,
    pub cawpe_exponent: Option<f64>,
}

/// A fully resolved classifier configuration.
#[derive(Debug, Clone)]
pub enum ClassifierConfig {
    Grid { retention: f64 },
    Randomized(RbossConfig),
}

/// Resolves a variant name plus overrides into a buildable configuration.
/// The seed is filled in per resample by the runner.
pub fn resolve_variant(
    variant: Variant,
    overrides: &VariantOverrides,
    seed: u64,
) -> Result<ClassifierConfig> {
    if variant == Variant::GridBoss {
        return Ok(ClassifierConfig::Grid {
            retention: DEFAULT_RETENTION,
        });
    }

    let mut cfg = RbossConfig::fixed_size(DEFAULT_K, seed);
    match variant {
        Variant::Rboss => {}
        Variant::RbossSubsample => {
            cfg.subsample_policy = Some(SubsamplePolicy::Fraction(DEFAULT_SUBSAMPLE_FRACTION));
        }
        Variant::RbossCawpe => {
            cfg.estimate_mode = EstimateMode::FullLoocv;
            cfg.use_cawpe = true;
        }
        Variant::RbossFiltered => {
            cfg.ensemble_size = Some(DEFAULT_K_FILTERED);
            cfg.max_ensemble_size = Some(DEFAULT_MAX_ENSEMBLE);
            cfg.estimate_mode = EstimateMode::FullLoocv;
        }
        Variant::RbossFilteredCawpe => {
            cfg.ensemble_size = Some(DEFAULT_K_FILTERED);
            cfg.max_ensemble_size = Some(DEFAULT_MAX_ENSEMBLE);
            cfg.estimate_mode = EstimateMode::FullLoocv;
            cfg.use_cawpe = true;
            cfg.subsample_policy = Some(SubsamplePolicy::Fraction(DEFAULT_SUBSAMPLE_FRACTION));
        }
        Variant::RbossFastEstimate => {
            cfg.ensemble_size = Some(DEFAULT_K_FILTERED);
            cfg.max_ensemble_size = Some(DEFAULT_MAX_ENSEMBLE);
            cfg.estimate_mode = EstimateMode::FastLoocv {
                per_class_cap: DEFAULT_FAST_ESTIMATE_PER_CLASS,
            };
        }
        Variant::RbossMaxTrain => {
            cfg.ensemble_size = Some(DEFAULT_K_FILTERED);
            cfg.max_ensemble_size = Some(DEFAULT_MAX_ENSEMBLE);
            cfg.estimate_mode = EstimateMode::FullLoocv;
            cfg.subsample_policy = Some(SubsamplePolicy::MaxTotal(DEFAULT_MAX_TRAIN));
        }
        Variant::RbossContract => {
            cfg.ensemble_size = None;
            let minutes = overrides.contract_minutes.ok_or_else(|| {
                CliError::Usage("rboss-contract requires --contract-minutes".into())
            })?;
            cfg.time_budget = Some(minutes_to_budget(minutes)?);
        }
        Variant::GridBoss => unreachable!(),
    }

    // Overrides.
    if let Some(minutes) = overrides.contract_minutes {
        if overrides.k.is_some() {
            return Err(CliError::Usage(
                "--k conflicts with --contract-minutes; pick one termination rule".into(),
            ));
        }
        cfg.ensemble_size = None;
        cfg.time_budget = Some(minutes_to_budget(minutes)?);
    }
    if let Some(k) = overrides.k {
        cfg.ensemble_size = Some(k);
    }
    if let Some(s) = overrides.max_ensemble {
        cfg.max_ensemble_size = Some(s);
        if cfg.estimate_mode == EstimateMode::None {
            cfg.estimate_mode = EstimateMode::FullLoocv;
        }
    }
    if let Some(cap) = overrides.member_cap {
        cfg.contract_member_cap = cap;
    }
    if overrides.subsample_fraction.is_some() && overrides.max_train.is_some() {
        return Err(CliError::Usage(
            "--subsample-fraction conflicts with --max-train; pick one subsample policy".into(),
        ));
    }
    if let Some(f) = overrides.subsample_fraction {
        cfg.subsample_policy = Some(SubsamplePolicy::Fraction(f));
    }
    if let Some(cap) = overrides.max_train {
        cfg.subsample_policy = Some(SubsamplePolicy::MaxTotal(cap));
    }
    if let Some(cap) = overrides.fast_estimate_per_class {
        cfg.estimate_mode = EstimateMode::FastLoocv { per_class_cap: cap };
    }
    if let Some(exp) = overrides.cawpe_exponent {
        cfg.cawpe_exponent = exp;
    }

    cfg.validate()?;
    Ok(ClassifierConfig::Randomized(cfg))
}

fn minutes_to_budget(minutes: f64) -> Result<Duration> {
    if !(minutes > 0.0) || !minutes.is_finite() {
        return Err(CliError::Usage(format!(
            "contract minutes must be positive, got {minutes}"
        )));
    }
    Ok(Duration::from_secs_f64(minutes * 60.0))
}
