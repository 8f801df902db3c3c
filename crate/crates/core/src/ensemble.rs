//! BOSS ensembles: the classic grid-search ensemble with 92% retention,
//! and the randomized RBOSS family — random parameter draws without
//! replacement, optional per-member subsampling, CAWPE weighting,
//! fixed-capacity accuracy-filtered pools, and time-contracted building.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::base::{
    build_base_boss, fast_loocv_estimate, loocv_estimate, predict_1nn, BaseBossModel,
    TrainEstimate,
};
use crate::checkpoint::{save_checkpoint, BuildCheckpoint, DatasetFingerprint, FORMAT_VERSION};
use crate::data::{subsample, LabeledDataset, SubsamplePolicy};
use crate::error::{Error, Result};
use crate::sfa::SfaParameters;

/// Grid-ensemble retention threshold relative to the best member.
pub const DEFAULT_RETENTION: f64 = 0.92;

/// Default exponent applied to member accuracies when CAWPE weighting.
pub const DEFAULT_CAWPE_EXPONENT: f64 = 4.0;

/// Default cap on members built during a contracted build.
pub const DEFAULT_CONTRACT_MEMBER_CAP: usize = 500;

/// Accuracy floor so zero-accuracy members keep a positive weight.
pub const CAWPE_ACCURACY_FLOOR: f64 = 1e-4;

/// Upper bound on candidate window lengths relative to the series length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxWindowFactor {
    /// Windows up to the full series length.
    Full,
    /// Windows up to half the series length; used by variants that cannot
    /// filter out the near-degenerate full-length windows.
    Half,
}

impl MaxWindowFactor {
    fn apply(self, m: usize) -> usize {
        match self {
            MaxWindowFactor::Full => m,
            MaxWindowFactor::Half => m / 2,
        }
    }
}

/// Candidate window lengths: `max(m / 4, 1)` values linearly spaced over
/// `[min(10, cap), cap]` where `cap = m * factor`, rounded to the nearest
/// integer and deduplicated ascending.
pub fn window_candidates(m: usize, factor: MaxWindowFactor) -> Vec<usize> {
    let hi = factor.apply(m).max(1);
    let lo = hi.min(10);
    let count = (m / 4).max(1);
    let mut out = Vec::with_capacity(count);
    if count == 1 || lo == hi {
        out.push(hi);
    } else {
        for i in 0..count {
            let v = lo as f64 + (hi - lo) as f64 * i as f64 / (count - 1) as f64;
            out.push(v.round() as usize);
        }
    }
    out.dedup();
    out
}

/// The word lengths searched, largest first.
pub const WORD_LENGTHS: [usize; 5] = [16, 14, 12, 10, 8];

/// The alphabet size used by every searched configuration.
pub const ALPHABET_SIZE: usize = 4;

/// An ordered, duplicate-free list of candidate parameter combinations for
/// one series length.
#[derive(Debug, Clone)]
pub struct ParameterSpace {
    combos: Vec<SfaParameters>,
    series_length: usize,
    factor: MaxWindowFactor,
}

impl ParameterSpace {
    pub fn combos(&self) -> &[SfaParameters] {
        &self.combos
    }

    pub fn len(&self) -> usize {
        self.combos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.combos.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&SfaParameters> {
        self.combos.get(id)
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }

    pub fn factor(&self) -> MaxWindowFactor {
        self.factor
    }
}

/// Cross product of window candidates, word lengths and both normalize
/// settings, keeping only combinations each window length can supply.
pub fn enumerate_parameter_space(m: usize, factor: MaxWindowFactor) -> ParameterSpace {
    let mut combos = Vec::new();
    for &w in &window_candidates(m, factor) {
        for &l in &WORD_LENGTHS {
            for p in [true, false] {
                let needed = if p { l + 2 } else { l };
                if needed <= w {
                    combos.push(SfaParameters {
                        word_length: l,
                        alphabet_size: ALPHABET_SIZE,
                        window_length: w,
                        normalize: p,
                    });
                }
            }
        }
    }
    ParameterSpace {
        combos,
        series_length: m,
        factor,
    }
}

/// One fitted ensemble member.
#[derive(Debug, Clone)]
pub struct EnsembleMember {
    pub model: BaseBossModel,
    /// Present whenever the build configuration computes estimates.
    pub train_accuracy: Option<f64>,
    pub weight: f64,
    /// Indices into the ensemble's train set, when the member was built on
    /// a subsample.
    pub subsample_indices: Option<Vec<usize>>,
    /// Id of the parameter combination within the enumerated space.
    pub param_id: usize,
    /// Build order (0-based count of parameter sets tried before this one).
    pub ordinal: usize,
}

impl EnsembleMember {
    pub fn params(&self) -> &SfaParameters {
        self.model.params()
    }
}

/// How member votes combine into one prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    /// Every member votes with weight 1.
    MajorityVote,
    /// Member probability vectors are scaled by their weights.
    WeightedProbability,
}

/// How (and whether) member train accuracies are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    None,
    FullLoocv,
    FastLoocv { per_class_cap: usize },
}

/// When the builder writes checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckpointInterval {
    /// After every `n` completed members.
    Members(usize),
    /// Whenever at least this many seconds passed since the last write.
    Seconds(f64),
}

/// Where and how often an in-progress build is checkpointed.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSettings {
    pub path: PathBuf,
    pub interval: CheckpointInterval,
}

/// Configuration of a randomized ensemble build.
#[derive(Debug, Clone, PartialEq)]
pub struct RbossConfig {
    /// Number of parameter sets to try; absent for contracted builds.
    pub ensemble_size: Option<usize>,
    /// Capacity of the accuracy-filtered member pool; absent = unfiltered.
    pub max_ensemble_size: Option<usize>,
    /// Wall-clock budget; absent for size-driven builds.
    pub time_budget: Option<Duration>,
    /// Hard cap on members built regardless of budget.
    pub contract_member_cap: usize,
    pub subsample_policy: Option<SubsamplePolicy>,
    pub use_cawpe: bool,
    pub cawpe_exponent: f64,
    pub estimate_mode: EstimateMode,
    pub seed: u64,
    pub checkpoint: Option<CheckpointSettings>,
}

impl RbossConfig {
    /// A size-driven configuration with no estimates, no filtering and no
    /// subsampling.
    pub fn fixed_size(ensemble_size: usize, seed: u64) -> Self {
        Self {
            ensemble_size: Some(ensemble_size),
            max_ensemble_size: None,
            time_budget: None,
            contract_member_cap: DEFAULT_CONTRACT_MEMBER_CAP,
            subsample_policy: None,
            use_cawpe: false,
            cawpe_exponent: DEFAULT_CAWPE_EXPONENT,
            estimate_mode: EstimateMode::None,
            seed,
            checkpoint: None,
        }
    }

    /// A time-driven configuration with no estimates, no filtering and no
    /// subsampling.
    pub fn contracted(budget: Duration, seed: u64) -> Self {
        Self {
            ensemble_size: None,
            time_budget: Some(budget),
            ..Self::fixed_size(1, seed)
        }
    }

    /// The window cap follows the estimate mode: variants that cannot
    /// filter bad members by accuracy avoid near-degenerate long windows.
    pub fn window_factor(&self) -> MaxWindowFactor {
        if self.estimate_mode == EstimateMode::None {
            MaxWindowFactor::Half
        } else {
            MaxWindowFactor::Full
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.ensemble_size, self.time_budget) {
            (Some(k), None) => {
                if k == 0 {
                    return Err(Error::Config("ensemble size must be at least 1".into()));
                }
            }
            (None, Some(budget)) => {
                if budget.is_zero() {
                    return Err(Error::Config("time budget must be positive".into()));
                }
            }
            _ => {
                return Err(Error::Config(
                    "exactly one of ensemble size and time budget must drive termination".into(),
                ));
            }
        }
        if self.contract_member_cap == 0 {
            return Err(Error::Config("member cap must be at least 1".into()));
        }
        if let Some(s) = self.max_ensemble_size {
            if s == 0 {
                return Err(Error::Config("max ensemble size must be at least 1".into()));
            }
            if let Some(k) = self.ensemble_size {
                if s > k {
                    return Err(Error::Config(format!(
                        "max ensemble size {s} exceeds ensemble size {k}"
                    )));
                }
            }
        }
        let filtering_possible = match (self.max_ensemble_size, self.ensemble_size) {
            (Some(s), Some(k)) => s < k,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if (filtering_possible || self.use_cawpe) && self.estimate_mode == EstimateMode::None {
            return Err(Error::Config(
                "filtering and CAWPE weighting require an accuracy estimate".into(),
            ));
        }
        if let EstimateMode::FastLoocv { per_class_cap } = self.estimate_mode {
            if per_class_cap == 0 {
                return Err(Error::Config("per-class cap must be at least 1".into()));
            }
        }
        if self.use_cawpe && !(self.cawpe_exponent > 0.0) {
            return Err(Error::Config("CAWPE exponent must be positive".into()));
        }
        Ok(())
    }
}

/// Summary of how an ensemble was built.
#[derive(Debug, Clone)]
pub struct BuildMetadata {
    pub seed: u64,
    pub build_seconds: f64,
    /// Parameter sets actually tried (members built, kept or not).
    pub params_tried: usize,
    /// Largest number of train histograms held at any point of the build.
    pub peak_bag_count: usize,
    pub config: BuildConfigEcho,
}

/// Echo of the configuration an ensemble was built with.
#[derive(Debug, Clone)]
pub enum BuildConfigEcho {
    Grid { retention: f64 },
    Randomized(RbossConfig),
}

/// A fitted ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleModel {
    pub members: Vec<EnsembleMember>,
    pub combiner: Combiner,
    pub class_count: usize,
    pub series_length: usize,
    pub metadata: BuildMetadata,
}

impl EnsembleModel {
    pub fn ensemble_size(&self) -> usize {
        self.members.len()
    }
}

/// CAWPE weight: the (floored) accuracy raised to the exponent.
pub fn cawpe_weight(estimate: &TrainEstimate, exponent: f64) -> f64 {
    estimate.accuracy.max(CAWPE_ACCURACY_FLOOR).powf(exponent)
}

/// Fixed-capacity pool keeping the highest-accuracy entries seen so far.
///
/// While below capacity every entry is kept. At capacity a new entry
/// replaces the current worst only when strictly more accurate; among
/// equally-worst entries the latest-built is evicted, so the pool always
/// equals "top capacity by accuracy, earliest-built wins ties".
#[derive(Debug, Clone)]
pub struct AccuracyFilteredPool {
    capacity: usize,
    entries: Vec<(f64, usize)>,
}

/// What [`AccuracyFilteredPool::offer`] did with a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolAction {
    Appended,
    Replaced(usize),
    Rejected,
}

impl AccuracyFilteredPool {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: Vec::new(),
        }
    }

    /// Entries in slot order as `(accuracy, ordinal)` pairs.
    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    pub fn offer(&mut self, accuracy: f64, ordinal: usize) -> PoolAction {
        if self.entries.len() < self.capacity {
            self.entries.push((accuracy, ordinal));
            return PoolAction::Appended;
        }
        let worst = self
            .entries
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        match worst {
            Some((idx, &(worst_accuracy, _))) if accuracy > worst_accuracy => {
                self.entries[idx] = (accuracy, ordinal);
                PoolAction::Replaced(idx)
            }
            _ => PoolAction::Rejected,
        }
    }
}

/// Incremental randomized-ensemble builder.
///
/// Each step draws one unused parameter combination (seeded, without
/// replacement), optionally subsamples the train data, fits a base
/// classifier, estimates its accuracy and inserts it into the member pool.
/// Per-member randomness derives from `seed + ordinal`, so interrupted and
/// resumed builds reproduce the uninterrupted result.
pub struct RbossBuilder<'a> {
    train: &'a LabeledDataset,
    cfg: RbossConfig,
    space: ParameterSpace,
    pool: Vec<usize>,
    rng: ChaCha8Rng,
    members: Vec<EnsembleMember>,
    filter: Option<AccuracyFilteredPool>,
    drawn: Vec<usize>,
    built: usize,
    started: Instant,
    elapsed_offset: Duration,
    peak_bag_count: usize,
    last_checkpoint: Instant,
}

impl<'a> RbossBuilder<'a> {
    pub fn new(train: &'a LabeledDataset, cfg: RbossConfig) -> Result<Self> {
        cfg.validate()?;
        let space = enumerate_parameter_space(train.series_length(), cfg.window_factor());
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let filter = cfg.max_ensemble_size.map(AccuracyFilteredPool::new);
        let pool = (0..space.len()).collect();
        let now = Instant::now();
        Ok(Self {
            train,
            cfg,
            space,
            pool,
            rng,
            members: Vec::new(),
            filter,
            drawn: Vec::new(),
            built: 0,
            started: now,
            elapsed_offset: Duration::ZERO,
            peak_bag_count: 0,
            last_checkpoint: now,
        })
    }

    /// Rebuilds a builder from a checkpoint so the interrupted loop
    /// continues exactly where it stopped. The checkpointed configuration
    /// is used verbatim except for an optional new checkpoint destination.
    pub fn from_checkpoint(
        train: &'a LabeledDataset,
        checkpoint: BuildCheckpoint,
        checkpoint_override: Option<CheckpointSettings>,
    ) -> Result<Self> {
        checkpoint.validate()?;
        if !checkpoint.fingerprint.matches(train) {
            return Err(Error::DatasetMismatch);
        }
        let mut cfg = checkpoint.config;
        if let Some(settings) = checkpoint_override {
            cfg.checkpoint = Some(settings);
        }
        cfg.validate()?;

        let space = enumerate_parameter_space(train.series_length(), cfg.window_factor());
        let mut pool: Vec<usize> = (0..space.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        // Replay the original draw sequence so the remaining pool and RNG
        // state match the uninterrupted build.
        for &expected in &checkpoint.drawn_param_ids {
            if pool.is_empty() {
                return Err(Error::Checkpoint(
                    "checkpoint drew more parameter sets than the space holds".into(),
                ));
            }
            let at = rng.random_range(0..pool.len());
            let id = pool.swap_remove(at);
            if id != expected {
                return Err(Error::Checkpoint(format!(
                    "draw replay diverged: drew parameter set {id}, checkpoint recorded {expected}"
                )));
            }
        }

        let filter = cfg.max_ensemble_size.map(|capacity| {
            let mut filter = AccuracyFilteredPool::new(capacity);
            for member in &checkpoint.members {
                filter
                    .entries
                    .push((member.train_accuracy.unwrap_or(0.0), member.ordinal));
            }
            filter
        });
        let peak = checkpoint
            .members
            .iter()
            .map(|m| m.model.train_size())
            .sum();
        let now = Instant::now();
        Ok(Self {
            train,
            cfg,
            space,
            pool,
            rng,
            members: checkpoint.members,
            filter,
            drawn: checkpoint.drawn_param_ids,
            built: checkpoint.members_built,
            started: now,
            elapsed_offset: Duration::from_secs_f64(checkpoint.elapsed_seconds),
            peak_bag_count: peak,
            last_checkpoint: now,
        })
    }

    pub fn members_built(&self) -> usize {
        self.built
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    /// Build time so far, including time recorded before a resume.
    pub fn elapsed(&self) -> Duration {
        self.elapsed_offset + self.started.elapsed()
    }

    fn can_continue(&self) -> bool {
        if self.pool.is_empty() || self.built >= self.cfg.contract_member_cap {
            return false;
        }
        match (self.cfg.ensemble_size, self.cfg.time_budget) {
            (Some(k), None) => self.built < k,
            (None, Some(budget)) => self.elapsed() < budget,
            _ => false,
        }
    }

    /// Builds one member. Returns `false` without building when the loop
    /// has terminated (size reached, budget spent, cap hit, or parameter
    /// pool exhausted). The termination check runs before the member
    /// starts, so a member that begins inside a budget always completes.
    pub fn step(&mut self) -> Result<bool> {
        if !self.can_continue() {
            return Ok(false);
        }
        let at = self.rng.random_range(0..self.pool.len());
        let param_id = self.pool.swap_remove(at);
        self.drawn.push(param_id);
        let ordinal = self.built;
        let member_seed = self.cfg.seed.wrapping_add(ordinal as u64);
        let params = self.space.combos()[param_id];

        let (member_train, subsample_indices) = match self.cfg.subsample_policy {
            Some(policy) => {
                let (reduced, indices) = subsample(self.train, policy, member_seed)?;
                (reduced, Some(indices))
            }
            None => (self.train.clone(), None),
        };
        let model = build_base_boss(&member_train, &params)?;
        let estimate = match self.cfg.estimate_mode {
            EstimateMode::None => None,
            EstimateMode::FullLoocv => Some(loocv_estimate(&model)?),
            EstimateMode::FastLoocv { per_class_cap } => {
                Some(fast_loocv_estimate(&model, per_class_cap, member_seed)?)
            }
        };
        let weight = match (&estimate, self.cfg.use_cawpe) {
            (Some(est), true) => cawpe_weight(est, self.cfg.cawpe_exponent),
            _ => 1.0,
        };
        let member = EnsembleMember {
            model,
            train_accuracy: estimate.as_ref().map(|e| e.accuracy),
            weight,
            subsample_indices,
            param_id,
            ordinal,
        };

        let candidate_bags = member.model.train_size();
        let current_bags: usize = self.members.iter().map(|m| m.model.train_size()).sum();
        self.peak_bag_count = self.peak_bag_count.max(current_bags + candidate_bags);

        match &mut self.filter {
            Some(filter) => {
                let accuracy = member.train_accuracy.unwrap_or(0.0);
                match filter.offer(accuracy, ordinal) {
                    PoolAction::Appended => self.members.push(member),
                    PoolAction::Replaced(idx) => self.members[idx] = member,
                    PoolAction::Rejected => {}
                }
            }
            None => self.members.push(member),
        }
        self.built += 1;
        self.maybe_checkpoint();
        Ok(true)
    }

    fn maybe_checkpoint(&mut self) {
        let Some(settings) = self.cfg.checkpoint.clone() else {
            return;
        };
        let due = match settings.interval {
            CheckpointInterval::Members(every) => {
                let every = every.max(1);
                self.built % every == 0
            }
            CheckpointInterval::Seconds(secs) => {
                self.last_checkpoint.elapsed().as_secs_f64() >= secs
            }
        };
        if due {
            // Checkpointing is best-effort: a failed write never aborts the
            // build.
            let _ = save_checkpoint(&self.checkpoint_state(), &settings.path);
            self.last_checkpoint = Instant::now();
        }
    }

    /// Snapshot of the build state, sufficient to resume exactly.
    pub fn checkpoint_state(&self) -> BuildCheckpoint {
        BuildCheckpoint {
            format_version: FORMAT_VERSION,
            config: self.cfg.clone(),
            drawn_param_ids: self.drawn.clone(),
            members: self.members.clone(),
            members_built: self.built,
            elapsed_seconds: self.elapsed().as_secs_f64(),
            fingerprint: DatasetFingerprint::of(self.train),
        }
    }

    /// Runs the loop to termination.
    pub fn run_to_completion(&mut self) -> Result<()> {
        while self.step()? {}
        Ok(())
    }

    pub fn finish(self) -> Result<EnsembleModel> {
        if self.members.is_empty() {
            return Err(Error::Build("no members built".into()));
        }
        let combiner = if self.cfg.use_cawpe {
            Combiner::WeightedProbability
        } else {
            Combiner::MajorityVote
        };
        let build_seconds = self.elapsed().as_secs_f64();
        Ok(EnsembleModel {
            combiner,
            class_count: self.train.class_count(),
            series_length: self.train.series_length(),
            metadata: BuildMetadata {
                seed: self.cfg.seed,
                build_seconds,
                params_tried: self.built,
                peak_bag_count: self.peak_bag_count,
                config: BuildConfigEcho::Randomized(self.cfg),
            },
            members: self.members,
        })
    }
}

/// Builds a randomized ensemble to completion.
pub fn build_rboss(train: &LabeledDataset, cfg: RbossConfig) -> Result<EnsembleModel> {
    let mut builder = RbossBuilder::new(train, cfg)?;
    builder.run_to_completion()?;
    builder.finish()
}

/// Builds a time-contracted randomized ensemble; the configuration must
/// carry a time budget.
pub fn build_rboss_contracted(train: &LabeledDataset, cfg: RbossConfig) -> Result<EnsembleModel> {
    if cfg.time_budget.is_none() {
        return Err(Error::Config(
            "contracted build requires a time budget".into(),
        ));
    }
    build_rboss(train, cfg)
}

/// Builds one base classifier per combination of the full parameter grid,
/// then keeps every member whose leave-one-out accuracy is within
/// `retention` of the best.
pub fn build_grid_boss(train: &LabeledDataset, retention: f64) -> Result<EnsembleModel> {
    if !(retention > 0.0 && retention <= 1.0) {
        return Err(Error::Config(format!(
            "retention {retention} outside (0, 1]"
        )));
    }
    let space = enumerate_parameter_space(train.series_length(), MaxWindowFactor::Full);
    if space.is_empty() {
        return Err(Error::Build("empty parameter space".into()));
    }
    let start = Instant::now();
    let mut members: Vec<EnsembleMember> = Vec::new();
    let mut best_accuracy = 0.0f64;
    let mut peak_bag_count = 0usize;
    let mut tried = 0usize;

    for (param_id, params) in space.combos().iter().enumerate() {
        let model = build_base_boss(train, params)?;
        let estimate = loocv_estimate(&model)?;
        tried += 1;
        let current: usize = members.iter().map(|m| m.model.train_size()).sum();
        peak_bag_count = peak_bag_count.max(current + model.train_size());

        if estimate.accuracy > best_accuracy {
            best_accuracy = estimate.accuracy;
            // Members that fell outside the new threshold can be dropped
            // early; the final set is unchanged.
            members.retain(|m| m.train_accuracy.unwrap_or(0.0) >= retention * best_accuracy);
        }
        if estimate.accuracy >= retention * best_accuracy {
            members.push(EnsembleMember {
                model,
                train_accuracy: Some(estimate.accuracy),
                weight: 1.0,
                subsample_indices: None,
                param_id,
                ordinal: param_id,
            });
        }
    }

    if members.is_empty() {
        return Err(Error::Build("no members built".into()));
    }
    Ok(EnsembleModel {
        members,
        combiner: Combiner::MajorityVote,
        class_count: train.class_count(),
        series_length: train.series_length(),
        metadata: BuildMetadata {
            seed: 0,
            build_seconds: start.elapsed().as_secs_f64(),
            params_tried: tried,
            peak_bag_count,
            config: BuildConfigEcho::Grid { retention },
        },
    })
}

/// Classifies a series with the whole ensemble: each member votes its
/// 1-NN probability vector scaled by its weight; the sum is normalized and
/// the argmax wins, ties to the lowest class index.
pub fn predict_ensemble(model: &EnsembleModel, series: &[f64]) -> Result<(usize, Vec<f64>)> {
    if series.len() != model.series_length {
        return Err(Error::Parameter(format!(
            "series length {} does not match training length {}",
            series.len(),
            model.series_length
        )));
    }
    let mut combined = vec![0.0f64; model.class_count];
    for member in &model.members {
        let (_, probabilities) = predict_1nn(&member.model, series)?;
        for (acc, p) in combined.iter_mut().zip(&probabilities) {
            *acc += member.weight * p;
        }
    }
    let total: f64 = combined.iter().sum();
    if total > 0.0 {
        combined.iter_mut().for_each(|p| *p /= total);
    }
    let mut label = 0usize;
    for (c, &p) in combined.iter().enumerate() {
        if p > combined[label] {
            label = c;
        }
    }
    Ok((label, combined))
}
