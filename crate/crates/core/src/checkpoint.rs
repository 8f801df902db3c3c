//! Durable snapshots of in-progress randomized ensemble builds, with exact
//! resumption.
//!
//! # File format
//!
//! A checkpoint is a single binary record. All integers are little-endian;
//! all reals are 64-bit IEEE-754; variable-length sequences are prefixed
//! with a `u64` element count; strings are UTF-8 bytes prefixed with a
//! `u64` byte count; optional values are a `u8` presence flag followed by
//! the payload when the flag is 1.
//!
//! ```text
//! magic            4 bytes  "RBOS"
//! format_version   u32
//! -- configuration --
//! seed             u64
//! termination      u8       0 = size-driven, 1 = time-driven
//!   ensemble_size  u64      (when 0)
//!   budget_seconds f64      (when 1)
//! max_ensemble     option<u64>
//! member_cap       u64
//! subsample        u8       0 = none, 1 = fraction(f64), 2 = max_total(u64)
//! use_cawpe        u8
//! cawpe_exponent   f64
//! estimate_mode    u8       0 = none, 1 = full, 2 = fast(u64 per-class cap)
//! checkpoint       option<{ path: string, interval: u8 0=members(u64), 1=seconds(f64) }>
//! -- dataset fingerprint --
//! n                u64
//! m                u64
//! class_count      u64
//! content_hash     32 bytes (SHA-256)
//! -- progress --
//! members_built    u64
//! elapsed_seconds  f64
//! drawn_param_ids  seq<u64>                 (in draw order)
//! members          seq<member>              (in slot order)
//!
//! member:
//!   ordinal            u64
//!   param_id           u64
//!   word_length        u64
//!   alphabet_size      u64
//!   window_length      u64
//!   normalize          u8
//!   breakpoints        u64 rows, u64 cols, rows*cols f64 (row-major)
//!   train_labels       seq<u32>
//!   train_bags         seq< seq<(u64 word, u32 count)> >  (words ascending)
//!   train_accuracy     option<f64>
//!   weight             f64
//!   subsample_indices  option<seq<u64>>
//! ```

use std::fs;
use std::io::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::base::BaseBossModel;
use crate::data::LabeledDataset;
use crate::ensemble::{
    CheckpointInterval, CheckpointSettings, EnsembleMember, EnsembleModel, EstimateMode,
    RbossBuilder, RbossConfig,
};
use crate::data::SubsamplePolicy;
use crate::error::{Error, Result};
use crate::sfa::{Breakpoints, SfaParameters, Word, WordHistogram};

/// Current checkpoint format version.
pub const FORMAT_VERSION: u32 = 1;

const MAGIC: [u8; 4] = *b"RBOS";

/// Identity of the dataset a build ran against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetFingerprint {
    pub n: usize,
    pub m: usize,
    pub class_count: usize,
    pub content_hash: [u8; 32],
}

impl DatasetFingerprint {
    pub fn of(data: &LabeledDataset) -> Self {
        let mut hasher = Sha256::new();
        hasher.update((data.len() as u64).to_le_bytes());
        hasher.update((data.series_length() as u64).to_le_bytes());
        hasher.update((data.class_count() as u64).to_le_bytes());
        for (series, label) in data.iter() {
            hasher.update((label as u64).to_le_bytes());
            for &v in series {
                hasher.update(v.to_le_bytes());
            }
        }
        Self {
            n: data.len(),
            m: data.series_length(),
            class_count: data.class_count(),
            content_hash: hasher.finalize().into(),
        }
    }

    pub fn matches(&self, data: &LabeledDataset) -> bool {
        *self == Self::of(data)
    }
}

/// Complete state of an interrupted build.
#[derive(Debug, Clone)]
pub struct BuildCheckpoint {
    pub format_version: u32,
    pub config: RbossConfig,
    /// Parameter-set ids in the order they were drawn.
    pub drawn_param_ids: Vec<usize>,
    /// Retained members in slot order.
    pub members: Vec<EnsembleMember>,
    /// Parameter sets tried so far (kept or not).
    pub members_built: usize,
    /// Build time consumed before this snapshot.
    pub elapsed_seconds: f64,
    pub fingerprint: DatasetFingerprint,
}

impl BuildCheckpoint {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Version {
                found: self.format_version,
                supported: FORMAT_VERSION,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for &id in &self.drawn_param_ids {
            if !seen.insert(id) {
                return Err(Error::Checkpoint(format!(
                    "parameter set {id} drawn twice"
                )));
            }
        }
        if self.drawn_param_ids.len() != self.members_built {
            return Err(Error::Checkpoint(format!(
                "{} drawn parameter sets but members_built = {}",
                self.drawn_param_ids.len(),
                self.members_built
            )));
        }
        if let Some(cap) = self.config.max_ensemble_size {
            if self.members.len() > cap {
                return Err(Error::Checkpoint(format!(
                    "{} members exceed the pool capacity {cap}",
                    self.members.len()
                )));
            }
        }
        for member in &self.members {
            if !seen.contains(&member.param_id) {
                return Err(Error::Checkpoint(format!(
                    "member references undrawn parameter set {}",
                    member.param_id
                )));
            }
            if member.ordinal >= self.members_built {
                return Err(Error::Checkpoint(format!(
                    "member ordinal {} outside the {} builds recorded",
                    member.ordinal, self.members_built
                )));
            }
            if !(member.weight > 0.0) {
                return Err(Error::Checkpoint("member weight must be positive".into()));
            }
        }
        if !(self.elapsed_seconds >= 0.0) {
            return Err(Error::Checkpoint("elapsed time must be non-negative".into()));
        }
        Ok(())
    }
}

/// Writes the checkpoint atomically: the bytes go to a sibling temp file
/// which replaces `path` only once fully written and flushed.
pub fn save_checkpoint(state: &BuildCheckpoint, path: &Path) -> Result<()> {
    state.validate()?;
    let bytes = encode(state);

    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Checkpoint(format!("invalid checkpoint path {path:?}")))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);

    let io = |e: std::io::Error| Error::Checkpoint(format!("write {path:?}: {e}"));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(&bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    drop(file);
    fs::rename(&tmp, path).map_err(io)?;
    Ok(())
}

/// Reads and validates a checkpoint.
pub fn load_checkpoint(path: &Path) -> Result<BuildCheckpoint> {
    let bytes = match fs::read(path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::NotFound(path.to_path_buf()));
        }
        Err(e) => return Err(Error::Checkpoint(format!("read {path:?}: {e}"))),
    };
    let state = decode(&bytes)?;
    state.validate()?;
    Ok(state)
}

/// Continues an interrupted build to completion. The checkpoint's
/// configuration (including the seed and any checkpoint destination) is
/// used verbatim; size-driven builds finish bit-identical to an
/// uninterrupted run with the same seed.
pub fn resume_build(train: &LabeledDataset, checkpoint: BuildCheckpoint) -> Result<EnsembleModel> {
    resume_build_with(train, checkpoint, None)
}

/// [`resume_build`] with a replacement checkpoint destination/cadence.
pub fn resume_build_with(
    train: &LabeledDataset,
    checkpoint: BuildCheckpoint,
    checkpoint_override: Option<CheckpointSettings>,
) -> Result<EnsembleModel> {
    let mut builder = RbossBuilder::from_checkpoint(train, checkpoint, checkpoint_override)?;
    builder.run_to_completion()?;
    builder.finish()
}

// --- binary codec -------------------------------------------------------

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Self { buf: Vec::new() }
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }

    fn string(&mut self, v: &str) {
        self.usize(v.len());
        self.bytes(v.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Checkpoint("truncated checkpoint payload".into()));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::Checkpoint(format!("value {v} overflows usize")))
    }

    /// A length prefix, sanity-bounded so corrupt lengths fail instead of
    /// attempting absurd allocations.
    fn len(&mut self) -> Result<usize> {
        let v = self.usize()?;
        if v > self.buf.len().saturating_sub(self.pos) + 8 {
            return Err(Error::Checkpoint(format!(
                "length {v} exceeds remaining payload"
            )));
        }
        Ok(v)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.len()?;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::Checkpoint("invalid UTF-8 in checkpoint".into()))
    }

    fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

fn encode(state: &BuildCheckpoint) -> Vec<u8> {
    let mut w = Writer::new();
    w.bytes(&MAGIC);
    w.u32(state.format_version);

    let cfg = &state.config;
    w.u64(cfg.seed);
    match (cfg.ensemble_size, cfg.time_budget) {
        (Some(k), None) => {
            w.u8(0);
            w.usize(k);
        }
        (_, Some(budget)) => {
            w.u8(1);
            w.f64(budget.as_secs_f64());
        }
        (None, None) => {
            // Unreachable for validated configs; encode as size-driven 0 so
            // decode rejects it.
            w.u8(0);
            w.usize(0);
        }
    }
    match cfg.max_ensemble_size {
        Some(s) => {
            w.u8(1);
            w.usize(s);
        }
        None => w.u8(0),
    }
    w.usize(cfg.contract_member_cap);
    match cfg.subsample_policy {
        None => w.u8(0),
        Some(SubsamplePolicy::Fraction(f)) => {
            w.u8(1);
            w.f64(f);
        }
        Some(SubsamplePolicy::MaxTotal(cap)) => {
            w.u8(2);
            w.usize(cap);
        }
    }
    w.u8(u8::from(cfg.use_cawpe));
    w.f64(cfg.cawpe_exponent);
    match cfg.estimate_mode {
        EstimateMode::None => w.u8(0),
        EstimateMode::FullLoocv => w.u8(1),
        EstimateMode::FastLoocv { per_class_cap } => {
            w.u8(2);
            w.usize(per_class_cap);
        }
    }
    match &cfg.checkpoint {
        None => w.u8(0),
        Some(settings) => {
            w.u8(1);
            w.string(&settings.path.to_string_lossy());
            match settings.interval {
                CheckpointInterval::Members(n) => {
                    w.u8(0);
                    w.usize(n);
                }
                CheckpointInterval::Seconds(s) => {
                    w.u8(1);
                    w.f64(s);
                }
            }
        }
    }

    let fp = &state.fingerprint;
    w.usize(fp.n);
    w.usize(fp.m);
    w.usize(fp.class_count);
    w.bytes(&fp.content_hash);

    w.usize(state.members_built);
    w.f64(state.elapsed_seconds);
    w.usize(state.drawn_param_ids.len());
    for &id in &state.drawn_param_ids {
        w.usize(id);
    }
    w.usize(state.members.len());
    for member in &state.members {
        encode_member(&mut w, member);
    }
    w.buf
}

fn encode_member(w: &mut Writer, member: &EnsembleMember) {
    w.usize(member.ordinal);
    w.usize(member.param_id);
    let params = member.params();
    w.usize(params.word_length);
    w.usize(params.alphabet_size);
    w.usize(params.window_length);
    w.u8(u8::from(params.normalize));

    let rows = member.model.breakpoints().rows();
    w.usize(rows.len());
    w.usize(rows[0].len());
    for row in rows {
        for &t in row {
            w.f64(t);
        }
    }

    let labels = member.model.train_labels();
    w.usize(labels.len());
    for &y in labels {
        w.u32(y as u32);
    }

    w.usize(member.model.train_bags().len());
    for bag in member.model.train_bags() {
        let entries = bag.entries_sorted();
        w.usize(entries.len());
        for (word, count) in entries {
            w.u64(word.packed());
            w.u32(count);
        }
    }

    match member.train_accuracy {
        Some(acc) => {
            w.u8(1);
            w.f64(acc);
        }
        None => w.u8(0),
    }
    w.f64(member.weight);
    match &member.subsample_indices {
        Some(indices) => {
            w.u8(1);
            w.usize(indices.len());
            for &i in indices {
                w.usize(i);
            }
        }
        None => w.u8(0),
    }
}

fn decode(bytes: &[u8]) -> Result<BuildCheckpoint> {
    let mut r = Reader::new(bytes);
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(Error::Checkpoint("not a checkpoint file (bad magic)".into()));
    }
    let format_version = r.u32()?;
    if format_version != FORMAT_VERSION {
        return Err(Error::Version {
            found: format_version,
            supported: FORMAT_VERSION,
        });
    }

    let seed = r.u64()?;
    let (ensemble_size, time_budget) = match r.u8()? {
        0 => (Some(r.usize()?), None),
        1 => (
            None,
            Some(std::time::Duration::from_secs_f64(r.f64()?)),
        ),
        tag => {
            return Err(Error::Checkpoint(format!(
                "unknown termination tag {tag}"
            )))
        }
    };
    let max_ensemble_size = match r.u8()? {
        0 => None,
        1 => Some(r.usize()?),
        tag => return Err(Error::Checkpoint(format!("unknown option tag {tag}"))),
    };
    let contract_member_cap = r.usize()?;
    let subsample_policy = match r.u8()? {
        0 => None,
        1 => Some(SubsamplePolicy::Fraction(r.f64()?)),
        2 => Some(SubsamplePolicy::MaxTotal(r.usize()?)),
        tag => return Err(Error::Checkpoint(format!("unknown subsample tag {tag}"))),
    };
    let use_cawpe = r.u8()? != 0;
    let cawpe_exponent = r.f64()?;
    let estimate_mode = match r.u8()? {
        0 => EstimateMode::None,
        1 => EstimateMode::FullLoocv,
        2 => EstimateMode::FastLoocv {
            per_class_cap: r.usize()?,
        },
        tag => return Err(Error::Checkpoint(format!("unknown estimate tag {tag}"))),
    };
    let checkpoint = match r.u8()? {
        0 => None,
        1 => {
            let path = std::path::PathBuf::from(r.string()?);
            let interval = match r.u8()? {
                0 => CheckpointInterval::Members(r.usize()?),
                1 => CheckpointInterval::Seconds(r.f64()?),
                tag => {
                    return Err(Error::Checkpoint(format!(
                        "unknown interval tag {tag}"
                    )))
                }
            };
            Some(CheckpointSettings { path, interval })
        }
        tag => return Err(Error::Checkpoint(format!("unknown option tag {tag}"))),
    };
    let config = RbossConfig {
        ensemble_size,
        max_ensemble_size,
        time_budget,
        contract_member_cap,
        subsample_policy,
        use_cawpe,
        cawpe_exponent,
        estimate_mode,
        seed,
        checkpoint,
    };
    config.validate().map_err(|e| match e {
        Error::Config(msg) => Error::Checkpoint(format!("invalid stored config: {msg}")),
        other => other,
    })?;

    let n = r.usize()?;
    let m = r.usize()?;
    let class_count = r.usize()?;
    let content_hash: [u8; 32] = r.take(32)?.try_into().unwrap();
    let fingerprint = DatasetFingerprint {
        n,
        m,
        class_count,
        content_hash,
    };

    let members_built = r.usize()?;
    let elapsed_seconds = r.f64()?;
    let drawn_count = r.len()?;
    let mut drawn_param_ids = Vec::with_capacity(drawn_count);
    for _ in 0..drawn_count {
        drawn_param_ids.push(r.usize()?);
    }
    let member_count = r.len()?;
    let mut members = Vec::with_capacity(member_count);
    for _ in 0..member_count {
        members.push(decode_member(&mut r, class_count, m)?);
    }
    if !r.done() {
        return Err(Error::Checkpoint("trailing bytes after checkpoint".into()));
    }

    Ok(BuildCheckpoint {
        format_version,
        config,
        drawn_param_ids,
        members,
        members_built,
        elapsed_seconds,
        fingerprint,
    })
}

fn decode_member(r: &mut Reader, class_count: usize, series_length: usize) -> Result<EnsembleMember> {
    let ordinal = r.usize()?;
    let param_id = r.usize()?;
    let word_length = r.usize()?;
    let alphabet_size = r.usize()?;
    let window_length = r.usize()?;
    let normalize = r.u8()? != 0;
    let params = SfaParameters::new(word_length, alphabet_size, window_length, normalize)
        .map_err(|e| Error::Checkpoint(format!("invalid stored parameters: {e}")))?;

    let rows = r.len()?;
    let cols = r.len()?;
    let mut breakpoint_rows = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for _ in 0..cols {
            row.push(r.f64()?);
        }
        breakpoint_rows.push(row);
    }
    let breakpoints = Breakpoints::from_rows(breakpoint_rows)
        .map_err(|e| Error::Checkpoint(format!("invalid stored breakpoints: {e}")))?;

    let label_count = r.len()?;
    let mut labels = Vec::with_capacity(label_count);
    for _ in 0..label_count {
        labels.push(r.u32()? as usize);
    }

    let bag_count = r.len()?;
    let mut bags = Vec::with_capacity(bag_count);
    for _ in 0..bag_count {
        let entry_count = r.len()?;
        let mut entries = Vec::with_capacity(entry_count);
        for _ in 0..entry_count {
            let word = Word::from_packed(r.u64()?);
            let count = r.u32()?;
            entries.push((word, count));
        }
        let bag = WordHistogram::from_entries(entries)
            .map_err(|e| Error::Checkpoint(format!("invalid stored histogram: {e}")))?;
        bags.push(bag);
    }

    let train_accuracy = match r.u8()? {
        0 => None,
        1 => Some(r.f64()?),
        tag => return Err(Error::Checkpoint(format!("unknown option tag {tag}"))),
    };
    let weight = r.f64()?;
    let subsample_indices = match r.u8()? {
        0 => None,
        1 => {
            let count = r.len()?;
            let mut indices = Vec::with_capacity(count);
            for _ in 0..count {
                indices.push(r.usize()?);
            }
            Some(indices)
        }
        tag => return Err(Error::Checkpoint(format!("unknown option tag {tag}"))),
    };

    let model = BaseBossModel::from_parts(
        params,
        breakpoints,
        bags,
        labels,
        class_count,
        series_length,
    )
    .map_err(|e| Error::Checkpoint(format!("invalid stored model: {e}")))?;

    Ok(EnsembleMember {
        model,
        train_accuracy,
        weight,
        subsample_indices,
        param_id,
        ordinal,
    })
}
