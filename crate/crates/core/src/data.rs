//! Dataset representation, text ingestion, normalization, and seeded
//! stratified resampling / subsampling.
//!
//! The text format is one instance per line: the first comma-separated token
//! is the class label (integer or string), the remaining tokens are real
//! values. Lines starting with `#` are comments; blank lines are skipped;
//! both `\n` and `\r\n` are accepted.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Standard deviations below this are treated as zero variance.
pub const STD_EPSILON: f64 = 1e-8;

/// Fixed-length real-valued series with contiguous 0-based integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    series: Vec<Vec<f64>>,
    labels: Vec<usize>,
    class_count: usize,
}

impl LabeledDataset {
    /// Builds a dataset, validating that all series share one length, that
    /// every label is within `[0, class_count)`, and that it is non-empty.
    pub fn new(series: Vec<Vec<f64>>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::Format {
                row: 0,
                reason: "dataset has no instances".into(),
            });
        }
        if series.len() != labels.len() {
            return Err(Error::Format {
                row: 0,
                reason: format!(
                    "{} series but {} labels",
                    series.len(),
                    labels.len()
                ),
            });
        }
        let m = series[0].len();
        if m == 0 {
            return Err(Error::Format {
                row: 1,
                reason: "series must have at least one value".into(),
            });
        }
        for (i, s) in series.iter().enumerate() {
            if s.len() != m {
                return Err(Error::Format {
                    row: i + 1,
                    reason: format!("series length {} differs from {}", s.len(), m),
                });
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y >= class_count {
                return Err(Error::Format {
                    row: i + 1,
                    reason: format!("label {y} outside [0, {class_count})"),
                });
            }
        }
        Ok(Self {
            series,
            labels,
            class_count,
        })
    }

    /// Number of instances.
    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Number of time points per instance.
    pub fn series_length(&self) -> usize {
        self.series[0].len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.series[i]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], usize)> {
        self.series
            .iter()
            .map(|s| s.as_slice())
            .zip(self.labels.iter().copied())
    }

    /// Instances per class, indexed by class id.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.class_count];
        for &y in &self.labels {
            sizes[y] += 1;
        }
        sizes
    }

    /// Instance indices grouped by class, each group ascending.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.class_count];
        for (i, &y) in self.labels.iter().enumerate() {
            groups[y].push(i);
        }
        groups
    }

    /// New dataset holding the given instances (indices into `self`).
    /// The class count is preserved even if some class is absent.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let series = indices.iter().map(|&i| self.series[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::new(series, labels, self.class_count)
    }
}

/// Parses the documented text format. Labels are remapped to contiguous
/// 0-based ids in order of first appearance.
pub fn parse_dataset(text: &str) -> Result<LabeledDataset> {
    let mut series: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut label_ids: Vec<String> = Vec::new();
    let mut width: Option<usize> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let row = lineno + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split(',');
        let label_token = tokens.next().unwrap_or("").trim();
        if label_token.is_empty() {
            return Err(Error::Format {
                row,
                reason: "missing class label".into(),
            });
        }
        let mut values = Vec::new();
        for tok in tokens {
            let tok = tok.trim();
            let v: f64 = tok.parse().map_err(|_| Error::Format {
                row,
                reason: format!("non-numeric token {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Format {
                    row,
                    reason: format!("non-finite value {tok:?}"),
                });
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::Format {
                row,
                reason: "instance has no values".into(),
            });
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(Error::Format {
                    row,
                    reason: format!("row has {} values, expected {}", values.len(), w),
                });
            }
            _ => {}
        }
        let id = match label_ids.iter().position(|s| s == label_token) {
            Some(id) => id,
            None => {
                label_ids.push(label_token.to_string());
                label_ids.len() - 1
            }
        };
        series.push(values);
        labels.push(id);
    }

    if series.is_empty() {
        return Err(Error::Format {
            row: 0,
            reason: "empty input".into(),
        });
    }
    LabeledDataset::new(series, labels, label_ids.len())
}

/// Writes a dataset back to the text format. Values use the shortest
/// representation that round-trips through `parse_dataset` exactly.
pub fn serialize_dataset(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for (s, y) in data.iter() {
        out.push_str(&y.to_string());
        for v in s {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Rescales a series to mean 0 and population (divide-by-N) standard
/// deviation 1. Inputs with standard deviation below [`STD_EPSILON`]
/// normalize to all zeros.
pub fn z_normalize(series: &[f64]) -> Vec<f64> {
    let mut out = series.to_vec();
    z_normalize_in_place(&mut out);
    out
}

/// In-place variant of [`z_normalize`] for hot loops.
pub fn z_normalize_in_place(series: &mut [f64]) {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd < STD_EPSILON {
        series.iter_mut().for_each(|x| *x = 0.0);
    } else {
        series.iter_mut().for_each(|x| *x = (*x - mean) / sd);
    }
}

/// A deterministic stratified train/test partition of a source dataset.
#[derive(Debug, Clone)]
pub struct ResampleSplit {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    /// Source indices of the train instances, ascending.
    pub train_indices: Vec<usize>,
    /// Source indices of the test instances, ascending.
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub resample_index: usize,
}

/// How [`subsample`] selects instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubsamplePolicy {
    /// Keep a stratified fraction in `(0, 1]` of the instances.
    Fraction(f64),
    /// Keep the dataset unchanged when `n <= cap`, otherwise a stratified
    /// sample of exactly `cap` instances.
    MaxTotal(usize),
}

/// Splits per-class counts with round-half-up, then moves single units
/// until the counts sum to `target`. Each unit goes to the class whose
/// count deviates most from its exact share in the needed direction
/// (ties: larger class, then lower id), which keeps every class within
/// one instance of `fraction * class_size`. Counts stay in
/// `[1, upper(class)]`.
fn allocate_counts(
    class_sizes: &[usize],
    fraction: f64,
    target: usize,
    upper: impl Fn(usize) -> usize,
) -> Vec<usize> {
    let ideals: Vec<f64> = class_sizes
        .iter()
        .map(|&size| fraction * size as f64)
        .collect();
    let mut counts: Vec<usize> = class_sizes
        .iter()
        .zip(&ideals)
        .map(|(&size, &ideal)| (ideal.round() as usize).clamp(1, upper(size)))
        .collect();

    let mut total: usize = counts.iter().sum();
    while total != target {
        let need_more = total < target;
        let candidate = (0..counts.len())
            .filter(|&c| {
                if need_more {
                    counts[c] < upper(class_sizes[c])
                } else {
                    counts[c] > 1
                }
            })
            .max_by(|&a, &b| {
                let dev = |c: usize| {
                    let d = counts[c] as f64 - ideals[c];
                    if need_more {
                        -d
                    } else {
                        d
                    }
                };
                dev(a)
                    .total_cmp(&dev(b))
                    .then(class_sizes[a].cmp(&class_sizes[b]))
                    .then(b.cmp(&a))
            });
        let Some(c) = candidate else {
            break;
        };
        if need_more {
            counts[c] += 1;
            total += 1;
        } else {
            counts[c] -= 1;
            total -= 1;
        }
    }
    counts
}

/// Seeded pick of `count` indices (without replacement) from each class
/// group; the flattened result is returned ascending.
fn pick_stratified(
    groups: &[Vec<usize>],
    counts: &[usize],
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut picked = Vec::new();
    for (group, &count) in groups.iter().zip(counts) {
        if count >= group.len() {
            picked.extend_from_slice(group);
        } else {
            let mut shuffled = group.clone();
            shuffled.shuffle(rng);
            picked.extend_from_slice(&shuffled[..count]);
        }
    }
    picked.sort_unstable();
    picked
}

/// Deterministic stratified train/test split. Per-class train counts are
/// `round(fraction * class_size)` clamped so that both sides keep at least
/// one instance of every class, then adjusted to hit
/// `round(fraction * n)` overall.
pub fn stratified_resample(
    data: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<ResampleSplit> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Stratification(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let sizes = data.class_sizes();
    if let Some(c) = sizes.iter().position(|&s| s < 2) {
        return Err(Error::Stratification(format!(
            "class {c} has {} instance(s); need at least 2",
            sizes[c]
        )));
    }

    let n = data.len();
    let c = data.class_count();
    let target = ((train_fraction * n as f64).round() as usize).clamp(c, n - c);
    let counts = allocate_counts(&sizes, train_fraction, target, |size| size - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train_indices = pick_stratified(&data.class_indices(), &counts, &mut rng);
    let mut in_train = vec![false; n];
    for &i in &train_indices {
        in_train[i] = true;
    }
    let test_indices: Vec<usize> = (0..n).filter(|&i| !in_train[i]).collect();

    Ok(ResampleSplit {
        train: data.select(&train_indices)?,
        test: data.select(&test_indices)?,
        train_indices,
        test_indices,
        seed,
        resample_index: 0,
    })
}

/// Deterministic stratified subsample. Returns the reduced dataset and the
/// selected indices into `data`, ascending.
pub fn subsample(
    data: &LabeledDataset,
    policy: SubsamplePolicy,
    seed: u64,
) -> Result<(LabeledDataset, Vec<usize>)> {
    let n = data.len();
    let identity = || (data.clone(), (0..n).collect::<Vec<usize>>());

    match policy {
        SubsamplePolicy::Fraction(f) => {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Policy(format!("fraction {f} outside (0, 1]")));
            }
            if f == 1.0 {
                return Ok(identity());
            }
            let sizes = data.class_sizes();
            let c = data.class_count();
            let target = ((f * n as f64).round() as usize).clamp(c, n);
            let counts = allocate_counts(&sizes, f, target, |size| size);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let indices = pick_stratified(&data.class_indices(), &counts, &mut rng);
            Ok((data.select(&indices)?, indices))
        }
        SubsamplePolicy::MaxTotal(cap) => {
            if cap < data.class_count() {
                return Err(Error::Policy(format!(
                    "cap {cap} below class count {}",
                    data.class_count()
                )));
            }
            if n <= cap {
                return Ok(identity());
            }
            let sizes = data.class_sizes();
            let frac = cap as f64 / n as f64;
            let counts = allocate_counts(&sizes, frac, cap, |size| size);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let indices = pick_stratified(&data.class_indices(), &counts, &mut rng);
            Ok((data.select(&indices)?, indices))
        }
    }
}
