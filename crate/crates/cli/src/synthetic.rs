//! Synthetic dictionary-style datasets: classes share a noise floor and
//! differ in how often a short waveform pattern occurs in each series.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use rboss::LabeledDataset;

use crate::{CliError, Result};

/// Peak height of the embedded waveform.
pub const PATTERN_AMPLITUDE: f64 = 2.0;

/// Shape of a synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// 2 or 3 classes.
    pub class_count: usize,
    pub instances_per_class: usize,
    pub series_length: usize,
    pub pattern_length: usize,
    /// Pattern occurrences per instance, one entry per class.
    pub occurrence_counts: Vec<usize>,
    pub noise_sigma: f64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.class_count) {
            return Err(CliError::Spec(format!(
                "classes must be 2 or 3, got {}",
                self.class_count
            )));
        }
        if self.instances_per_class == 0 {
            return Err(CliError::Spec("need at least one instance per class".into()));
        }
        if self.series_length == 0 || self.pattern_length == 0 {
            return Err(CliError::Spec("series and pattern lengths must be positive".into()));
        }
        if self.occurrence_counts.len() != self.class_count {
            return Err(CliError::Spec(format!(
                "{} occurrence counts for {} classes",
                self.occurrence_counts.len(),
                self.class_count
            )));
        }
        for (class, &count) in self.occurrence_counts.iter().enumerate() {
            if count * self.pattern_length > self.series_length {
                return Err(CliError::Spec(format!(
                    "class {class}: {count} patterns of length {} do not fit in {} points",
                    self.pattern_length, self.series_length
                )));
            }
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(CliError::Spec("noise sigma must be non-negative".into()));
        }
        Ok(())
    }

    /// Parses the compact `key=value` form, e.g.
    /// `classes=2,n=30,m=128,pattern=16,counts=1:4,noise=0.5`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut classes = None;
        let mut n = None;
        let mut m = None;
        let mut pattern = None;
        let mut counts: Option<Vec<usize>> = None;
        let mut noise = None;
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CliError::Spec(format!("expected key=value, got {part:?}")))?;
            let bad = |what: &str| CliError::Spec(format!("invalid {what}: {value:?}"));
            match key {
                "classes" => classes = Some(value.parse().map_err(|_| bad("classes"))?),
                "n" => n = Some(value.parse().map_err(|_| bad("n"))?),
                "m" => m = Some(value.parse().map_err(|_| bad("m"))?),
                "pattern" => pattern = Some(value.parse().map_err(|_| bad("pattern"))?),
                "counts" => {
                    let parsed: std::result::Result<Vec<usize>, _> =
                        value.split(':').map(str::parse).collect();
                    counts = Some(parsed.map_err(|_| bad("counts"))?);
                }
                "noise" => noise = Some(value.parse().map_err(|_| bad("noise"))?),
                other => {
                    return Err(CliError::Spec(format!("unknown key {other:?}")));
                }
            }
        }
        let require = |name: &str, v: Option<usize>| {
            v.ok_or_else(|| CliError::Spec(format!("missing required key {name:?}")))
        };
        let spec = SyntheticSpec {
            class_count: require("classes", classes)?,
            instances_per_class: require("n", n)?,
            series_length: require("m", m)?,
            pattern_length: require("pattern", pattern)?,
            occurrence_counts: counts
                .ok_or_else(|| CliError::Spec("missing required key \"counts\"".into()))?,
            noise_sigma: noise
                .ok_or_else(|| CliError::Spec("missing required key \"noise\"".into()))?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One full sine cycle, phase-shifted half a sample so no point sits
/// exactly on zero.
fn waveform(length: usize) -> Vec<f64> {
    (0..length)
        .map(|t| {
            let angle = std::f64::consts::TAU * (t as f64 + 0.5) / length as f64;
            PATTERN_AMPLITUDE * angle.sin()
        })
        .collect()
}

/// Generates the dataset: every instance is Gaussian noise plus its
/// class's number of waveform insertions at seeded non-overlapping
/// offsets.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = spec.series_length;
    let pattern = waveform(spec.pattern_length);

    let mut series = Vec::with_capacity(spec.class_count * spec.instances_per_class);
    let mut labels = Vec::with_capacity(series.capacity());
    for class in 0..spec.class_count {
        let count = spec.occurrence_counts[class];
        for _ in 0..spec.instances_per_class {
            let mut values: Vec<f64> = if spec.noise_sigma > 0.0 {
                (0..m)
                    .map(|_| spec.noise_sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            } else {
                vec![0.0; m]
            };
            if count > 0 {
                // Non-overlapping placement: sorted cuts into the slack
                // left over once all patterns are laid end to end.
                let slack = m - count * spec.pattern_length;
                let mut cuts: Vec<usize> =
                    (0..count).map(|_| rng.random_range(0..=slack)).collect();
                cuts.sort_unstable();
                for (j, &cut) in cuts.iter().enumerate() {
                    let offset = cut + j * spec.pattern_length;
                    for (t, &p) in pattern.iter().enumerate() {
                        values[offset + t] += p;
                    }
                }
            }
            series.push(values);
            labels.push(class);
        }
    }
    Ok(LabeledDataset::new(series, labels, spec.class_count)?)
}
