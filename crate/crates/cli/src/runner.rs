//! Resampled experiment runner: shared seeded splits across variants,
//! per-resample build/evaluate with failure isolation, and CSV reporting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rboss::checkpoint::{load_checkpoint, resume_build_with};
use rboss::ensemble::{
    build_grid_boss, build_rboss, CheckpointInterval, CheckpointSettings, EnsembleModel,
};
use rboss::{parse_dataset, predict_ensemble, stratified_resample, LabeledDataset, ResampleSplit};

use crate::synthetic::{generate_synthetic, SyntheticSpec};
use crate::variants::{resolve_variant, ClassifierConfig, Variant, VariantOverrides};
use crate::{CliError, Result};

/// Where the experiment's data comes from.
#[derive(Debug, Clone)]
pub enum DatasetSource {
    File(PathBuf),
    Synthetic(SyntheticSpec),
}

/// A full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: DatasetSource,
    pub variant: Variant,
    pub overrides: VariantOverrides,
    pub resamples: usize,
    pub base_seed: u64,
    pub train_fraction: f64,
    pub out_dir: PathBuf,
    /// Checkpoint file stem and member interval; each resample writes
    /// `<stem>.r<resample>` and resumes from it when present.
    pub checkpoint: Option<(PathBuf, usize)>,
}

/// One evaluated resample.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub dataset: String,
    pub variant: String,
    pub resample: usize,
    pub accuracy: f64,
    pub build_seconds: f64,
    pub ensemble_size: usize,
    pub params_tried: usize,
    pub peak_bags: usize,
}

pub const RESULTS_HEADER: &str =
    "dataset,variant,resample,accuracy,build_seconds,ensemble_size,params_tried,peak_bags";
pub const SUMMARY_HEADER: &str =
    "dataset,variant,resamples_completed,mean_accuracy,stdev_accuracy,total_build_seconds";

impl ResultRecord {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.dataset,
            self.variant,
            self.resample,
            self.accuracy,
            self.build_seconds,
            self.ensemble_size,
            self.params_tried,
            self.peak_bags
        )
    }
}

fn load_source(cfg: &ExperimentConfig) -> Result<(LabeledDataset, String)> {
    match &cfg.source {
        DatasetSource::File(path) => {
            let text = fs::read_to_string(path)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().replace(',', "_"))
                .unwrap_or_else(|| "dataset".into());
            Ok((parse_dataset(&text)?, name))
        }
        DatasetSource::Synthetic(spec) => {
            Ok((generate_synthetic(spec, cfg.base_seed)?, "synthetic".into()))
        }
    }
}

/// Fraction of test instances the model labels correctly.
pub fn test_accuracy(model: &EnsembleModel, test: &LabeledDataset) -> Result<f64> {
    let mut correct = 0usize;
    for (series, label) in test.iter() {
        let (predicted, _) = predict_ensemble(model, series)?;
        if predicted == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

fn checkpoint_settings_for(
    cfg: &ExperimentConfig,
    resample: usize,
) -> Option<CheckpointSettings> {
    cfg.checkpoint.as_ref().map(|(stem, every)| {
        let mut name = stem.as_os_str().to_os_string();
        name.push(format!(".r{resample}"));
        CheckpointSettings {
            path: PathBuf::from(name),
            interval: CheckpointInterval::Members(*every.max(&1)),
        }
    })
}

/// Builds the configured classifier for one resample, resuming from an
/// existing checkpoint when one matches the split's train data.
fn build_for_resample(
    cfg: &ExperimentConfig,
    split: &ResampleSplit,
) -> Result<EnsembleModel> {
    match resolve_variant(cfg.variant, &cfg.overrides, split.seed)? {
        ClassifierConfig::Grid { retention } => Ok(build_grid_boss(&split.train, retention)?),
        ClassifierConfig::Randomized(mut rboss_cfg) => {
            let settings = checkpoint_settings_for(cfg, split.resample_index);
            if let Some(settings) = &settings {
                if let Ok(state) = load_checkpoint(&settings.path) {
                    if state.fingerprint.matches(&split.train) {
                        return Ok(resume_build_with(
                            &split.train,
                            state,
                            Some(settings.clone()),
                        )?);
                    }
                }
                rboss_cfg.checkpoint = Some(settings.clone());
            }
            Ok(build_rboss(&split.train, rboss_cfg)?)
        }
    }
}

/// Runs every resample with the supplied builder, writing results, split
/// indices, errors and the summary under the output directory.
fn run_resamples<F>(
    cfg: &ExperimentConfig,
    data: &LabeledDataset,
    dataset_name: &str,
    variant_name: &str,
    mut build: F,
) -> Result<Vec<ResultRecord>>
where
    F: FnMut(&ResampleSplit) -> Result<EnsembleModel>,
{
    if cfg.resamples == 0 {
        return Err(CliError::Usage("need at least one resample".into()));
    }
    fs::create_dir_all(&cfg.out_dir)?;

    let results_path = cfg
        .out_dir
        .join(format!("results_{variant_name}.csv"));
    let mut results_file = fs::File::create(&results_path)?;
    writeln!(results_file, "{RESULTS_HEADER}")?;

    let mut splits_file = fs::File::create(cfg.out_dir.join("splits.csv"))?;
    writeln!(splits_file, "resample,train_indices")?;

    let errors_path = cfg.out_dir.join("errors.log");
    let mut records = Vec::new();

    for r in 0..cfg.resamples {
        let seed = cfg.base_seed.wrapping_add(r as u64);
        let mut split = stratified_resample(data, cfg.train_fraction, seed)?;
        split.resample_index = r;

        let indices: Vec<String> = split.train_indices.iter().map(usize::to_string).collect();
        writeln!(splits_file, "{r},{}", indices.join(" "))?;

        let build_started = Instant::now();
        let model = match build(&split) {
            Ok(model) => model,
            Err(e) => {
                let mut errors = fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&errors_path)?;
                writeln!(errors, "{dataset_name},{variant_name},{r},{e}")?;
                continue;
            }
        };
        let build_seconds = build_started.elapsed().as_secs_f64();

        let record = ResultRecord {
            dataset: dataset_name.to_string(),
            variant: variant_name.to_string(),
            resample: r,
            accuracy: test_accuracy(&model, &split.test)?,
            build_seconds,
            ensemble_size: model.ensemble_size(),
            params_tried: model.metadata.params_tried,
            peak_bags: model.metadata.peak_bag_count,
        };
        writeln!(results_file, "{}", record.csv_row())?;
        results_file.flush()?;
        records.push(record);
    }

    write_summary(&cfg.out_dir, dataset_name, variant_name, &records)?;
    Ok(records)
}

fn write_summary(
    out_dir: &Path,
    dataset_name: &str,
    variant_name: &str,
    records: &[ResultRecord],
) -> Result<()> {
    let path = out_dir.join("summary.csv");
    let fresh = !path.exists();
    let mut file = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "{SUMMARY_HEADER}")?;
    }
    let n = records.len();
    let (mean, stdev) = if n == 0 {
        (0.0, 0.0)
    } else {
        let mean = records.iter().map(|r| r.accuracy).sum::<f64>() / n as f64;
        let stdev = if n < 2 {
            0.0
        } else {
            let ss: f64 = records
                .iter()
                .map(|r| (r.accuracy - mean) * (r.accuracy - mean))
                .sum();
            (ss / (n as f64 - 1.0)).sqrt()
        };
        (mean, stdev)
    };
    let total_build: f64 = records.iter().map(|r| r.build_seconds).sum();
    writeln!(
        file,
        "{dataset_name},{variant_name},{n},{mean},{stdev},{total_build}"
    )?;
    Ok(())
}

/// Loads the dataset and evaluates the configured variant over the
/// experiment's resamples.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "train fraction {} outside (0, 1)",
            cfg.train_fraction
        )));
    }
    // Surface configuration errors before any build runs.
    resolve_variant(cfg.variant, &cfg.overrides, cfg.base_seed)?;
    let (data, dataset_name) = load_source(cfg)?;
    let variant_name = cfg.variant.name().to_string();
    run_resamples(cfg, &data, &dataset_name, &variant_name, |split| {
        build_for_resample(cfg, split)
    })
}
