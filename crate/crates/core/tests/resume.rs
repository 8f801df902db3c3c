//! Determinism and checkpoint-resume equivalence for randomized builds.

use std::time::Duration;

use rboss::data::{LabeledDataset, SubsamplePolicy};
use rboss::ensemble::{
    build_rboss, CheckpointInterval, CheckpointSettings, EnsembleModel, EstimateMode,
    RbossBuilder, RbossConfig,
};
use rboss::{load_checkpoint, predict_ensemble, resume_build, save_checkpoint};

fn wave_dataset(n: usize, m: usize) -> LabeledDataset {
    let series: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let class = i % 2;
            (0..m)
                .map(|t| {
                    ((t as f64) * (0.25 + 0.55 * class as f64)).sin()
                        + 0.1 * ((t * 3 + i * 11) as f64).sin()
                })
                .collect()
        })
        .collect();
    let labels = (0..n).map(|i| i % 2).collect();
    LabeledDataset::new(series, labels, 2).unwrap()
}

fn filtered_cawpe_config(k: usize, seed: u64) -> RbossConfig {
    let mut cfg = RbossConfig::fixed_size(k, seed);
    cfg.max_ensemble_size = Some(3);
    cfg.estimate_mode = EstimateMode::FullLoocv;
    cfg.use_cawpe = true;
    cfg.subsample_policy = Some(SubsamplePolicy::Fraction(0.7));
    cfg
}

fn member_keys(model: &EnsembleModel) -> Vec<(usize, usize, Option<Vec<usize>>, f64)> {
    model
        .members
        .iter()
        .map(|m| {
            (
                m.param_id,
                m.ordinal,
                m.subsample_indices.clone(),
                m.weight,
            )
        })
        .collect()
}

fn predictions(model: &EnsembleModel, queries: &LabeledDataset) -> Vec<(usize, Vec<f64>)> {
    (0..queries.len())
        .map(|i| predict_ensemble(model, queries.series(i)).unwrap())
        .collect()
}

#[test]
fn interrupted_build_resumes_to_identical_model() {
    let train = wave_dataset(12, 48);
    let queries = wave_dataset(8, 48);
    let cfg = filtered_cawpe_config(6, 99);

    let uninterrupted = build_rboss(&train, cfg.clone()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("partial.rboss");
    let mut builder = RbossBuilder::new(&train, cfg).unwrap();
    for _ in 0..2 {
        assert!(builder.step().unwrap());
    }
    save_checkpoint(&builder.checkpoint_state(), &path).unwrap();
    drop(builder);

    let loaded = load_checkpoint(&path).unwrap();
    assert_eq!(loaded.members_built, 2);
    let resumed = resume_build(&train, loaded).unwrap();

    assert_eq!(member_keys(&resumed), member_keys(&uninterrupted));
    assert_eq!(resumed.metadata.params_tried, uninterrupted.metadata.params_tried);
    // Bit-for-bit identical test predictions.
    assert_eq!(
        predictions(&resumed, &queries),
        predictions(&uninterrupted, &queries)
    );
}

#[test]
fn checkpointing_during_build_allows_resume() {
    let train = wave_dataset(10, 40);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("auto.rboss");
    let mut cfg = filtered_cawpe_config(5, 4);
    cfg.checkpoint = Some(CheckpointSettings {
        path: path.clone(),
        interval: CheckpointInterval::Members(1),
    });

    let finished = build_rboss(&train, cfg.clone()).unwrap();
    // The last automatic checkpoint holds the completed loop; resuming it
    // reproduces the finished ensemble.
    let loaded = load_checkpoint(&path).unwrap();
    assert_eq!(loaded.members_built, finished.metadata.params_tried);
    let resumed = resume_build(&train, loaded).unwrap();
    assert_eq!(member_keys(&resumed), member_keys(&finished));
}

#[test]
fn contract_checkpoint_with_spent_budget_finalizes() {
    let train = wave_dataset(10, 40);
    let mut cfg = RbossConfig::contracted(Duration::from_secs(30), 8);
    cfg.contract_member_cap = 4;
    let mut builder = RbossBuilder::new(&train, cfg).unwrap();
    assert!(builder.step().unwrap());
    assert!(builder.step().unwrap());
    let mut state = builder.checkpoint_state();
    state.elapsed_seconds = 31.0; // budget already consumed
    let resumed = resume_build(&train, state).unwrap();
    assert_eq!(resumed.metadata.params_tried, 2);
    assert_eq!(resumed.ensemble_size(), 2);
}

#[test]
fn contract_resume_continues_into_remaining_budget() {
    let train = wave_dataset(10, 40);
    let mut cfg = RbossConfig::contracted(Duration::from_secs(60), 8);
    cfg.contract_member_cap = 5;
    let mut builder = RbossBuilder::new(&train, cfg).unwrap();
    assert!(builder.step().unwrap());
    let mut state = builder.checkpoint_state();
    state.elapsed_seconds = 1.0; // plenty of budget left
    let resumed = resume_build(&train, state).unwrap();
    // The member cap, not the budget, ends this build.
    assert_eq!(resumed.metadata.params_tried, 5);
}

#[test]
fn same_seed_same_members_different_seed_differs() {
    let train = wave_dataset(14, 60);
    let a = build_rboss(&train, RbossConfig::fixed_size(10, 5)).unwrap();
    let b = build_rboss(&train, RbossConfig::fixed_size(10, 5)).unwrap();
    let c = build_rboss(&train, RbossConfig::fixed_size(10, 6)).unwrap();
    let params = |m: &EnsembleModel| -> Vec<usize> {
        m.members.iter().map(|e| e.param_id).collect()
    };
    assert_eq!(params(&a), params(&b));
    assert_ne!(params(&a), params(&c));
}

#[test]
fn contract_member_sequence_is_prefix_of_size_driven_build() {
    let train = wave_dataset(10, 40);
    let sized = build_rboss(&train, RbossConfig::fixed_size(12, 3)).unwrap();
    let mut cfg = RbossConfig::contracted(Duration::from_secs(3600), 3);
    cfg.contract_member_cap = 4;
    let contracted = build_rboss(&train, cfg).unwrap();
    let sized_ids: Vec<usize> = sized.members.iter().map(|m| m.param_id).collect();
    let contract_ids: Vec<usize> = contracted.members.iter().map(|m| m.param_id).collect();
    assert_eq!(contract_ids.len(), 4);
    assert_eq!(&sized_ids[..4], &contract_ids[..]);
}
