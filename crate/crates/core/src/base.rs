//! A single BOSS base classifier: fitted breakpoints plus one word
//! histogram per train instance, classified by 1-nearest-neighbour under
//! the asymmetric BOSS distance, with full or subsampled leave-one-out
//! accuracy estimates.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::sfa::{bag_of_words, fit_mcb, Breakpoints, SfaParameters, WordHistogram};

/// A fitted BOSS base classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseBossModel {
    params: SfaParameters,
    breakpoints: Breakpoints,
    train_bags: Vec<WordHistogram>,
    train_labels: Vec<usize>,
    class_count: usize,
    series_length: usize,
}

impl BaseBossModel {
    /// Reassembles a model from stored parts, validating alignment.
    pub fn from_parts(
        params: SfaParameters,
        breakpoints: Breakpoints,
        train_bags: Vec<WordHistogram>,
        train_labels: Vec<usize>,
        class_count: usize,
        series_length: usize,
    ) -> Result<Self> {
        params.validate_for_series_length(series_length)?;
        if breakpoints.word_length() != params.word_length
            || breakpoints.alphabet_size() != params.alphabet_size
        {
            return Err(Error::Parameter(
                "breakpoints shape does not match parameters".into(),
            ));
        }
        if train_bags.is_empty() || train_bags.len() != train_labels.len() {
            return Err(Error::Parameter(format!(
                "{} bags but {} labels",
                train_bags.len(),
                train_labels.len()
            )));
        }
        if let Some(&y) = train_labels.iter().find(|&&y| y >= class_count) {
            return Err(Error::Parameter(format!(
                "label {y} outside [0, {class_count})"
            )));
        }
        Ok(Self {
            params,
            breakpoints,
            train_bags,
            train_labels,
            class_count,
            series_length,
        })
    }

    pub fn params(&self) -> &SfaParameters {
        &self.params
    }

    pub fn breakpoints(&self) -> &Breakpoints {
        &self.breakpoints
    }

    pub fn train_bags(&self) -> &[WordHistogram] {
        &self.train_bags
    }

    pub fn train_labels(&self) -> &[usize] {
        &self.train_labels
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn train_size(&self) -> usize {
        self.train_bags.len()
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }
}

/// Fits breakpoints on the train data and transforms every train instance
/// into its word histogram.
pub fn build_base_boss(train: &LabeledDataset, params: &SfaParameters) -> Result<BaseBossModel> {
    params.validate_for_series_length(train.series_length())?;
    let breakpoints = fit_mcb(train, params)?;
    let mut train_bags = Vec::with_capacity(train.len());
    for (series, _) in train.iter() {
        train_bags.push(bag_of_words(series, params, &breakpoints)?);
    }
    Ok(BaseBossModel {
        params: *params,
        breakpoints,
        train_bags,
        train_labels: train.labels().to_vec(),
        class_count: train.class_count(),
        series_length: train.series_length(),
    })
}

/// Exact integer form of the BOSS distance; counts are small enough that
/// the sum is exact and independent of iteration order.
pub(crate) fn boss_distance_exact(a: &WordHistogram, b: &WordHistogram) -> u64 {
    let mut sum = 0u64;
    for (word, count) in a.iter() {
        let diff = count as i64 - b.count(word) as i64;
        sum += (diff * diff) as u64;
    }
    sum
}

/// Same as [`boss_distance_exact`] but stops accumulating once the sum
/// exceeds `bound`; any returned value above `bound` means "not closer".
fn boss_distance_bounded(a: &WordHistogram, b: &WordHistogram, bound: u64) -> u64 {
    let mut sum = 0u64;
    for (word, count) in a.iter() {
        let diff = count as i64 - b.count(word) as i64;
        sum += (diff * diff) as u64;
        if sum > bound {
            return sum;
        }
    }
    sum
}

/// The asymmetric BOSS distance: the squared count differences summed over
/// the words present in `a` only.
pub fn boss_distance(a: &WordHistogram, b: &WordHistogram) -> f64 {
    boss_distance_exact(a, b) as f64
}

/// Index of the nearest train bag to `query` (the query is always the
/// first distance argument). Ties resolve to the lowest index; `skip`
/// excludes one bag from the pool.
fn nearest_index(model: &BaseBossModel, query: &WordHistogram, skip: Option<usize>) -> usize {
    let mut best = usize::MAX;
    let mut best_distance = u64::MAX;
    for (i, bag) in model.train_bags.iter().enumerate() {
        if skip == Some(i) {
            continue;
        }
        let d = boss_distance_bounded(query, bag, best_distance);
        if d < best_distance || best == usize::MAX {
            best_distance = d;
            best = i;
        }
    }
    best
}

fn one_hot(label: usize, class_count: usize) -> Vec<f64> {
    let mut probabilities = vec![0.0; class_count];
    probabilities[label] = 1.0;
    probabilities
}

/// Classifies a new series by 1-NN over the train histograms, returning
/// the winning label and its one-hot probability vector.
pub fn predict_1nn(model: &BaseBossModel, series: &[f64]) -> Result<(usize, Vec<f64>)> {
    if series.len() != model.series_length {
        return Err(Error::Parameter(format!(
            "series length {} does not match training length {}",
            series.len(),
            model.series_length
        )));
    }
    let query = bag_of_words(series, &model.params, &model.breakpoints)?;
    let nearest = nearest_index(model, &query, None);
    let label = model.train_labels[nearest];
    Ok((label, one_hot(label, model.class_count)))
}

/// Train-accuracy estimate with per-instance probability vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainEstimate {
    pub accuracy: f64,
    /// `(train index, probability vector)` for each evaluated instance,
    /// ascending by index.
    pub per_instance_distributions: Vec<(usize, Vec<f64>)>,
    pub evaluated_count: usize,
}

fn evaluate_loocv_at(model: &BaseBossModel, instances: &[usize]) -> Result<TrainEstimate> {
    if model.train_size() < 2 {
        return Err(Error::Estimate(
            "leave-one-out needs at least 2 train instances".into(),
        ));
    }
    let mut correct = 0usize;
    let mut per_instance = Vec::with_capacity(instances.len());
    for &i in instances {
        let nearest = nearest_index(model, &model.train_bags[i], Some(i));
        let predicted = model.train_labels[nearest];
        if predicted == model.train_labels[i] {
            correct += 1;
        }
        per_instance.push((i, one_hot(predicted, model.class_count)));
    }
    Ok(TrainEstimate {
        accuracy: correct as f64 / instances.len() as f64,
        evaluated_count: instances.len(),
        per_instance_distributions: per_instance,
    })
}

/// Leave-one-out estimate over every train instance. The fitted
/// breakpoints stay fixed; only the held-out bag leaves the neighbour
/// pool.
pub fn loocv_estimate(model: &BaseBossModel) -> Result<TrainEstimate> {
    let all: Vec<usize> = (0..model.train_size()).collect();
    evaluate_loocv_at(model, &all)
}

/// Leave-one-out estimate restricted to a seeded sample of at most
/// `per_class_cap` instances per class; each is still compared against all
/// other train bags.
pub fn fast_loocv_estimate(
    model: &BaseBossModel,
    per_class_cap: usize,
    seed: u64,
) -> Result<TrainEstimate> {
    if per_class_cap == 0 {
        return Err(Error::Estimate("per-class cap must be at least 1".into()));
    }
    let mut groups = vec![Vec::new(); model.class_count];
    for (i, &y) in model.train_labels.iter().enumerate() {
        groups[y].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::new();
    for group in &groups {
        if group.len() <= per_class_cap {
            chosen.extend_from_slice(group);
        } else {
            let mut shuffled = group.clone();
            shuffled.shuffle(&mut rng);
            chosen.extend_from_slice(&shuffled[..per_class_cap]);
        }
    }
    chosen.sort_unstable();
    evaluate_loocv_at(model, &chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfa::Word;

    fn wave_dataset(n: usize, m: usize, classes: usize) -> LabeledDataset {
        let series: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let class = i % classes;
                (0..m)
                    .map(|t| {
                        let freq = 0.25 + 0.45 * class as f64;
                        (t as f64 * freq).sin() + 0.01 * (i as f64) * (t as f64 * 1.7).cos()
                    })
                    .collect()
            })
            .collect();
        let labels = (0..n).map(|i| i % classes).collect();
        LabeledDataset::new(series, labels, classes).unwrap()
    }

    fn histogram(entries: &[(&[u8], u32)]) -> WordHistogram {
        WordHistogram::from_entries(
            entries
                .iter()
                .map(|&(symbols, count)| (Word::from_symbols(symbols, 4), count)),
        )
        .unwrap()
    }

    #[test]
    fn build_single_instance() {
        let data = wave_dataset(1, 30, 1);
        let params = SfaParameters::new(6, 4, 12, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        assert_eq!(model.train_size(), 1);
    }

    #[test]
    fn build_identical_series_identical_bags() {
        let row: Vec<f64> = (0..25).map(|t| (t as f64 * 0.4).sin()).collect();
        let data = LabeledDataset::new(vec![row.clone(), row], vec![0, 0], 1).unwrap();
        let params = SfaParameters::new(8, 4, 10, false).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        assert_eq!(model.train_bags()[0], model.train_bags()[1]);
    }

    #[test]
    fn build_words_fit_sixteen_bits() {
        let data = wave_dataset(4, 40, 2);
        let params = SfaParameters::new(8, 4, 20, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        for bag in model.train_bags() {
            for (word, _) in bag.iter() {
                assert!(word.packed() < 1 << 16);
            }
        }
    }

    #[test]
    fn distance_asymmetry_example() {
        // a = {ab: 2, ba: 1}, b = {ab: 1, cc: 5}
        let a = histogram(&[(&[0, 1], 2), (&[1, 0], 1)]);
        let b = histogram(&[(&[0, 1], 1), (&[2, 2], 5)]);
        assert_eq!(boss_distance(&a, &b), 2.0);
        assert_eq!(boss_distance(&b, &a), 26.0);
    }

    #[test]
    fn distance_identity_and_empty() {
        let a = histogram(&[(&[0, 1], 2), (&[1, 0], 1)]);
        assert_eq!(boss_distance(&a, &a), 0.0);
        let empty = WordHistogram::new();
        assert_eq!(boss_distance(&empty, &a), 0.0);
    }

    #[test]
    fn predict_self_match() {
        let data = wave_dataset(6, 40, 2);
        let params = SfaParameters::new(8, 4, 16, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        let (label, probs) = predict_1nn(&model, data.series(2)).unwrap();
        assert_eq!(label, data.label(2));
        assert_eq!(probs.iter().sum::<f64>(), 1.0);
        assert_eq!(probs[label], 1.0);
    }

    #[test]
    fn predict_tie_takes_lowest_index() {
        let row: Vec<f64> = (0..20).map(|t| (t as f64 * 0.6).sin()).collect();
        // Two identical train series with different labels tie at distance 0.
        let data =
            LabeledDataset::new(vec![row.clone(), row.clone()], vec![1, 0], 2).unwrap();
        let params = SfaParameters::new(6, 4, 10, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        let (label, _) = predict_1nn(&model, &row).unwrap();
        assert_eq!(label, 1, "lowest train index wins the tie");
    }

    #[test]
    fn predict_rejects_length_mismatch() {
        let data = wave_dataset(3, 30, 1);
        let params = SfaParameters::new(6, 4, 10, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        assert!(matches!(
            predict_1nn(&model, &vec![0.0; 29]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn loocv_separable_pairs() {
        // Two identical twins per class, classes far apart: every held-out
        // instance finds its twin.
        let low: Vec<f64> = (0..30).map(|t| (t as f64 * 0.2).sin()).collect();
        let high: Vec<f64> = (0..30).map(|t| (t as f64 * 1.4).sin()).collect();
        let data = LabeledDataset::new(
            vec![low.clone(), low, high.clone(), high],
            vec![0, 0, 1, 1],
            2,
        )
        .unwrap();
        let params = SfaParameters::new(8, 4, 12, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        let estimate = loocv_estimate(&model).unwrap();
        assert_eq!(estimate.accuracy, 1.0);
        assert_eq!(estimate.evaluated_count, 4);
        for (_, probs) in &estimate.per_instance_distributions {
            assert_eq!(probs.iter().sum::<f64>(), 1.0);
            assert!(probs.iter().all(|&p| p == 0.0 || p == 1.0));
        }
    }

    #[test]
    fn loocv_two_instances_forced_miss() {
        let data = wave_dataset(2, 30, 2);
        let params = SfaParameters::new(6, 4, 12, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        let estimate = loocv_estimate(&model).unwrap();
        assert_eq!(estimate.accuracy, 0.0);
    }

    #[test]
    fn loocv_needs_two_instances() {
        let data = wave_dataset(1, 30, 1);
        let params = SfaParameters::new(6, 4, 12, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        assert!(matches!(loocv_estimate(&model), Err(Error::Estimate(_))));
    }

    #[test]
    fn loocv_matches_rebuilt_neighbour_pools() {
        // Replay each fold as an explicit model that keeps the fitted
        // breakpoints but drops the held-out bag from the pool.
        let data = wave_dataset(10, 36, 2);
        let params = SfaParameters::new(8, 4, 14, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        let estimate = loocv_estimate(&model).unwrap();
        for (i, probs) in &estimate.per_instance_distributions {
            let bags: Vec<WordHistogram> = (0..data.len())
                .filter(|j| j != i)
                .map(|j| model.train_bags()[j].clone())
                .collect();
            let labels: Vec<usize> = (0..data.len())
                .filter(|j| j != i)
                .map(|j| data.label(j))
                .collect();
            let reduced = BaseBossModel::from_parts(
                params,
                model.breakpoints().clone(),
                bags,
                labels,
                2,
                data.series_length(),
            )
            .unwrap();
            let (label, _) = predict_1nn(&reduced, data.series(*i)).unwrap();
            assert_eq!(probs[label], 1.0, "fold {i} disagrees with replay");
        }
    }

    #[test]
    fn fast_loocv_non_binding_cap_matches_full() {
        let data = wave_dataset(12, 36, 3);
        let params = SfaParameters::new(6, 4, 12, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        let full = loocv_estimate(&model).unwrap();
        let fast = fast_loocv_estimate(&model, 100, 9).unwrap();
        assert_eq!(full, fast);
    }

    #[test]
    fn fast_loocv_counts_capped_per_class() {
        let data = wave_dataset(30, 36, 2);
        let params = SfaParameters::new(6, 4, 12, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        let fast = fast_loocv_estimate(&model, 5, 1).unwrap();
        assert_eq!(fast.evaluated_count, 10);
    }

    #[test]
    fn fast_loocv_deterministic() {
        let data = wave_dataset(20, 36, 2);
        let params = SfaParameters::new(6, 4, 12, true).unwrap();
        let model = build_base_boss(&data, &params).unwrap();
        let a = fast_loocv_estimate(&model, 4, 77).unwrap();
        let b = fast_loocv_estimate(&model, 4, 77).unwrap();
        assert_eq!(a, b);
    }
}
