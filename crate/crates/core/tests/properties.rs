//! Cross-module invariants: transform equivalence against a naive
//! reference, distance equivalence against a dense reference, and
//! structural properties of splits, words and histograms.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rboss::data::{
    parse_dataset, serialize_dataset, stratified_resample, subsample, z_normalize,
    LabeledDataset, SubsamplePolicy, STD_EPSILON,
};
use rboss::ensemble::{AccuracyFilteredPool, PoolAction};
use rboss::sfa::{bag_of_words, fit_mcb, SfaParameters, Word, WordHistogram};
use rboss::{boss_distance, Breakpoints};

// --- naive transform reference -------------------------------------------

/// Reference z-normalization, spelled the same way as the library's so the
/// floating-point results agree bit-for-bit.
fn reference_znorm(series: &[f64]) -> Vec<f64> {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd < STD_EPSILON {
        vec![0.0; series.len()]
    } else {
        series.iter().map(|&x| (x - mean) / sd).collect()
    }
}

/// Full O(w^2) DFT of one window: every coefficient, computed from the
/// textbook sum.
fn reference_full_dft(window: &[f64]) -> Vec<(f64, f64)> {
    let w = window.len();
    (0..w)
        .map(|k| {
            let mut re = 0.0f64;
            let mut im = 0.0f64;
            for (j, &x) in window.iter().enumerate() {
                let angle = -std::f64::consts::TAU * (j * k) as f64 / w as f64;
                re += x * angle.cos();
                im += x * angle.sin();
            }
            (re, im)
        })
        .collect()
}

/// Reference bag-of-words built from the full DFT, re-deriving every word
/// independently of the library's truncated transform.
fn reference_bag(
    series: &[f64],
    params: &SfaParameters,
    breakpoints: &Breakpoints,
) -> std::collections::BTreeMap<Vec<u8>, u32> {
    let w = params.window_length;
    let first = usize::from(params.normalize);
    let mut histogram = std::collections::BTreeMap::new();
    let mut previous: Option<Vec<u8>> = None;
    for window in series.windows(w) {
        let window = if params.normalize {
            reference_znorm(window)
        } else {
            window.to_vec()
        };
        let full = reference_full_dft(&window);
        let mut symbols = Vec::with_capacity(params.word_length);
        for c in 0..params.word_length / 2 {
            let (re, im) = full[first + c];
            for (pos, v) in [(2 * c, re), (2 * c + 1, im)] {
                let row = &breakpoints.rows()[pos];
                symbols.push(row.iter().take_while(|&&t| t < v).count() as u8);
            }
        }
        if previous.as_ref() != Some(&symbols) {
            *histogram.entry(symbols.clone()).or_insert(0) += 1;
        }
        previous = Some(symbols);
    }
    histogram
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, m: usize) -> LabeledDataset {
    let series: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let style = rng.random_range(0..3);
            (0..m)
                .map(|t| match style {
                    0 => rng.random_range(-1.0..1.0),
                    1 => (t as f64 * rng.random_range(0.1..1.5)).sin(),
                    _ => {
                        // Plateaus provoke zero-variance windows and
                        // numerosity reduction.
                        if t % 7 < 4 {
                            1.0
                        } else {
                            rng.random_range(-0.5..0.5)
                        }
                    }
                })
                .collect()
        })
        .collect();
    let labels = (0..n).map(|i| i % 2).collect();
    LabeledDataset::new(series, labels, 2).unwrap()
}

#[test]
fn bag_of_words_matches_naive_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5fa);
    for case in 0..60 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(12..=48);
        let data = random_dataset(&mut rng, n, m);
        let normalize = rng.random_bool(0.5);
        let max_l = if normalize { m.min(18) - 2 } else { m.min(16) };
        let l = 2 * rng.random_range(2..=(max_l / 2).min(8));
        let w_min = if normalize { l + 2 } else { l };
        let w = rng.random_range(w_min..=m);
        let params = SfaParameters::new(l, 4, w, normalize).unwrap();

        let bp = fit_mcb(&data, &params).unwrap();
        for i in 0..data.len() {
            let bag = bag_of_words(data.series(i), &params, &bp).unwrap();
            let expected = reference_bag(data.series(i), &params, &bp);
            let mut actual = std::collections::BTreeMap::new();
            for (word, count) in bag.iter() {
                actual.insert(word.symbols(l, 4), count);
            }
            assert_eq!(actual, expected, "case {case}, series {i}, params {params:?}");
        }
    }
}

// --- dense distance reference --------------------------------------------

#[test]
fn boss_distance_matches_dense_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd157);
    let word_length = 4;
    let universe = 4usize.pow(word_length as u32);
    for _ in 0..300 {
        let mut dense_a = vec![0u32; universe];
        let mut dense_b = vec![0u32; universe];
        for _ in 0..rng.random_range(0..40) {
            dense_a[rng.random_range(0..universe)] = rng.random_range(1..9);
        }
        for _ in 0..rng.random_range(0..40) {
            dense_b[rng.random_range(0..universe)] = rng.random_range(1..9);
        }
        let sparse = |dense: &[u32]| {
            WordHistogram::from_entries(
                dense
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(i, &c)| (Word::from_packed(i as u64), c)),
            )
            .unwrap()
        };
        let a = sparse(&dense_a);
        let b = sparse(&dense_b);
        let expected: u64 = dense_a
            .iter()
            .zip(&dense_b)
            .filter(|(&ca, _)| ca > 0)
            .map(|(&ca, &cb)| {
                let d = ca as i64 - cb as i64;
                (d * d) as u64
            })
            .sum();
        assert_eq!(boss_distance(&a, &b), expected as f64);
    }
}

// --- filtered pool vs direct selection ------------------------------------

fn top_s_earliest_ties(accuracies: &[f64], capacity: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..accuracies.len()).collect();
    order.sort_by(|&a, &b| accuracies[b].total_cmp(&accuracies[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = order.into_iter().take(capacity).collect();
    kept.sort_unstable();
    kept
}

#[test]
fn filtered_pool_equals_direct_top_selection() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf1f7);
    for _ in 0..200 {
        let len = rng.random_range(1..40);
        let capacity = rng.random_range(1..8);
        // Draw from a coarse grid so ties are common.
        let accuracies: Vec<f64> = (0..len)
            .map(|_| rng.random_range(0..=4) as f64 / 4.0)
            .collect();
        let mut pool = AccuracyFilteredPool::new(capacity);
        for (ordinal, &acc) in accuracies.iter().enumerate() {
            let action = pool.offer(acc, ordinal);
            if ordinal < capacity {
                assert_eq!(action, PoolAction::Appended);
            }
        }
        let mut kept: Vec<usize> = pool.entries().iter().map(|e| e.1).collect();
        kept.sort_unstable();
        assert_eq!(kept, top_s_earliest_ties(&accuracies, capacity));
    }
}

// --- proptest invariants ---------------------------------------------------

proptest! {
    #[test]
    fn znorm_standardizes(values in prop::collection::vec(-1e3f64..1e3, 2..64)) {
        let out = z_normalize(&values);
        let n = out.len() as f64;
        let mean_in = values.iter().sum::<f64>() / n;
        let sd_in = (values.iter().map(|&x| (x - mean_in) * (x - mean_in)).sum::<f64>() / n).sqrt();
        let mean = out.iter().sum::<f64>() / n;
        let sd = (out.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
        if sd_in >= STD_EPSILON {
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((sd - 1.0).abs() < 1e-9);
        } else {
            prop_assert!(out.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn word_roundtrip(symbols in prop::collection::vec(0u8..8, 1..=16), alphabet in 8usize..=10) {
        let word = Word::from_symbols(&symbols, alphabet);
        prop_assert_eq!(word.symbols(symbols.len(), alphabet), symbols);
    }

    #[test]
    fn word_roundtrip_alpha4(symbols in prop::collection::vec(0u8..4, 1..=16)) {
        let word = Word::from_symbols(&symbols, 4);
        prop_assert_eq!(word.symbols(symbols.len(), 4), symbols.clone());
        // Packing is injective: different symbols give different values.
        let mut other = symbols.clone();
        other[0] = (other[0] + 1) % 4;
        prop_assert_ne!(Word::from_symbols(&other, 4), word);
    }

    #[test]
    fn resample_is_a_partition(
        class_sizes in prop::collection::vec(2usize..8, 2..4),
        fraction in 0.2f64..0.8,
        seed in any::<u64>(),
    ) {
        let mut series = Vec::new();
        let mut labels = Vec::new();
        for (c, &size) in class_sizes.iter().enumerate() {
            for i in 0..size {
                series.push(vec![c as f64, i as f64, 0.0]);
                labels.push(c);
            }
        }
        let n = series.len();
        let data = LabeledDataset::new(series, labels, class_sizes.len()).unwrap();
        let split = stratified_resample(&data, fraction, seed).unwrap();

        let mut all: Vec<usize> = split.train_indices.iter().chain(&split.test_indices).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());

        // Train class counts stay within one instance of the exact fraction.
        let sizes = split.train.class_sizes();
        for (c, &size) in class_sizes.iter().enumerate() {
            let ideal = fraction * size as f64;
            prop_assert!((sizes[c] as f64 - ideal).abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn subsample_indices_are_sound(
        n_per_class in 2usize..30,
        fraction in 0.1f64..1.0,
        seed in any::<u64>(),
    ) {
        let n = 2 * n_per_class;
        let series: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, 1.0]).collect();
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let data = LabeledDataset::new(series, labels, 2).unwrap();
        let (selected, indices) = subsample(&data, SubsamplePolicy::Fraction(fraction), seed).unwrap();

        prop_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(indices.iter().all(|&i| i < n));
        prop_assert_eq!(indices.len(), selected.len());
        for (pos, &src) in indices.iter().enumerate() {
            prop_assert_eq!(selected.series(pos), data.series(src));
            prop_assert_eq!(selected.label(pos), data.label(src));
        }
    }

    #[test]
    fn parse_serialize_parse_is_identity(
        rows in prop::collection::vec(
            (0usize..3, prop::collection::vec(-1e6f64..1e6, 4)),
            1..12,
        ),
    ) {
        let text: String = rows
            .iter()
            .map(|(y, vs)| {
                let values: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                format!("{y},{}\n", values.join(","))
            })
            .collect();
        let parsed = parse_dataset(&text).unwrap();
        let reparsed = parse_dataset(&serialize_dataset(&parsed)).unwrap();
        prop_assert_eq!(parsed, reparsed);
    }

    #[test]
    fn histogram_total_bounded(seed in any::<u64>(), w in 6usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(w.max(8)..60);
        let data = random_dataset(&mut rng, 2, m);
        let params = SfaParameters::new(4, 4, w.min(m), false).unwrap();
        let bp = fit_mcb(&data, &params).unwrap();
        for i in 0..data.len() {
            let bag = bag_of_words(data.series(i), &params, &bp).unwrap();
            prop_assert!(bag.total() <= (m - params.window_length + 1) as u64);
        }
    }
}
