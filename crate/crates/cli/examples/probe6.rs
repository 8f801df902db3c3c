use rand::SeedableRng;
use rboss::ensemble::{build_rboss, predict_ensemble, RbossConfig};
use rboss_cli::{generate_synthetic, SyntheticSpec};

fn main() {
    for (noise, counts) in [(0.5f64, vec![1usize, 4]), (0.4, vec![1, 4]), (0.3, vec![1, 4]), (0.5, vec![0, 4]), (0.4, vec![2, 6])] {
        let spec = |n: usize, seed: u64| {
            let s = SyntheticSpec {
                class_count: 2,
                instances_per_class: n,
                series_length: 256,
                pattern_length: 16,
                occurrence_counts: counts.clone(),
                noise_sigma: noise,
            };
            generate_synthetic(&s, seed).unwrap()
        };
        print!("noise={noise} counts={counts:?}: ");
        for k in [50usize, 100, 200, 400] {
            let mut mean = 0.0;
            let seeds = 6u64;
            for seed in 0..seeds {
                let train = spec(50, 100 + seed);
                let test = spec(30, 200 + seed);
                let model = build_rboss(&train, RbossConfig::fixed_size(k, seed)).unwrap();
                let mut correct = 0;
                for (s, y) in test.iter() {
                    if predict_ensemble(&model, s).unwrap().0 == y { correct += 1; }
                }
                mean += correct as f64 / test.len() as f64 / seeds as f64;
            }
            print!("k={k}:{mean:.3} ");
        }
        println!();
    }
    let _ = rand_chacha::ChaCha8Rng::seed_from_u64(0);
}
