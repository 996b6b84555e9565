//! Synthetic inputs shared by the criterion benches.

use frontier_core::Dataset;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` units with positive columns `x0..x{k-1}` and a dependent `y` in (0, 1)
/// driven by the first columns.
pub fn synthetic(n: usize, k: usize, seed: u64) -> (Dataset, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..k).map(|j| format!("x{j}")).collect();
    let mut cols: IndexMap<String, Vec<f64>> = IndexMap::new();
    for name in &names {
        cols.insert(name.clone(), (0..n).map(|_| rng.random_range(1.0..10.0)).collect());
    }
    let y = (0..n)
        .map(|i| {
            let eta = names.iter().enumerate().map(|(j, c)| cols[c][i] * 0.1 / (1.0 + j as f64)).sum::<f64>() - 0.8
                + rng.random_range(-0.5..0.5);
            1.0 / (1.0 + (-eta).exp())
        })
        .collect();
    cols.insert("y".into(), y);
    let ids = (0..n).map(|i| format!("U{i:03}")).collect();
    (Dataset::new(ids, None, cols, "bench").expect("valid"), names)
}
