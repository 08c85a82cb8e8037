//! Small statistics helpers for benchmark summaries and paired comparisons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n-1 denominator).
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}

/// One-sided bootstrap lower confidence bound for the mean: the `alpha`
/// quantile of the resampled-mean distribution. Deterministic in `seed`.
pub fn bootstrap_mean_lower(xs: &[f64], resamples: usize, alpha: f64, seed: u64) -> f64 {
    assert!(!xs.is_empty(), "bootstrap over an empty sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut total = 0.0;
        for _ in 0..xs.len() {
            total += xs[rng.random_range(0..xs.len())];
        }
        means.push(total / xs.len() as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((resamples as f64) * alpha).floor() as usize;
    means[rank.min(resamples - 1)]
}
