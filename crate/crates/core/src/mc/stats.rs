use rand::Rng;

use crate::rng::{stream_rng, Stream};

/// Percentile bootstrap confidence interval for the mean of paired
/// differences `a[i] - b[i]`.
pub fn paired_bootstrap_ci(a: &[f64], b: &[f64], resamples: usize, level: f64, seed: u64) -> (f64, f64) {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    assert!(!a.is_empty(), "bootstrap needs at least one pair");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len();
    let mut rng = stream_rng(seed, 0, Stream::Bootstrap);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| diffs[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(|x, y| x.total_cmp(y));
    let alpha = (1.0 - level) / 2.0;
    let lo = ((alpha * resamples as f64).floor() as usize).min(resamples - 1);
    let hi = (((1.0 - alpha) * resamples as f64).ceil() as usize)
        .saturating_sub(1)
        .min(resamples - 1);
    (means[lo], means[hi])
}
