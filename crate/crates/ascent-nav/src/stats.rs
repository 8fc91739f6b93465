//! Order statistics and a paired bootstrap for run-level metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Median (mean of the two middle values for even counts); NaN when empty.
/// Infinite entries are ordered normally.
pub fn median(values: &[f64]) -> f64 {
    percentile(values, 50.0)
}

/// Linear-interpolation percentile `p` in [0, 100]; NaN when empty.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let v = sorted(values);
    let pos = (p / 100.0).clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi || v[lo] == v[hi] {
        return v[lo];
    }
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Mean of the finite entries; NaN when there are none.
pub fn finite_mean(values: &[f64]) -> f64 {
    let (s, n) = values.iter().filter(|v| v.is_finite()).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Fraction of paired bootstrap resamples (runs drawn with replacement, the
/// same indices for both samples) in which `median(a) < median(b)`, or `<=`
/// when `strict` is false.
pub fn bootstrap_median_confidence(a: &[f64], b: &[f64], strict: bool, resamples: usize, seed: u64) -> f64 {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    if a.is_empty() || resamples == 0 {
        return f64::NAN;
    }
    let n = a.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ra = vec![0.0; n];
    let mut rb = vec![0.0; n];
    let mut wins = 0usize;
    for _ in 0..resamples {
        for i in 0..n {
            let j = rng.random_range(0..n);
            ra[i] = a[j];
            rb[i] = b[j];
        }
        let (ma, mb) = (median(&ra), median(&rb));
        if ma < mb || (!strict && ma == mb) {
            wins += 1;
        }
    }
    wins as f64 / resamples as f64
}
