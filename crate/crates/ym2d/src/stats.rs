//! Small statistical helpers shared by the Monte-Carlo experiments.
//!
//! All estimators use batch means with 16 batches, which gives an
//! autocorrelation-robust standard error for Markov-chain output and reduces
//! to the usual `s/√N` behavior for independent draws.

use num_complex::Complex64;

/// Number of batches used by the batch-means estimators.
pub const N_BATCHES: usize = 16;

/// Batch-means estimate `(mean, stderr)` for real-valued samples.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let (m, e) = mean_stderr_complex_iter(values.iter().map(|&v| Complex64::new(v, 0.0)));
    (m.re, e)
}

/// Batch-means estimate `(mean, stderr)` for complex samples. The reported
/// standard error combines both components: `sqrt(var_re + var_im)` of the
/// mean estimator.
pub fn mean_stderr_complex(values: &[Complex64]) -> (Complex64, f64) {
    mean_stderr_complex_iter(values.iter().copied())
}

fn mean_stderr_complex_iter(values: impl ExactSizeIterator<Item = Complex64>) -> (Complex64, f64) {
    let values: Vec<Complex64> = values.collect();
    let n = values.len();
    assert!(n > 0, "cannot estimate from an empty sample");
    let mean = values.iter().sum::<Complex64>() / n as f64;
    if n < 2 * N_BATCHES {
        // Too few samples for batching: plain iid standard error.
        let var: f64 =
            values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n.max(2) - 1) as f64;
        return (mean, (var / n as f64).sqrt());
    }
    let b = N_BATCHES;
    let batch_len = n / b;
    let used = b * batch_len;
    let mut batch_means = Vec::with_capacity(b);
    for i in 0..b {
        let chunk = &values[i * batch_len..(i + 1) * batch_len];
        batch_means.push(chunk.iter().sum::<Complex64>() / batch_len as f64);
    }
    let grand = batch_means.iter().sum::<Complex64>() / b as f64;
    let mut var_re = 0.0;
    let mut var_im = 0.0;
    for bm in &batch_means {
        var_re += (bm.re - grand.re).powi(2);
        var_im += (bm.im - grand.im).powi(2);
    }
    var_re /= (b - 1) as f64 * b as f64;
    var_im /= (b - 1) as f64 * b as f64;
    let _ = used;
    (mean, (var_re + var_im).sqrt())
}

/// Two-sample comparison: the gap passes at `k` sigma when
/// `|a − b| < k·sqrt(ea² + eb²) + floor`.
pub fn gap_passes(a: Complex64, ea: f64, b: Complex64, eb: f64, k: f64, floor: f64) -> bool {
    (a - b).norm() < k * (ea * ea + eb * eb).sqrt() + floor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_stderr_matches_iid_scaling() {
        // Deterministic alternating sample: mean 0.5, sd 0.5.
        let values: Vec<f64> = (0..4096).map(|i| (i % 2) as f64).collect();
        let (m, e) = mean_stderr(&values);
        assert!((m - 0.5).abs() < 1e-12);
        // Batch means of a perfectly alternating series are all exactly 0.5,
        // so the stderr collapses to ~0 — the estimator is autocorrelation
        // aware, not a plain s/√N.
        assert!(e < 1e-12);
    }

    #[test]
    fn small_samples_fall_back_to_plain_stderr() {
        let values = vec![1.0, 2.0, 3.0, 4.0];
        let (m, e) = mean_stderr(&values);
        assert!((m - 2.5).abs() < 1e-12);
        let sd = (values.iter().map(|v| (v - 2.5f64).powi(2)).sum::<f64>() / 3.0).sqrt();
        assert!((e - sd / 2.0).abs() < 1e-12);
    }
}
