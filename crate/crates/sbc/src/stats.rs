//! Interval estimates used by the Monte Carlo engine.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::beta::beta_reg;

/// Default two-sided confidence level.
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

/// Exact (Clopper–Pearson) binomial interval for `hits` successes in `n`
/// trials at two-sided level `confidence`.
pub fn clopper_pearson(hits: u64, n: u64, confidence: f64) -> (f64, f64) {
    assert!(n > 0 && hits <= n, "need 0 <= hits <= n, n > 0");
    let alpha = 1.0 - confidence;
    let (x, nf) = (hits as f64, n as f64);
    let low = if hits == 0 { 0.0 } else { beta_quantile(alpha / 2.0, x, nf - x + 1.0) };
    let high = if hits == n { 1.0 } else { beta_quantile(1.0 - alpha / 2.0, x + 1.0, nf - x) };
    (low, high)
}

/// Inverse of the regularized incomplete beta function by bisection.
/// The CDF is monotone, so 100 halvings pin the quantile to machine precision.
fn beta_quantile(p: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Normal-theory interval from independent batch means, using the Student
/// t quantile with `batches - 1` degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatchInterval {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub batches: usize,
}

pub fn batch_interval(batch_means: &[f64], confidence: f64) -> BatchInterval {
    let m = batch_means.len();
    assert!(m >= 2, "need at least two batches");
    let mf = m as f64;
    let mean = batch_means.iter().sum::<f64>() / mf;
    let var = batch_means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (mf - 1.0);
    let t = StudentsT::new(0.0, 1.0, mf - 1.0)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5 + confidence / 2.0);
    let half = t * (var / mf).sqrt();
    BatchInterval { estimate: mean, ci_low: mean - half, ci_high: mean + half, batches: m }
}

/// Two-sample DKW tolerance: each empirical CDF is within
/// `sqrt(ln(4/α) / (2n))` of its law with probability `1 - α/2`.
pub fn dkw_two_sample_tolerance(n_a: usize, n_b: usize, confidence: f64) -> f64 {
    let alpha = 1.0 - confidence;
    let c = (4.0 / alpha).ln() / 2.0;
    (c / n_a as f64).sqrt() + (c / n_b as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_reference_values() {
        // scipy.stats.beta.ppf references
        let (lo, hi) = clopper_pearson(5, 20, 0.95);
        assert!((lo - 0.086_571_469_101_434_61).abs() < 1e-10, "{lo}");
        assert!((hi - 0.491_045_871_707_957_44).abs() < 1e-10, "{hi}");
        let (lo, hi) = clopper_pearson(0, 100, 0.99);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.051_604_029_624_103_99).abs() < 1e-10, "{hi}");
        let (lo, hi) = clopper_pearson(100, 100, 0.99);
        assert!((lo - (0.005f64).powf(0.01)).abs() < 1e-10);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn interval_brackets_point_estimate() {
        for n in [1u64, 7, 100, 10_000] {
            for hits in [0, n / 3, n / 2, n] {
                let (lo, hi) = clopper_pearson(hits, n, 0.99);
                let p = hits as f64 / n as f64;
                assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
            }
        }
    }

    #[test]
    fn batch_interval_of_constant_is_degenerate() {
        let b = batch_interval(&[2.0; 20], 0.99);
        assert_eq!((b.estimate, b.ci_low, b.ci_high), (2.0, 2.0, 2.0));
    }

    #[test]
    fn dkw_tolerance_value() {
        let tol = dkw_two_sample_tolerance(100_000, 100_000, 0.99);
        let one = ((400.0f64).ln() / 2.0 / 1e5).sqrt();
        assert!((tol - 2.0 * one).abs() < 1e-15);
    }
}
