//! Binomial confidence intervals.

/// Point estimate with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
    /// Normal-approximation standard error sqrt(p(1-p)/n) at the point estimate.
    pub std_error: f64,
}

impl BinomialEstimate {
    pub fn new(successes: u64, trials: u64, z: f64) -> Self {
        let (low, high) = wilson_interval(successes, trials, z);
        let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let std_error = if trials == 0 {
            0.0
        } else {
            libm::sqrt(p * (1.0 - p) / trials as f64)
        };
        Self {
            successes,
            trials,
            estimate: p,
            low,
            high,
            std_error,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.low <= value && value <= self.high
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

/// Wilson score interval for `k` successes in `n` trials at `z` standard deviations.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_contains_estimate() {
        let e = BinomialEstimate::new(30, 100, 1.96);
        assert!(e.low < 0.3 && 0.3 < e.high);
        assert!((e.low - 0.2189).abs() < 1e-3);
    }

    #[test]
    fn extreme_counts_stay_in_unit_interval() {
        let (lo, hi) = wilson_interval(0, 50, 3.0);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.2);
        let (lo, hi) = wilson_interval(50, 50, 3.0);
        assert!(lo > 0.8 && hi == 1.0);
    }
}
