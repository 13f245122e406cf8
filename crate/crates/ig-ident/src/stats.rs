//! Small statistical toolbox: compensated summation, sample moments,
//! the Kolmogorov–Smirnov statistic, and Wilson score intervals.

/// Neumaier's variant of Kahan summation. Used wherever a long float sum
/// feeds a tight tolerance (decoding measures at n = 10⁶ must stay accurate
/// to ~1e-10 relative).
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator of values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Sample mean and unbiased variance in one pass (Welford).
pub fn mean_variance(samples: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in samples.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let var = if samples.len() > 1 {
        m2 / (samples.len() - 1) as f64
    } else {
        0.0
    };
    (mean, var)
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against the
/// distribution function `cdf`. Sorts the slice in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    assert!(!samples.is_empty(), "KS statistic of an empty sample");
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut sup = 0.0_f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let lo = (f - i as f64 / n).abs();
        let hi = ((i + 1) as f64 / n - f).abs();
        sup = sup.max(lo).max(hi);
    }
    sup
}

/// Asymptotic 99% acceptance band for the KS statistic, `1.63 / √n`.
pub fn ks_band_99(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Two-sided 95% normal quantile used by the Wilson interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion at 95% confidence.
///
/// Chosen over the Wald interval because it keeps honest coverage at
/// `successes = 0`, which the identification experiments routinely hit.
#[derive(Debug, Clone, Copy)]
pub struct WilsonInterval {
    pub center: f64,
    pub halfwidth: f64,
}

impl WilsonInterval {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        assert!(trials > 0, "Wilson interval needs at least one trial");
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z_95 * Z_95;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let halfwidth = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Self { center, halfwidth }
    }

    pub fn lower(&self) -> f64 {
        (self.center - self.halfwidth).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.center + self.halfwidth).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_lost_low_order_bits() {
        let mut s = NeumaierSum::new();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.total(), 10.0);
    }

    #[test]
    fn mean_variance_basic() {
        let (m, v) = mean_variance(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ks_statistic_exact_small_case() {
        // Uniform CDF on [0,1] with samples {0.25, 0.75}:
        // sup over steps is max(|0.25-0|, |0.5-0.25|, |0.75-0.5|, |1-0.75|) = 0.25.
        let mut xs = [0.25, 0.75];
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ks_band_matches_spec_constant() {
        assert!((ks_band_99(100_000) - 0.005154_597).abs() < 1e-6);
    }

    #[test]
    fn wilson_upper_at_zero_successes() {
        // closed form z²/(n+z²) at p̂ = 0
        let w = WilsonInterval::from_counts(0, 10_000);
        assert!((w.upper() - 3.839_983_70677e-4).abs() < 1e-12);
        assert!(w.upper() <= 4e-4);
        assert_eq!(w.lower(), 0.0);
    }

    #[test]
    fn wilson_halfwidth_shrinks_with_trials() {
        let narrow = WilsonInterval::from_counts(50, 1000).halfwidth;
        let wide = WilsonInterval::from_counts(5, 100).halfwidth;
        assert!(narrow < wide);
    }
}
