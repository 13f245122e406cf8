//! The inverse Gaussian noise law: density, distribution function, exact
//! sampling, moment-generating function, moments, the zero-drift Lévy
//! limit, and the joint log-density of i.i.d. noise vectors.
//!
//! Densities and likelihoods use natural logarithms throughout; base-2
//! logarithms are reserved for rates and codebook sizes elsewhere in the
//! crate.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::special::{erfcx, normal_cdf};
use crate::stats::NeumaierSum;

const LN_TWO_PI: f64 = 1.837_877_066_409_345_4;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Parameters of the inverse Gaussian law IG(μ, λ): mean `mu` and shape
/// `lambda`, both in seconds and strictly positive. The variance is μ³/λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IgParams {
    mu: f64,
    lambda: f64,
}

/// Mean, variance, and the fourth non-central moment of an IG variable,
/// together with the closed-form upper bound `μ⁴(1 + μ/λ)⁶` on the latter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mean: f64,
    pub variance: f64,
    pub fourth_noncentral: f64,
    pub fourth_upper_bound: f64,
}

impl IgParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidInput(format!(
                "IG mean must be finite and > 0, got mu={mu}"
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidInput(format!(
                "IG shape must be finite and > 0, got lambda={lambda}"
            )));
        }
        Ok(Self { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Density `√(λ/2π) z^(−3/2) exp(−λ(z−μ)²/(2μ²z))` for `z > 0`, exactly
    /// zero for `z ≤ 0`.
    pub fn pdf(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::InvalidInput(format!(
                "pdf argument must be finite, got z={z}"
            )));
        }
        if z <= 0.0 {
            return Ok(0.0);
        }
        let d = z - self.mu;
        Ok((self.lambda / (2.0 * std::f64::consts::PI)).sqrt()
            * z.powf(-1.5)
            * (-self.lambda * d * d / (2.0 * self.mu * self.mu * z)).exp())
    }

    /// Natural log of the density; `-∞` for `z ≤ 0`.
    pub fn ln_pdf(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::InvalidInput(format!(
                "ln_pdf argument must be finite, got z={z}"
            )));
        }
        if z <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let d = z - self.mu;
        Ok(0.5 * (self.lambda.ln() - LN_TWO_PI) - 1.5 * z.ln()
            - self.lambda * d * d / (2.0 * self.mu * self.mu * z))
    }

    /// Distribution function in the standard closed form
    /// `Φ(√(λ/z)(z/μ−1)) + exp(2λ/μ) Φ(−√(λ/z)(z/μ+1))`.
    ///
    /// The second term is evaluated through the scaled complement
    /// `½ erfcx(s/√2) exp(−u²/2)`, using the identity
    /// `2λ/μ − s²/2 = −u²/2`; this avoids overflow of `exp(2λ/μ)` and
    /// underflow of `Φ(−s)` for large shape parameters.
    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        let sq = (self.lambda / z).sqrt();
        let u = sq * (z / self.mu - 1.0);
        let s = sq * (z / self.mu + 1.0);
        normal_cdf(u) + 0.5 * erfcx(s / SQRT_2) * (-0.5 * u * u).exp()
    }

    /// Exact IG variate via the Michael–Schucany–Haas transformation: one
    /// standard normal draw, one uniform draw, closed-form root selection.
    ///
    /// The smaller quadratic root is obtained as `μ²/big` where `big` is the
    /// cancellation-free larger root, so extreme normal draws cannot round
    /// the result to zero or below.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let nu: f64 = StandardNormal.sample(rng);
        let y = nu * nu;
        let mu = self.mu;
        let lambda = self.lambda;
        let big = mu + mu * mu * y / (2.0 * lambda)
            + (mu / (2.0 * lambda)) * (4.0 * mu * lambda * y + mu * mu * y * y).sqrt();
        let small = mu * mu / big;
        let u: f64 = rng.random();
        if u <= mu / (mu + small) {
            small
        } else {
            big
        }
    }

    /// Moment-generating function `E[e^{αZ}] = exp((λ/μ)(1 − √(1 − 2μ²α/λ)))`,
    /// defined for `α < λ/(2μ²)`.
    pub fn mgf(&self, alpha: f64) -> Result<f64> {
        let boundary = self.lambda / (2.0 * self.mu * self.mu);
        if !alpha.is_finite() || alpha >= boundary {
            return Err(Error::Domain(format!(
                "MGF diverges: alpha must satisfy alpha < lambda/(2 mu^2) = {boundary}, got {alpha}"
            )));
        }
        let s = 1.0 - 2.0 * self.mu * self.mu * alpha / self.lambda;
        Ok(((self.lambda / self.mu) * (1.0 - s.sqrt())).exp())
    }

    /// Exact moments. The fourth non-central moment is the closed polynomial
    /// `μ⁴ + 6μ⁵/λ + 15μ⁶/λ² + 15μ⁷/λ³`; the bound field is `μ⁴(1 + μ/λ)⁶`,
    /// which dominates it for every positive parameter pair.
    pub fn moments(&self) -> MomentSet {
        let (mu, lambda) = (self.mu, self.lambda);
        let r = mu / lambda;
        let mu4 = mu.powi(4);
        MomentSet {
            mean: mu,
            variance: mu.powi(3) / lambda,
            fourth_noncentral: mu4 * (1.0 + 6.0 * r + 15.0 * r * r + 15.0 * r * r * r),
            fourth_upper_bound: mu4 * (1.0 + r).powi(6),
        }
    }

    /// Centering constant of the decoding measure, `E[Z²] = μ² + μ³/λ`.
    pub fn second_moment(&self) -> f64 {
        self.mu * self.mu + self.mu.powi(3) / self.lambda
    }

    /// Joint natural-log density of an i.i.d. noise vector:
    /// `(n/2)ln(λ/2π) − (3/2)Σ ln zₜ − (λ/2μ²)Σ(zₜ−μ)²/zₜ`.
    ///
    /// Returns the `-∞` sentinel when any coordinate leaves the support,
    /// because downstream likelihood ratios must survive boundary noise
    /// realizations rather than abort.
    pub fn vector_log_pdf(&self, z: &[f64]) -> Result<f64> {
        if z.is_empty() {
            return Err(Error::InvalidInput(
                "vector_log_pdf of an empty vector".into(),
            ));
        }
        if let Some(bad) = z.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "vector_log_pdf requires finite components, got {bad}"
            )));
        }
        if z.iter().any(|&v| v <= 0.0) {
            return Ok(f64::NEG_INFINITY);
        }
        let n = z.len() as f64;
        let mut log_sum = NeumaierSum::new();
        let mut quad_sum = NeumaierSum::new();
        for &zt in z {
            log_sum.add(zt.ln());
            let d = zt - self.mu;
            quad_sum.add(d * d / zt);
        }
        Ok(0.5 * n * (self.lambda.ln() - LN_TWO_PI) - 1.5 * log_sum.total()
            - self.lambda / (2.0 * self.mu * self.mu) * quad_sum.total())
    }
}

/// Zero-drift first-passage density (Lévy law):
/// `(d/(σ√2π)) z^(−3/2) exp(−d²/(2σ²z))` for `z > 0`, zero otherwise.
/// Heavy-tailed with infinite mean; requires `d > 0`, `sigma > 0`.
pub fn levy_pdf(d: f64, sigma: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    d / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        * z.powf(-1.5)
        * (-d * d / (2.0 * sigma * sigma * z)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::StreamKey;

    fn ig(mu: f64, lambda: f64) -> IgParams {
        IgParams::new(mu, lambda).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(IgParams::new(0.0, 1.0).is_err());
        assert!(IgParams::new(1.0, -2.0).is_err());
        assert!(IgParams::new(f64::NAN, 1.0).is_err());
        assert!(IgParams::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn pdf_reference_point() {
        // pdf(1,1,1) = 1/√(2π)
        let got = ig(1.0, 1.0).pdf(1.0).unwrap();
        assert!((got - 0.398_942_280_401_432_7).abs() < 1e-15);
    }

    #[test]
    fn pdf_zero_off_support() {
        assert_eq!(ig(2.0, 10.0).pdf(-0.5).unwrap(), 0.0);
        assert_eq!(ig(2.0, 10.0).pdf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn pdf_rejects_non_finite() {
        assert!(ig(1.0, 1.0).pdf(f64::NAN).is_err());
        assert!(ig(1.0, 1.0).pdf(f64::INFINITY).is_err());
    }

    #[test]
    fn pdf_concentrates_near_mode() {
        // λ = 10 curve at μ = 2 peaks near the mean: pdf(2) above pdf(1), pdf(3)
        let p = ig(2.0, 10.0);
        let at_mode = p.pdf(2.0).unwrap();
        assert!(at_mode > p.pdf(1.0).unwrap());
        assert!(at_mode > p.pdf(3.0).unwrap());
    }

    #[test]
    fn cdf_limits_and_reference() {
        let p = ig(1.0, 1.0);
        assert_eq!(p.cdf(0.0), 0.0);
        assert_eq!(p.cdf(-3.0), 0.0);
        assert!((p.cdf(1e6) - 1.0).abs() < 1e-9);
        // frozen high-precision value of Φ(0) + e²Φ(−2)
        assert!((p.cdf(1.0) - 0.668_102_001_223_170_6).abs() < 1e-12);
        assert!((p.cdf(0.5) - 0.364_975_548_172_959_89).abs() < 1e-12);
        assert!((p.cdf(2.0) - 0.885_475_425_986_006_43).abs() < 1e-12);
    }

    #[test]
    fn cdf_stable_for_large_shape() {
        // λ/μ = 37.5 would overflow a naive exp(2λ/μ) times Φ product
        let p = ig(150.0, 5625.0);
        assert!((p.cdf(150.0) - 0.532_360_548_861_903_6).abs() < 1e-12);
        assert!((p.cdf(100.0) - 0.007_603_121_905_408_42).abs() < 1e-14);
        assert!(p.cdf(1.0) >= 0.0);
    }

    #[test]
    fn cdf_monotone() {
        let p = ig(2.0, 10.0);
        let mut prev = 0.0;
        for k in 1..200 {
            let c = p.cdf(k as f64 * 0.05);
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn mgf_reference_values() {
        let p = ig(1.0, 1.0);
        assert_eq!(p.mgf(0.0).unwrap(), 1.0);
        // exp(1 − √½)
        assert!((p.mgf(0.25).unwrap() - 1.340_299_664_001_761_1).abs() < 1e-14);
        assert!(p.mgf(0.5).is_err()); // boundary λ/(2μ²) = 0.5
        assert!(p.mgf(0.7).is_err());
        assert!(p.mgf(-1.0e3).is_ok()); // negative arguments always converge
    }

    #[test]
    fn moments_reference_values() {
        let m = ig(1.0, 1.0).moments();
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.variance, 1.0);
        assert!((m.fourth_noncentral - 37.0).abs() < 1e-12);
        assert!((m.fourth_upper_bound - 64.0).abs() < 1e-12);

        let m = ig(2.0, 10.0).moments();
        assert!((m.variance - 0.8).abs() < 1e-15);
        assert!((m.fourth_noncentral - 46.72).abs() < 1e-12);
        assert!((m.fourth_upper_bound - 47.775_744).abs() < 1e-12);
    }

    #[test]
    fn fourth_moment_bound_on_log_grid() {
        // Lemma-style inequality over μ, λ ∈ [1e-2, 1e2]
        for i in -2..=2 {
            for j in -2..=2 {
                let m = ig(10f64.powi(i), 10f64.powi(j)).moments();
                assert!(
                    m.fourth_noncentral <= m.fourth_upper_bound,
                    "bound violated at mu=1e{i}, lambda=1e{j}"
                );
            }
        }
    }

    #[test]
    fn sampler_is_deterministic_given_stream() {
        let p = ig(1.0, 1.0);
        let draw = |key: StreamKey| -> Vec<f64> {
            let mut rng = key.rng();
            (0..10).map(|_| p.sample(&mut rng)).collect()
        };
        let key = StreamKey::new(12345).child(0);
        assert_eq!(draw(key), draw(key));
    }

    #[test]
    fn sampler_always_positive() {
        let p = ig(0.01, 100.0);
        let mut rng = StreamKey::new(9).rng();
        for _ in 0..10_000 {
            assert!(p.sample(&mut rng) > 0.0);
        }
    }

    #[test]
    fn vector_log_pdf_matches_scalar() {
        let p = ig(1.0, 1.0);
        // single coordinate: ln pdf(1) = ln(1/√2π)
        let single = p.vector_log_pdf(&[1.0]).unwrap();
        assert!((single - (-0.918_938_533_204_672_7)).abs() < 1e-14);
        // additivity over i.i.d. coordinates
        let double = p.vector_log_pdf(&[1.0, 1.0]).unwrap();
        assert!((double - (-1.837_877_066_409_345_4)).abs() < 1e-14);
    }

    #[test]
    fn vector_log_pdf_sentinel_and_errors() {
        let p = ig(2.0, 3.0);
        assert_eq!(
            p.vector_log_pdf(&[1.0, -0.1]).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(p.vector_log_pdf(&[]).is_err());
        assert!(p.vector_log_pdf(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn levy_reference_and_support() {
        // (d=1, σ=1, z=1) → e^{−1/2}/√(2π)
        assert!((levy_pdf(1.0, 1.0, 1.0) - 0.241_970_724_519_143_35).abs() < 1e-15);
        assert_eq!(levy_pdf(1.0, 1.0, -1.0), 0.0);
    }

    #[test]
    fn parameter_effects_on_shape() {
        // raising λ at fixed μ sharpens the peak; raising μ at fixed λ moves
        // the argmax right
        let peak = |p: IgParams| -> (f64, f64) {
            let mut best = (0.0, 0.0);
            for k in 1..4000 {
                let z = k as f64 * 0.005;
                let v = p.pdf(z).unwrap();
                if v > best.1 {
                    best = (z, v);
                }
            }
            best
        };
        let (_, lo_peak) = peak(ig(2.0, 10.0));
        let (_, hi_peak) = peak(ig(2.0, 16.0));
        assert!(hi_peak > lo_peak);

        let (argmax_small, _) = peak(ig(1.0, 1.0));
        let (argmax_large, _) = peak(ig(6.0, 1.0));
        assert!(argmax_large > argmax_small);
    }
}
