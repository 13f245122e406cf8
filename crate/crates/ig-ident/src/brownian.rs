//! Physical layer: drifted Brownian transport toward an absorbing receiver.
//!
//! One-dimensional Euler–Maruyama paths with an optional Brownian-bridge
//! crossing correction, the Gaussian position density, the fluid-to-IG
//! parameter map `μ = d/v`, `λ = d²/σ²`, and a goodness-of-fit report that
//! validates simulated first-passage times against the exact IG law.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ig::IgParams;
use crate::seeding::StreamKey;
use crate::stats::{ks_statistic, mean_variance};

/// Steps allowed per unit of expected hitting time before a path is
/// declared runaway.
const RUNAWAY_CAP_FACTOR: f64 = 1e6;

/// Physical transport parameters: drift velocity `v` (length/time),
/// volatility `sigma` (length/√time), and transmitter–receiver distance `d`
/// (length). Drift must be strictly positive or the first-passage time has
/// no finite mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    v: f64,
    sigma: f64,
    d: f64,
}

impl FluidParams {
    pub fn new(v: f64, sigma: f64, d: f64) -> Result<Self> {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidInput(format!(
                "drift velocity must be finite and > 0, got v={v}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "volatility must be finite and > 0, got sigma={sigma}"
            )));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidInput(format!(
                "distance must be finite and > 0, got d={d}"
            )));
        }
        Ok(Self { v, sigma, d })
    }

    /// Convenience constructor taking the Brownian variance parameter σ².
    pub fn with_sigma2(v: f64, sigma2: f64, d: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "variance parameter must be finite and > 0, got sigma2={sigma2}"
            )));
        }
        Self::new(v, sigma2.sqrt(), d)
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Gaussian density of the free particle position at time `t > 0`:
    /// `(1/√(2πσ²t)) exp(−(x−vt)²/(2σ²t))`.
    pub fn position_pdf(&self, x: f64, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!(
                "position density requires t > 0, got t={t}"
            )));
        }
        let var = self.sigma * self.sigma * t;
        let dev = x - self.v * t;
        Ok((2.0 * std::f64::consts::PI * var).sqrt().recip() * (-dev * dev / (2.0 * var)).exp())
    }

    /// First-passage law of this fluid: IG(μ = d/v, λ = d²/σ²).
    pub fn ig_params(&self) -> IgParams {
        IgParams::new(self.d / self.v, self.d * self.d / (self.sigma * self.sigma))
            .expect("valid fluid parameters map to valid IG parameters")
    }
}

/// One discretized trajectory released at the origin.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub dt: f64,
    /// Positions per step, starting with `x₀ = 0`, up to absorption or the
    /// horizon.
    pub positions: Vec<f64>,
    pub absorbed: bool,
    /// Absorption time, a positive multiple of `dt` when `absorbed`.
    pub hit_time: Option<f64>,
}

/// Euler–Maruyama path `x_{k+1} = x_k + v·dt + σ√dt·g_k`, stopped at the
/// first step with `x ≥ d` or at the horizon `t_max`.
pub fn simulate_path<R: Rng + ?Sized>(
    fluid: &FluidParams,
    dt: f64,
    t_max: f64,
    rng: &mut R,
) -> PathSample {
    assert!(dt > 0.0 && dt.is_finite(), "dt must be positive");
    assert!(t_max >= dt, "horizon must cover at least one step");
    let steps = (t_max / dt).floor() as usize;
    let sqrt_dt = dt.sqrt();
    let mut positions = Vec::with_capacity(steps.min(1 << 22) + 1);
    positions.push(0.0);
    let mut x = 0.0_f64;
    for k in 1..=steps {
        let g: f64 = StandardNormal.sample(rng);
        x += fluid.v * dt + fluid.sigma * sqrt_dt * g;
        positions.push(x);
        if x >= fluid.d {
            return PathSample {
                dt,
                positions,
                absorbed: true,
                hit_time: Some(k as f64 * dt),
            };
        }
    }
    PathSample {
        dt,
        positions,
        absorbed: false,
        hit_time: None,
    }
}

/// First time the discretized path reaches level `d`.
///
/// With `bridge_correction`, every non-crossing step is additionally ruled a
/// crossing with the Brownian-bridge probability
/// `exp(−2(d−x_k)(d−x_{k+1})/(σ²dt))`, which removes most of the O(√dt)
/// discretization bias. Since `v > 0` the walk terminates with probability
/// one; a cap of `1e6·μ/dt` steps converts parameter pathologies into a
/// diagnosable error instead of a hang.
pub fn simulate_first_passage<R: Rng + ?Sized>(
    fluid: &FluidParams,
    dt: f64,
    rng: &mut R,
    bridge_correction: bool,
) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let mu = fluid.d / fluid.v;
    let limit = ((RUNAWAY_CAP_FACTOR * mu / dt).ceil()).min(u64::MAX as f64) as u64;
    first_passage_capped(fluid, dt, rng, bridge_correction, limit)
}

fn first_passage_capped<R: Rng + ?Sized>(
    fluid: &FluidParams,
    dt: f64,
    rng: &mut R,
    bridge_correction: bool,
    limit: u64,
) -> Result<f64> {
    let sqrt_dt = dt.sqrt();
    let drift = fluid.v * dt;
    let bridge_scale = 2.0 / (fluid.sigma * fluid.sigma * dt);
    let mut x = 0.0_f64;
    let mut k = 0_u64;
    loop {
        k += 1;
        if k > limit {
            return Err(Error::RunawayPath { steps: k, limit });
        }
        let g: f64 = StandardNormal.sample(rng);
        let x_next = x + drift + fluid.sigma * sqrt_dt * g;
        if x_next >= fluid.d {
            return Ok(k as f64 * dt);
        }
        if bridge_correction {
            let p_cross = (-bridge_scale * (fluid.d - x) * (fluid.d - x_next)).exp();
            if rng.random::<f64>() < p_cross {
                return Ok(k as f64 * dt);
            }
        }
        x = x_next;
    }
}

/// Goodness-of-fit summary of simulated first-passage times against the
/// exact IG law of the fluid.
#[derive(Debug, Clone, Copy)]
pub struct FptReport {
    pub n_samples: usize,
    pub ks_distance: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub theoretical_mean: f64,
    pub theoretical_variance: f64,
    /// Set when the empirical variance has collapsed relative to the mean
    /// (σ → 0 drift-only regime); the KS distance is then dominated by the
    /// point mass at d/v and not meaningful.
    pub degenerate_variance: bool,
}

/// Draws `n_samples` first-passage times (trial `k` on `key.child(k)`) and
/// compares them with `IG(d/v, d²/σ²)`.
pub fn validate_fpt_distribution(
    fluid: &FluidParams,
    n_samples: usize,
    dt: f64,
    key: &StreamKey,
    bridge_correction: bool,
) -> Result<FptReport> {
    if n_samples < 100 {
        return Err(Error::InvalidInput(format!(
            "need at least 100 samples for a fit report, got {n_samples}"
        )));
    }
    let samples = sample_first_passages(fluid, n_samples, dt, key, bridge_correction)?;
    Ok(fpt_report_from_samples(&samples, fluid))
}

/// Ordered parallel draw of first-passage times; trial `k` always uses
/// stream `key.child(k)`, so the output is independent of worker count.
pub fn sample_first_passages(
    fluid: &FluidParams,
    n_samples: usize,
    dt: f64,
    key: &StreamKey,
    bridge_correction: bool,
) -> Result<Vec<f64>> {
    (0..n_samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = key.child(k).rng();
            simulate_first_passage(fluid, dt, &mut rng, bridge_correction)
        })
        .collect()
}

/// Builds the fit report for already-drawn samples.
pub fn fpt_report_from_samples(samples: &[f64], fluid: &FluidParams) -> FptReport {
    let params = fluid.ig_params();
    let (sample_mean, sample_variance) = mean_variance(samples);
    let mut sorted = samples.to_vec();
    let ks_distance = ks_statistic(&mut sorted, |z| params.cdf(z));
    let m = params.moments();
    FptReport {
        n_samples: samples.len(),
        ks_distance,
        sample_mean,
        sample_variance,
        theoretical_mean: m.mean,
        theoretical_variance: m.variance,
        degenerate_variance: sample_variance < 1e-12 * sample_mean * sample_mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fluid(v: f64, sigma: f64, d: f64) -> FluidParams {
        FluidParams::new(v, sigma, d).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(FluidParams::new(0.0, 1.0, 1.0).is_err());
        assert!(FluidParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(FluidParams::new(1.0, 0.0, 1.0).is_err());
        assert!(FluidParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(FluidParams::with_sigma2(1.0, -0.5, 1.0).is_err());
    }

    #[test]
    fn position_pdf_peak_value() {
        // at x = vt the exponent vanishes: 1/√(2πσ²t) = 1/√(8π) for σ=2, t=1
        let f = fluid(10.0, 2.0, 1.0);
        let got = f.position_pdf(10.0, 1.0).unwrap();
        assert!((got - 0.199_471_140_200_716_35).abs() < 1e-15);
        assert!(f.position_pdf(0.0, 0.0).is_err());
        assert!(f.position_pdf(0.0, -1.0).is_err());
    }

    #[test]
    fn position_pdf_peaks_at_drift() {
        let f = fluid(10.0, 2.0, 1.0);
        let mut best = (0.0, 0.0);
        for k in 0..400 {
            let x = k as f64 * 0.05;
            let v = f.position_pdf(x, 1.0).unwrap();
            if v > best.1 {
                best = (x, v);
            }
        }
        assert!((best.0 - 10.0).abs() < 0.051);
    }

    #[test]
    fn position_pdf_peaks_flatten_in_time() {
        let f = fluid(10.0, 2.0, 1.0);
        let p1 = f.position_pdf(10.0, 1.0).unwrap();
        let p2 = f.position_pdf(20.0, 2.0).unwrap();
        let p4 = f.position_pdf(40.0, 4.0).unwrap();
        assert!(p1 > p2 && p2 > p4);
    }

    #[test]
    fn ig_map_reference_values() {
        let p = fluid(1.0, 0.5_f64.sqrt(), 1.0).ig_params();
        assert!((p.mu() - 1.0).abs() < 1e-15);
        assert!((p.lambda() - 2.0).abs() < 1e-12);

        // Brownian-motion figure parameters: d = 0.15 mm, v = 0.001 mm/s,
        // σ = 0.002 mm/√s ⇒ μ = 150 s, λ = 5625 s
        let p = fluid(0.001, 0.002, 0.15).ig_params();
        assert!((p.mu() - 150.0).abs() < 1e-9);
        assert!((p.lambda() - 5625.0).abs() < 1e-9);
    }

    #[test]
    fn ig_map_is_scale_invariant() {
        let a = fluid(1.0, 2.0, 3.0).ig_params();
        let b = fluid(2.0, 4.0, 6.0).ig_params();
        assert!((a.mu() - b.mu()).abs() < 1e-15);
        assert!((a.lambda() - b.lambda()).abs() < 1e-12);
    }

    #[test]
    fn drift_only_path_hits_on_schedule() {
        let f = fluid(1.0, 1e-12, 1.0);
        let mut rng = StreamKey::new(1).rng();
        let path = simulate_path(&f, 1e-3, 2.0, &mut rng);
        assert!(path.absorbed);
        let t = path.hit_time.unwrap();
        assert!((t - 1.0).abs() <= 1e-3 + 1e-12, "hit at {t}");
        assert_eq!(path.positions[0], 0.0);

        let fpt = simulate_first_passage(&f, 1e-3, &mut rng, false).unwrap();
        assert!((fpt - 1.0).abs() <= 1e-3 + 1e-12);
    }

    #[test]
    fn path_respects_horizon() {
        let f = fluid(0.01, 1e-9, 100.0);
        let mut rng = StreamKey::new(2).rng();
        let path = simulate_path(&f, 0.5, 10.0, &mut rng);
        assert!(!path.absorbed);
        assert_eq!(path.hit_time, None);
        assert_eq!(path.positions.len(), 21); // x0 plus 20 steps
    }

    #[test]
    fn runaway_cap_fires_when_exhausted() {
        // the walk needs ~100 drift steps to reach d; a 10-step cap must
        // surface as the diagnostic error rather than a hang
        let f = fluid(1.0, 1e-12, 1.0);
        let mut rng = StreamKey::new(3).rng();
        match first_passage_capped(&f, 1e-2, &mut rng, false, 10) {
            Err(Error::RunawayPath { steps, limit }) => {
                assert_eq!(limit, 10);
                assert!(steps > limit);
            }
            other => panic!("expected runaway-path error, got {other:?}"),
        }
        assert!(simulate_first_passage(&f, 1e-2, &mut rng, false).is_ok());
    }

    #[test]
    fn validate_requires_minimum_samples() {
        let f = fluid(1.0, 1.0, 1.0);
        let key = StreamKey::new(4);
        assert!(validate_fpt_distribution(&f, 99, 1e-2, &key, true).is_err());
    }

    #[test]
    fn degenerate_variance_is_flagged() {
        let f = fluid(1.0, 1e-12, 1.0);
        let key = StreamKey::new(5);
        let report = validate_fpt_distribution(&f, 200, 1e-3, &key, false).unwrap();
        assert!(report.degenerate_variance);
        assert!((report.sample_mean - 1.0).abs() < 2e-3);
    }
}
