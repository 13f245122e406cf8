//! Deterministic encoder, additive IG timing channel, and the
//! distance-threshold identification decoder.
//!
//! The decoder never searches for the most likely message: each candidate
//! `j` is tested on its own through the decoding measure
//! `T(y, c_j) = n⁻¹‖y − c_j‖² − (μ² + μ³/λ)`, accepting exactly when
//! `|T| ≤ δ_n`.

use rand::Rng;

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::ig::IgParams;
use crate::stats::NeumaierSum;

/// Identification acceptance rule: threshold `delta_n` and the centering
/// constant `alpha = μ² + μ³/λ` of the noise law it was derived for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodingRule {
    delta_n: f64,
    alpha: f64,
}

impl DecodingRule {
    /// Rule for a given noise law; `alpha` is taken from the exact moments.
    pub fn new(params: &IgParams, delta_n: f64) -> Result<Self> {
        if !(delta_n.is_finite() && delta_n > 0.0) {
            return Err(Error::InvalidInput(format!(
                "decoding threshold must be finite and > 0, got {delta_n}"
            )));
        }
        Ok(Self {
            delta_n,
            alpha: params.second_moment(),
        })
    }

    pub fn delta_n(&self) -> f64 {
        self.delta_n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Deterministic encoding: message `i ∈ 1..=M` maps to the stored codeword
/// verbatim.
pub fn encode(codebook: &Codebook, i: usize) -> Result<&[f64]> {
    codebook.codeword(i)
}

/// One channel use per coordinate: `y_t = c_t + Z_t` with `Z_t` i.i.d.
/// IG(μ, λ). Every output coordinate exceeds its input strictly.
pub fn transmit<R: Rng + ?Sized>(codeword: &[f64], params: &IgParams, rng: &mut R) -> Vec<f64> {
    codeword.iter().map(|&c| c + params.sample(rng)).collect()
}

/// Decoding measure `T(y, c) = n⁻¹‖y − c‖² − (μ² + μ³/λ)`, computed with
/// compensated summation so the n = 10⁶ regime stays accurate to ~1e-10
/// relative.
pub fn decoding_measure(y: &[f64], c: &[f64], params: &IgParams) -> Result<f64> {
    if y.len() != c.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: output has {} coordinates, codeword has {}",
            y.len(),
            c.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::InvalidInput("decoding measure of empty vectors".into()));
    }
    let mut acc = NeumaierSum::new();
    for (yt, ct) in y.iter().zip(c) {
        let d = yt - ct;
        acc.add(d * d);
    }
    Ok(acc.total() / y.len() as f64 - params.second_moment())
}

/// Identification test for candidate codeword `c_j`: accept exactly when
/// `|T(y, c_j)| ≤ δ_n` (closed boundary).
pub fn identify(y: &[f64], c_j: &[f64], params: &IgParams, rule: &DecodingRule) -> Result<bool> {
    Ok(decoding_measure(y, c_j, params)?.abs() <= rule.delta_n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{build_greedy_packing, scaling_quantities};
    use crate::seeding::StreamKey;

    fn ig(mu: f64, lambda: f64) -> IgParams {
        IgParams::new(mu, lambda).unwrap()
    }

    #[test]
    fn encode_is_verbatim_and_deterministic() {
        let mut rng = StreamKey::new(21).rng();
        let packing = build_greedy_packing(2, 10.0, 1.0, 5, 10_000, &mut rng).unwrap();
        let cb = &packing.codebook;
        assert_eq!(encode(cb, 1).unwrap(), cb.codewords()[0].as_slice());
        assert_eq!(encode(cb, 1).unwrap(), encode(cb, 1).unwrap());
        assert!(encode(cb, 0).is_err());
        assert!(encode(cb, 6).is_err());
        // encoded words satisfy the peak audit by construction
        cb.audit().unwrap();
    }

    #[test]
    fn transmit_outputs_exceed_inputs() {
        let params = ig(1.0, 1.0);
        let c = vec![0.5; 64];
        let mut rng = StreamKey::new(22).rng();
        let y = transmit(&c, &params, &mut rng);
        assert_eq!(y.len(), 64);
        assert!(y.iter().zip(&c).all(|(yt, ct)| yt > ct));
    }

    #[test]
    fn transmit_is_reproducible() {
        let params = ig(2.0, 3.0);
        let c = vec![1.0; 8];
        let key = StreamKey::new(23).child(5);
        let a = transmit(&c, &params, &mut key.rng());
        let b = transmit(&c, &params, &mut key.rng());
        assert_eq!(a, b);
    }

    #[test]
    fn transmit_mean_matches_noise_mean() {
        // zero codeword: coordinate mean of y estimates E[Z] = μ = 1
        let params = ig(1.0, 1.0);
        let c = vec![0.0; 100_000];
        let mut rng = StreamKey::new(24).rng();
        let y = transmit(&c, &params, &mut rng);
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        // σ/√N = 1/316
        assert!((mean - 1.0).abs() < 3.0 / 316.0, "mean {mean}");
    }

    #[test]
    fn decoding_measure_zero_noise_reference() {
        let params = ig(1.0, 1.0);
        let c = vec![1.0, 2.0, 3.0];
        let t = decoding_measure(&c, &c, &params).unwrap();
        assert!((t - (-2.0)).abs() < 1e-15);

        let params = ig(2.0, 10.0);
        let t = decoding_measure(&c, &c, &params).unwrap();
        assert!((t - (-4.8)).abs() < 1e-15);
    }

    #[test]
    fn decoding_measure_rejects_mismatch() {
        let params = ig(1.0, 1.0);
        assert!(decoding_measure(&[1.0, 2.0], &[1.0], &params).is_err());
        assert!(decoding_measure(&[], &[], &params).is_err());
    }

    #[test]
    fn identify_boundary_is_closed() {
        // n = 1, c = 0, y = 1.5: T = 2.25 − 2 = 0.25 = δ exactly → accept
        let params = ig(1.0, 1.0);
        let rule = DecodingRule::new(&params, 0.25).unwrap();
        assert!(identify(&[1.5], &[0.0], &params, &rule).unwrap());
        // y = c gives T = −α = −2, rejected when δ < 2
        assert!(!identify(&[0.0], &[0.0], &params, &rule).unwrap());
    }

    #[test]
    fn identify_accepts_own_codeword_overwhelmingly() {
        // δ sits 9.2 standard deviations of the statistic away from 0
        let params = ig(1.0, 4.0);
        let s = scaling_quantities(10_000, 1.0, 0.5).unwrap();
        let rule = DecodingRule::new(&params, s.delta_n).unwrap();
        let c = vec![2.0; 10_000];
        let key = StreamKey::new(25);
        let trials = 1000;
        let mut accepted = 0;
        for k in 0..trials {
            let mut rng = key.child(k).rng();
            let y = transmit(&c, &params, &mut rng);
            if identify(&y, &c, &params, &rule).unwrap() {
                accepted += 1;
            }
        }
        assert!(
            accepted as f64 >= 0.999 * trials as f64,
            "accepted {accepted}/{trials}"
        );
    }

    #[test]
    fn decoding_measure_is_shift_invariant() {
        let params = ig(1.0, 2.0);
        let y = vec![1.0, 2.5, 0.75, 3.0];
        let c = vec![0.5, 2.0, 0.5, 2.25];
        let t0 = decoding_measure(&y, &c, &params).unwrap();
        for shift in [-0.0, 1.0, -3.5, 1e6] {
            let ys: Vec<f64> = y.iter().map(|v| v + shift).collect();
            let cs: Vec<f64> = c.iter().map(|v| v + shift).collect();
            let t = decoding_measure(&ys, &cs, &params).unwrap();
            assert!((t - t0).abs() < 1e-12, "shift {shift}: {t} vs {t0}");
        }
    }
}
