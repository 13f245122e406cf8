//! Sphere-packing geometry in the peak-constraint hypercube: blocklength
//! scaling constants, log-domain hypersphere volumes, greedy saturated
//! packings, Monte Carlo packing density, and the codebook-count and rate
//! bounds that bracket the identification capacity.

use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seeding::StreamKey;

const LOG2_PI: f64 = 1.651_496_129_472_318_8;
const LN_2: f64 = std::f64::consts::LN_2;

/// A packing is declared saturated once this many consecutive candidates
/// have been rejected: the empirical acceptance rate has dropped below 1e-3,
/// so the uncovered volume fraction is of that order.
const SATURATION_WINDOW: u64 = 1000;

/// Blocklength-indexed constants of the achievability and converse analyses:
///
/// * `epsilon_n = a·n^(−(1−b)/2)` — squared-radius density of the packing,
/// * `r0 = √(n·epsilon_n) = √a·n^((1+b)/4)` — packing sphere radius,
/// * `delta_n = (4/3)·epsilon_n` — decoding threshold,
/// * `alpha_n = a²/n^(1+2b)` — converse separation scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingQuantities {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub epsilon_n: f64,
    pub r0: f64,
    pub delta_n: f64,
    pub alpha_n: f64,
}

/// Converse separation scale `a²/n^(1+2b)`; defined for every `n ≥ 1`.
pub fn alpha_n(n: usize, a: f64, b: f64) -> f64 {
    a * a / (n as f64).powf(1.0 + 2.0 * b)
}

pub fn scaling_quantities(n: usize, a: f64, b: f64) -> Result<ScalingQuantities> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "scaling quantities need blocklength n >= 2, got {n}"
        )));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!(
            "scale constant a must be finite and > 0, got {a}"
        )));
    }
    if !(b.is_finite() && 0.0 < b && b < 1.0) {
        return Err(Error::Domain(format!(
            "exponent b must lie in the open interval (0, 1), got {b}"
        )));
    }
    let nf = n as f64;
    let epsilon_n = a * nf.powf(-(1.0 - b) / 2.0);
    Ok(ScalingQuantities {
        n,
        a,
        b,
        epsilon_n,
        r0: (nf * epsilon_n).sqrt(),
        delta_n: 4.0 * a / (3.0 * nf.powf((1.0 - b) / 2.0)),
        alpha_n: alpha_n(n, a, b),
    })
}

/// Base-2 log of the volume of an `n`-dimensional sphere of radius `r`:
/// `(n/2)·log₂π − log₂Γ(n/2 + 1) + n·log₂ r`.
///
/// Evaluated through log-gamma; the raw Γ would overflow past n ≈ 300.
pub fn sphere_log_volume(n: usize, r: f64) -> f64 {
    assert!(n >= 1, "sphere dimension must be at least 1");
    assert!(r > 0.0, "sphere radius must be positive");
    let nf = n as f64;
    0.5 * nf * LOG2_PI - crate::special::ln_gamma(0.5 * nf + 1.0) / LN_2 + nf * r.log2()
}

/// A finite set of length-`n` codewords inside `[0, t_max]^n` whose pairwise
/// Euclidean distances are all at least `min_distance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    t_max: f64,
    min_distance: f64,
    codewords: Vec<Vec<f64>>,
}

impl Codebook {
    /// Builds a codebook and audits both invariants (peak constraint and
    /// exhaustive pairwise minimum distance).
    pub fn from_codewords(
        n: usize,
        t_max: f64,
        min_distance: f64,
        codewords: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("blocklength must be positive".into()));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidInput(format!(
                "peak constraint must be finite and > 0, got {t_max}"
            )));
        }
        if !(min_distance.is_finite() && min_distance >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "min distance must be finite and >= 0, got {min_distance}"
            )));
        }
        let cb = Self {
            n,
            t_max,
            min_distance,
            codewords,
        };
        cb.audit()?;
        Ok(cb)
    }

    /// Exhaustive invariant audit: every coordinate in `[0, t_max]` and every
    /// distinct pair at distance `>= min_distance`.
    pub fn audit(&self) -> Result<()> {
        for (i, c) in self.codewords.iter().enumerate() {
            if c.len() != self.n {
                return Err(Error::InvalidInput(format!(
                    "codeword {} has length {}, expected {}",
                    i + 1,
                    c.len(),
                    self.n
                )));
            }
            if let Some(&x) = c.iter().find(|&&x| !(0.0..=self.t_max).contains(&x)) {
                return Err(Error::InvalidInput(format!(
                    "codeword {} violates the peak constraint: coordinate {} outside [0, {}]",
                    i + 1,
                    x,
                    self.t_max
                )));
            }
        }
        for i in 0..self.codewords.len() {
            for j in (i + 1)..self.codewords.len() {
                let d = self.pair_distance(i + 1, j + 1);
                if d < self.min_distance {
                    return Err(Error::InvalidInput(format!(
                        "codewords {} and {} are at distance {} < min distance {}",
                        i + 1,
                        j + 1,
                        d,
                        self.min_distance
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Codeword for message `i` (messages are 1-based).
    pub fn codeword(&self, i: usize) -> Result<&[f64]> {
        if i == 0 || i > self.codewords.len() {
            return Err(Error::InvalidInput(format!(
                "message index {i} out of range 1..={}",
                self.codewords.len()
            )));
        }
        Ok(&self.codewords[i - 1])
    }

    pub fn codewords(&self) -> &[Vec<f64>] {
        &self.codewords
    }

    /// Euclidean distance between messages `i` and `j` (1-based).
    pub fn pair_distance(&self, i: usize, j: usize) -> f64 {
        let a = &self.codewords[i - 1];
        let b = &self.codewords[j - 1];
        squared_distance(a, b).sqrt()
    }

    /// Serializes as CSV: a name row, one row with `(n, t_max, min_distance,
    /// M)`, then one codeword per row with full float precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,t_max,min_distance,M")?;
        writeln!(
            w,
            "{},{},{},{}",
            self.n,
            fmt_float(self.t_max),
            fmt_float(self.min_distance),
            self.codewords.len()
        )?;
        for c in &self.codewords {
            let row: Vec<String> = c.iter().map(|&x| fmt_float(x)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Codebook::write_csv`] and re-audits.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty codebook file".into()))??;
        if header.trim() != "n,t_max,min_distance,M" {
            return Err(Error::Parse(format!(
                "unexpected codebook header: {header}"
            )));
        }
        let meta = lines
            .next()
            .ok_or_else(|| Error::Parse("codebook file missing metadata row".into()))??;
        let fields: Vec<&str> = meta.trim().split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "metadata row needs 4 fields, got {}",
                fields.len()
            )));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("bad blocklength: {e}")))?;
        let t_max: f64 = fields[1]
            .parse()
            .map_err(|e| Error::Parse(format!("bad t_max: {e}")))?;
        let min_distance: f64 = fields[2]
            .parse()
            .map_err(|e| Error::Parse(format!("bad min_distance: {e}")))?;
        let m: usize = fields[3]
            .parse()
            .map_err(|e| Error::Parse(format!("bad codeword count: {e}")))?;
        let mut codewords = Vec::with_capacity(m);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.trim().split(',').map(str::parse::<f64>).collect();
            codewords.push(row.map_err(|e| Error::Parse(format!("bad codeword row: {e}")))?);
        }
        if codewords.len() != m {
            return Err(Error::Parse(format!(
                "metadata promises {m} codewords, file holds {}",
                codewords.len()
            )));
        }
        Self::from_codewords(n, t_max, min_distance, codewords)
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = crate::stats::NeumaierSum::new();
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc.add(d * d);
    }
    acc.total()
}

/// Outcome of random sequential addition.
#[derive(Debug, Clone)]
pub struct PackingResult {
    pub codebook: Codebook,
    /// Uniform candidates drawn, accepted or not.
    pub attempts: u64,
    /// True when the window of [`SATURATION_WINDOW`] most recent candidates
    /// was rejected wholesale before `target_m` was reached.
    pub saturated: bool,
}

/// Random sequential addition: draw uniform candidates in `[0, t_max]^n` and
/// accept one exactly when its distance to every accepted center is at least
/// `min_distance` (closed inequality — boundary candidates are kept). Stops
/// at `target_m` accepted centers or after `max_attempts` candidates.
pub fn build_greedy_packing<R: Rng + ?Sized>(
    n: usize,
    t_max: f64,
    min_distance: f64,
    target_m: usize,
    max_attempts: u64,
    rng: &mut R,
) -> Result<PackingResult> {
    if !(min_distance.is_finite() && min_distance > 0.0) {
        return Err(Error::InvalidInput(format!(
            "packing needs min_distance > 0, got {min_distance}"
        )));
    }
    if target_m < 2 {
        return Err(Error::InvalidInput(format!(
            "packing needs target_m >= 2, got {target_m}"
        )));
    }
    if n == 0 || !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidInput(
            "packing needs n >= 1 and finite t_max > 0".into(),
        ));
    }
    let min_dist_sq = min_distance * min_distance;
    let mut accepted: Vec<Vec<f64>> = Vec::new();
    let mut attempts = 0_u64;
    let mut rejected_streak = 0_u64;
    let mut candidate = vec![0.0_f64; n];
    while attempts < max_attempts && accepted.len() < target_m {
        attempts += 1;
        for x in candidate.iter_mut() {
            *x = rng.random::<f64>() * t_max;
        }
        let ok = accepted
            .iter()
            .all(|c| squared_distance(c, &candidate) >= min_dist_sq);
        if ok {
            accepted.push(candidate.clone());
            rejected_streak = 0;
        } else {
            rejected_streak += 1;
            if rejected_streak >= SATURATION_WINDOW && accepted.len() >= 2 {
                break;
            }
        }
    }
    if accepted.len() < 2 {
        return Err(Error::PackingInfeasible {
            accepted: accepted.len(),
            attempts,
        });
    }
    let saturated = accepted.len() < target_m && rejected_streak >= SATURATION_WINDOW;
    let codebook = Codebook::from_codewords(n, t_max, min_distance, accepted)?;
    Ok(PackingResult {
        codebook,
        attempts,
        saturated,
    })
}

/// Monte Carlo packing-density estimate with its binomial standard error.
#[derive(Debug, Clone, Copy)]
pub struct DensityEstimate {
    pub estimate: f64,
    pub std_err: f64,
    pub points: u64,
}

/// Fraction of `[0, t_max]^n` lying within distance `r` of some codeword,
/// estimated from `mc_points` uniform probes. With `r = min_distance/2` this
/// is the packing density; doubling `r` measures saturation coverage.
pub fn estimate_packing_density(
    codebook: &Codebook,
    r: f64,
    mc_points: u64,
    key: &StreamKey,
) -> DensityEstimate {
    assert!(!codebook.is_empty(), "density of an empty codebook");
    assert!(r > 0.0, "probe radius must be positive");
    let r_sq = r * r;
    let n = codebook.n();
    let t_max = codebook.t_max();
    const BATCH: u64 = 4096;
    let batches = mc_points.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|j| {
            let mut rng = key.child(j).rng();
            let count = BATCH.min(mc_points - j * BATCH);
            let mut point = vec![0.0_f64; n];
            let mut hits = 0_u64;
            for _ in 0..count {
                for x in point.iter_mut() {
                    *x = rng.random::<f64>() * t_max;
                }
                if codebook
                    .codewords()
                    .iter()
                    .any(|c| squared_distance(c, &point) <= r_sq)
                {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / mc_points as f64;
    DensityEstimate {
        estimate: p,
        std_err: (p * (1.0 - p) / mc_points as f64).sqrt(),
        points: mc_points,
    }
}

/// Finite-`n` evaluation of the codebook-count bounds and the induced rates
/// on the super-exponential scale `M = 2^((n log₂ n) R)`.
#[derive(Debug, Clone, Copy)]
pub struct CountBounds {
    pub n: usize,
    pub t_max: f64,
    pub a: f64,
    pub b: f64,
    pub log2_m_lower: f64,
    pub log2_m_upper: f64,
    pub rate_lower: f64,
    pub rate_upper: f64,
}

/// Volume-packing count bounds.
///
/// Lower (achievability, density floor 2⁻ⁿ):
/// `log₂ M ≥ n·log₂(t_max/2) − log₂ Vol(S(n, r0))` with `r0 = √a·n^((1+b)/4)`.
/// Upper (converse, saturated density ceiling 2^(−0.599n), spheres of radius
/// `alpha_n`):
/// `log₂ M ≤ −0.599·n + n·log₂(t_max + 2·alpha_n) − log₂ Vol(S(n, alpha_n))`.
///
/// Requires `n ≥ 4` for the Stirling/gamma floor manipulation behind the
/// lower bound.
pub fn count_bounds(n: usize, t_max: f64, a: f64, b: f64) -> Result<CountBounds> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "count bounds are defined for n >= 4, got {n}"
        )));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Domain(format!(
            "peak constraint must be finite and > 0, got {t_max}"
        )));
    }
    let sq = scaling_quantities(n, a, b)?;
    let nf = n as f64;
    let log2_m_lower = nf * (t_max / 2.0).log2() - sphere_log_volume(n, sq.r0);
    let log2_m_upper = -0.599 * nf + nf * (t_max + 2.0 * sq.alpha_n).log2()
        - sphere_log_volume(n, sq.alpha_n);
    let scale = nf * nf.log2();
    Ok(CountBounds {
        n,
        t_max,
        a,
        b,
        log2_m_lower,
        log2_m_upper,
        rate_lower: log2_m_lower / scale,
        rate_upper: log2_m_upper / scale,
    })
}
