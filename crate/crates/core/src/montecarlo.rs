//! Sampling and empirical tail frequencies with Wilson score intervals.
//!
//! Streams are ChaCha8 keyed by the seed with a stream index selecting an
//! independent substream, so grid point `i` of a sweep always sees the same
//! draws however the sweep is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use crate::cumulant::DistributionSpec;
use crate::error::{Error, Result};

pub const DEFAULT_CONFIDENCE: f64 = 0.999;
/// Integer gamma shapes up to this are drawn as sums of exponentials.
const MAX_ERLANG_SHAPE: f64 = 64.0;
const POISSON_INVERSION_MAX: f64 = 30.0;

/// An endless deterministic stream of draws from one distribution.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: DistributionSpec,
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl Sampler {
    pub fn new(spec: DistributionSpec, seed: u64) -> Self {
        Self::substream(spec, seed, 0)
    }

    pub fn substream(spec: DistributionSpec, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            spec,
            rng,
            spare_normal: None,
        }
    }

    /// Uniform on `(0, 1]`.
    fn unit(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    fn std_exponential(&mut self) -> f64 {
        -self.unit().ln()
    }

    /// Marsaglia polar method.
    fn std_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.rng.random::<f64>() - 1.0;
            let v = 2.0 * self.rng.random::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    fn std_gamma(&mut self, shape: f64) -> f64 {
        if shape.fract() == 0.0 && shape <= MAX_ERLANG_SHAPE {
            return (0..shape as u32).map(|_| self.std_exponential()).sum();
        }
        if shape < 1.0 {
            let boost = self.std_gamma(shape + 1.0);
            return boost * self.unit().powf(1.0 / shape);
        }
        // Marsaglia–Tsang
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.std_normal();
            let v = (1.0 + c * x).powi(3);
            if v <= 0.0 {
                continue;
            }
            let u = self.unit();
            if u < 1.0 - 0.0331 * x.powi(4) || u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    fn poisson(&mut self, lambda: f64) -> f64 {
        if lambda <= POISSON_INVERSION_MAX {
            let u = self.rng.random::<f64>();
            let mut k = 0.0;
            let mut p = (-lambda).exp();
            let mut cdf = p;
            while u > cdf {
                k += 1.0;
                p *= lambda / k;
                let next = cdf + p;
                if next == cdf {
                    break;
                }
                cdf = next;
            }
            return k;
        }
        // Hörmann's transformed rejection with squeeze (PTRS)
        let slam = lambda.sqrt();
        let loglam = lambda.ln();
        let b = 0.931 + 2.53 * slam;
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let vr = 0.9277 - 3.6224 / (b - 2.0);
        loop {
            let u = self.rng.random::<f64>() - 0.5;
            let v = self.rng.random::<f64>();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
            if us >= 0.07 && v <= vr {
                return k;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
                <= -lambda + k * loglam - ln_gamma(k + 1.0)
            {
                return k;
            }
        }
    }

    pub fn draw(&mut self) -> f64 {
        match self.spec {
            DistributionSpec::Exponential { rate } => self.std_exponential() / rate,
            DistributionSpec::Gamma { shape, scale } => scale * self.std_gamma(shape),
            DistributionSpec::Normal { location, scale } => location + scale * self.std_normal(),
            DistributionSpec::Poisson { rate } => self.poisson(rate),
        }
    }
}

impl Iterator for Sampler {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.draw())
    }
}

/// `n` draws from stream 0 of `seed`.
pub fn sample(spec: DistributionSpec, seed: u64, n: usize) -> Vec<f64> {
    Sampler::new(spec, seed).take(n).collect()
}

/// `n` draws from substream `stream` of `seed`.
pub fn sample_substream(spec: DistributionSpec, seed: u64, stream: u64, n: usize) -> Vec<f64> {
    Sampler::substream(spec, seed, stream).take(n).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub y: f64,
    pub n: usize,
    pub hits: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub confidence: f64,
}

impl McEstimate {
    pub fn contains(&self, p: f64) -> bool {
        self.ci_lo <= p && p <= self.ci_hi
    }
}

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson_interval(hits: usize, n: usize, confidence: f64) -> Result<(f64, f64)> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Argument(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    if n == 0 {
        return Err(Error::Argument("empty sample set".into()));
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2n = z * z / nf;
    let center = (p + z2n / 2.0) / (1.0 + z2n);
    let half = z / (1.0 + z2n) * (p * (1.0 - p) / nf + z2n / (4.0 * nf)).sqrt();
    let lo = if hits == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let hi = if hits == n {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    Ok((lo, hi))
}

/// Fraction of `samples` at or above `y`, with its Wilson interval.
pub fn empirical_tail(samples: &[f64], y: f64, confidence: f64) -> Result<McEstimate> {
    if samples.is_empty() {
        return Err(Error::Argument("empty sample set".into()));
    }
    let hits = samples.iter().filter(|&&x| x >= y).count();
    tail_from_counts(y, hits, samples.len(), confidence)
}

pub fn tail_from_counts(y: f64, hits: usize, n: usize, confidence: f64) -> Result<McEstimate> {
    let (ci_lo, ci_hi) = wilson_interval(hits, n, confidence)?;
    Ok(McEstimate {
        y,
        n,
        hits,
        p_hat: hits as f64 / n as f64,
        ci_lo,
        ci_hi,
        confidence,
    })
}

/// Streams `n` draws and counts those at or above `y` without storing them.
pub fn estimate_tail(
    spec: DistributionSpec,
    seed: u64,
    stream: u64,
    n: usize,
    y: f64,
    confidence: f64,
) -> Result<McEstimate> {
    let hits = Sampler::substream(spec, seed, stream)
        .take(n)
        .filter(|&x| x >= y)
        .count();
    tail_from_counts(y, hits, n, confidence)
}
