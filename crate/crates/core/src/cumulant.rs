//! Distribution catalog presented through the cumulant transform `K = log E[e^{ξX}]`.
//!
//! Every catalog entry carries closed forms for `K`, `K'` and `K''`, the upper
//! end `ξ*` of the open domain on which `K` is finite, and an exact right tail.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};

/// `K(ξ)`, `K'(ξ)` and `K''(ξ)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantValues {
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
}

/// Anything with a cumulant transform the dual solver can work with.
pub trait Cumulant {
    /// `K`, `K'`, `K''` at `xi`; fails with [`Error::Domain`] when `xi >= xi_star()`.
    fn cumulant(&self, xi: f64) -> Result<CumulantValues>;

    /// Supremum of the open domain `(-inf, ξ*)`.
    fn xi_star(&self) -> f64;

    /// `K'(0)`.
    fn mean(&self) -> f64;

    /// Open interval swept by `K'` over the domain.
    fn derivative_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `P(X >= y)` when a closed form is known.
    fn exact_tail(&self, _y: f64) -> Option<f64> {
        None
    }

    fn cumulant_k(&self, xi: f64) -> Result<f64> {
        self.cumulant(xi).map(|v| v.k)
    }

    fn cumulant_k1(&self, xi: f64) -> Result<f64> {
        self.cumulant(xi).map(|v| v.k1)
    }
}

impl<M: Cumulant + ?Sized> Cumulant for &M {
    fn cumulant(&self, xi: f64) -> Result<CumulantValues> {
        (**self).cumulant(xi)
    }
    fn xi_star(&self) -> f64 {
        (**self).xi_star()
    }
    fn mean(&self) -> f64 {
        (**self).mean()
    }
    fn derivative_range(&self) -> (f64, f64) {
        (**self).derivative_range()
    }
    fn exact_tail(&self, y: f64) -> Option<f64> {
        (**self).exact_tail(y)
    }
}

/// Catalog family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DistributionSpec {
    Gamma { shape: f64, scale: f64 },
    Exponential { rate: f64 },
    Normal { location: f64, scale: f64 },
    Poisson { rate: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

impl DistributionSpec {
    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::Gamma { shape, scale }.validated()
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn normal(location: f64, scale: f64) -> Result<Self> {
        Self::Normal { location, scale }.validated()
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        Self::Poisson { rate }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Gamma { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
            }
            Self::Exponential { rate } | Self::Poisson { rate } => positive("rate", rate)?,
            Self::Normal { location, scale } => {
                if !location.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "location",
                        value: location,
                        reason: "must be finite",
                    });
                }
                positive("scale", scale)?;
            }
        }
        Ok(self)
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Gamma { .. } => "gamma",
            Self::Exponential { .. } => "exp",
            Self::Normal { .. } => "normal",
            Self::Poisson { .. } => "poisson",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Gamma { shape, scale } => vec![shape, scale],
            Self::Exponential { rate } | Self::Poisson { rate } => vec![rate],
            Self::Normal { location, scale } => vec![location, scale],
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().iter().map(|p| p.to_string()).collect();
        write!(f, "{}:{}", self.family(), params.join(","))
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `family:p1,p2`, e.g. `gamma:8,1`, `normal:0,1`, `exp:1`, `poisson:4`.
    fn from_str(s: &str) -> Result<Self> {
        let syntax = || Error::SpecSyntax(s.to_string());
        let (family, rest) = s.trim().split_once(':').ok_or_else(syntax)?;
        let params = rest
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| syntax())?;
        match (
            family.trim().to_ascii_lowercase().as_str(),
            params.as_slice(),
        ) {
            ("gamma", &[shape, scale]) => Self::gamma(shape, scale),
            ("gamma", &[shape]) => Self::gamma(shape, 1.0),
            ("exp" | "exponential", &[rate]) => Self::exponential(rate),
            ("normal" | "gaussian", &[location, scale]) => Self::normal(location, scale),
            ("poisson", &[rate]) => Self::poisson(rate),
            _ => Err(syntax()),
        }
    }
}

/// A catalog distribution with closed-form cumulant transform.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantModel {
    pub name: String,
    pub spec: DistributionSpec,
    pub params: Vec<f64>,
    pub xi_star: f64,
    pub mean: f64,
}

impl CumulantModel {
    pub fn new(spec: DistributionSpec) -> Result<Self> {
        let spec = spec.validated()?;
        let (xi_star, mean) = match spec {
            DistributionSpec::Gamma { shape, scale } => (1.0 / scale, shape * scale),
            DistributionSpec::Exponential { rate } => (rate, 1.0 / rate),
            DistributionSpec::Normal { location, .. } => (f64::INFINITY, location),
            DistributionSpec::Poisson { rate } => (f64::INFINITY, rate),
        };
        Ok(Self {
            name: spec.to_string(),
            params: spec.params(),
            spec,
            xi_star,
            mean,
        })
    }

    /// Shape and scale of the gamma law behind gamma and exponential entries.
    fn gamma_params(&self) -> Option<(f64, f64)> {
        match self.spec {
            DistributionSpec::Gamma { shape, scale } => Some((shape, scale)),
            DistributionSpec::Exponential { rate } => Some((1.0, 1.0 / rate)),
            _ => None,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.spec {
            DistributionSpec::Gamma { shape, scale } => shape * scale * scale,
            DistributionSpec::Exponential { rate } => 1.0 / (rate * rate),
            DistributionSpec::Normal { scale, .. } => scale * scale,
            DistributionSpec::Poisson { rate } => rate,
        }
    }

    /// Whether the support is the integers (tails are step functions).
    pub fn is_lattice(&self) -> bool {
        matches!(self.spec, DistributionSpec::Poisson { .. })
    }
}

impl FromStr for CumulantModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

/// Builds the catalog model for `spec`.
pub fn make_model(spec: DistributionSpec) -> Result<CumulantModel> {
    CumulantModel::new(spec)
}

impl Cumulant for CumulantModel {
    fn cumulant(&self, xi: f64) -> Result<CumulantValues> {
        if xi.is_nan() || xi >= self.xi_star {
            return Err(Error::Domain {
                xi,
                xi_star: self.xi_star,
            });
        }
        let values = match self.spec {
            DistributionSpec::Normal { location, scale } => {
                let var = scale * scale;
                CumulantValues {
                    k: location * xi + 0.5 * var * xi * xi,
                    k1: location + var * xi,
                    k2: var,
                }
            }
            DistributionSpec::Poisson { rate } => {
                let e = xi.exp();
                CumulantValues {
                    k: rate * xi.exp_m1(),
                    k1: rate * e,
                    k2: rate * e,
                }
            }
            _ => {
                let (shape, scale) = self.gamma_params().expect("gamma family");
                let u = 1.0 - scale * xi;
                CumulantValues {
                    k: -shape * (-scale * xi).ln_1p(),
                    k1: shape * scale / u,
                    k2: shape * scale * scale / (u * u),
                }
            }
        };
        Ok(values)
    }

    fn xi_star(&self) -> f64 {
        self.xi_star
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn derivative_range(&self) -> (f64, f64) {
        match self.spec {
            DistributionSpec::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn exact_tail(&self, y: f64) -> Option<f64> {
        Some(exact_tail(self, y))
    }
}

/// Shapes up to this size use the finite Poisson series when integral.
const POISSON_SERIES_MAX_SHAPE: f64 = 64.0;

/// `P(X >= y)` for a catalog model.
pub fn exact_tail(model: &CumulantModel, y: f64) -> f64 {
    if y.is_nan() {
        return f64::NAN;
    }
    match model.spec {
        DistributionSpec::Normal { location, scale } => {
            0.5 * erfc((y - location) / (scale * std::f64::consts::SQRT_2))
        }
        DistributionSpec::Poisson { rate } => poisson_upper_tail(rate, y),
        DistributionSpec::Exponential { rate } => {
            if y <= 0.0 {
                1.0
            } else {
                (-rate * y).exp()
            }
        }
        DistributionSpec::Gamma { shape, scale } => {
            if y <= 0.0 {
                return 1.0;
            }
            let x = y / scale;
            if shape.fract() == 0.0 && shape <= POISSON_SERIES_MAX_SHAPE {
                erlang_tail(shape as usize, x)
            } else {
                gamma_ur(shape, x)
            }
        }
    }
}

/// `e^{-x} Σ_{j<k} x^j / j!`, summed in log space so large `x` does not underflow early.
fn erlang_tail(k: usize, x: f64) -> f64 {
    let ln_x = x.ln();
    let mut ln_term = -x;
    let mut sum = ln_term.exp();
    for j in 1..k {
        ln_term += ln_x - (j as f64).ln();
        sum += ln_term.exp();
    }
    sum.min(1.0)
}

/// `P(N >= ceil(y))` for `N ~ Poisson(rate)`.
fn poisson_upper_tail(rate: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    let n = y.ceil();
    let ln_pmf = |j: f64| -rate + j * rate.ln() - ln_gamma(j + 1.0);
    if n <= rate {
        // Complement of the lower sum is accurate while the tail is not small.
        let lower: f64 = (0..n as u64).map(|j| ln_pmf(j as f64).exp()).sum();
        return (1.0 - lower).clamp(0.0, 1.0);
    }
    let mut j = n;
    let mut term = ln_pmf(j).exp();
    let mut sum = 0.0;
    while term > 0.0 && term > sum * 1e-17 {
        sum += term;
        j += 1.0;
        term *= rate / j;
    }
    sum.min(1.0)
}
