//! Legendre dual of the cumulant transform.
//!
//! `Ξ(y)` solves `K'(ξ) = y`; it is increasing, concave on the right tail, and
//! vanishes at the mean. The rate function and the rates of the exponentially
//! tilted measures are all written in integral-free form through `Ξ` and `K`:
//!
//! ```text
//! I(y)      = y Ξ(y) − K(Ξ(y))
//! I_α(t)    = t (Ξ(t) − Ξ(αy)) + K(Ξ(αy)) − K(Ξ(t))
//! ```
//!
//! where `I_α` is the rate of the measure tilted by `Ξ(αy)`, whose mean is `αy`.

use crate::cumulant::{Cumulant, CumulantValues};
use crate::error::{Error, Result};
use crate::numerics::{find_root, RootBracket};

const DUAL_TOL_F: f64 = 1e-12;
const DUAL_TOL_X: f64 = 1e-15;
const DUAL_MAX_ITER: usize = 200;
/// Rates this far below zero are rounding noise and clamp to 0.
const RATE_CLAMP: f64 = 1e-12;

/// `Ξ`, `Ξ'` and the rate at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPoint {
    pub y: f64,
    pub xi: f64,
    pub xi_prime: f64,
    pub rate: f64,
}

fn bracket_right<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<(f64, f64)> {
    let xi_star = model.xi_star();
    let mut lo = 0.0;
    if xi_star.is_finite() {
        for n in 1..=60 {
            let b = xi_star * (1.0 - (-(n as f64)).exp2());
            if b >= xi_star {
                break;
            }
            if model.cumulant_k1(b)? > y {
                return Ok((lo, b));
            }
            lo = b;
        }
    } else {
        let mut b: f64 = 1.0;
        while b.is_finite() {
            if model.cumulant_k1(b)? > y {
                return Ok((lo, b));
            }
            lo = b;
            b *= 2.0;
        }
    }
    let (lo, hi) = model.derivative_range();
    Err(Error::Range { y, lo, hi })
}

fn bracket_left<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<(f64, f64)> {
    let mut hi = 0.0;
    let mut b: f64 = -1.0;
    while b.is_finite() {
        if model.cumulant_k1(b)? < y {
            return Ok((b, hi));
        }
        hi = b;
        b *= 2.0;
    }
    let (lo, hi) = model.derivative_range();
    Err(Error::Range { y, lo, hi })
}

/// `Ξ(y)`: the root of `K'(ξ) = y`, nonnegative iff `y` is at or above the mean.
pub fn xi<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<f64> {
    let (lo, hi) = model.derivative_range();
    if !(y > lo && y < hi) {
        return Err(Error::Range { y, lo, hi });
    }
    let mean = model.mean();
    if y == mean {
        return Ok(0.0);
    }
    let (a, b) = if y > mean {
        bracket_right(model, y)?
    } else {
        bracket_left(model, y)?
    };

    let mut failure = None;
    let mut f = |x: f64| match model.cumulant_k1(x) {
        Ok(k1) => k1 - y,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let (fa, fb) = (f(a), f(b));
    let bracket = RootBracket::from_values(a, b, fa, fb)?
        .with_tol_f(DUAL_TOL_F * y.abs().max(1.0))
        .with_tol_x(DUAL_TOL_X * a.abs().max(b.abs()).max(1.0))
        .with_max_iter(DUAL_MAX_ITER);
    let root = find_root(&mut f, &bracket);
    if let Some(e) = failure {
        return Err(e);
    }
    root
}

/// `Ξ⁻¹(λ) = K'(λ)`.
pub fn xi_inverse<M: Cumulant + ?Sized>(model: &M, lambda: f64) -> Result<f64> {
    model.cumulant_k1(lambda)
}

/// `Ξ'(y) = 1 / K''(Ξ(y))`.
pub fn xi_prime<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<f64> {
    let x = xi(model, y)?;
    Ok(1.0 / model.cumulant(x)?.k2)
}

fn clamp_rate(value: f64, scale: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -RATE_CLAMP * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!("{what} evaluated to {value} < 0")))
    }
}

/// Rate function `I(y) = y Ξ(y) − K(Ξ(y))`.
pub fn rate<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<f64> {
    Ok(dual_point(model, y)?.rate)
}

pub fn dual_point<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<DualPoint> {
    let x = xi(model, y)?;
    let CumulantValues { k, k2, .. } = model.cumulant(x)?;
    let raw = y * x - k;
    Ok(DualPoint {
        y,
        xi: x,
        xi_prime: 1.0 / k2,
        rate: clamp_rate(raw, (y * x).abs() + k.abs(), "rate")?,
    })
}

/// The measure tilted by `Ξ(αy)`, seen from the original cumulant transform.
///
/// Holds `Ξ(αy)` and `K(Ξ(αy))` so repeated tilted-rate evaluations at the
/// same `(α, y)` solve for the center only once.
#[derive(Debug, Clone, Copy)]
pub struct Tilt<'m, M: ?Sized> {
    model: &'m M,
    pub alpha: f64,
    pub y: f64,
    /// `Ξ(αy)`.
    pub center: f64,
    k_center: f64,
}

impl<'m, M: Cumulant + ?Sized> Tilt<'m, M> {
    pub fn new(model: &'m M, alpha: f64, y: f64) -> Result<Self> {
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(Error::Argument(format!(
                "tilt factor alpha must be >= 1, got {alpha}"
            )));
        }
        if !(y > model.mean()) {
            return Err(Error::Argument(format!(
                "y must exceed the mean ({}), got {y}",
                model.mean()
            )));
        }
        let center = xi(model, alpha * y)?;
        let k_center = model.cumulant_k(center)?;
        Ok(Self {
            model,
            alpha,
            y,
            center,
            k_center,
        })
    }

    pub fn model(&self) -> &'m M {
        self.model
    }

    /// `I(αy)`, the untilted rate at the tilt center.
    pub fn center_rate(&self) -> Result<f64> {
        let t = self.alpha * self.y;
        let raw = t * self.center - self.k_center;
        clamp_rate(raw, (t * self.center).abs() + self.k_center.abs(), "rate")
    }

    /// `Ξ` of the tilted measure at `t`: `Ξ(t) − Ξ(αy)`.
    pub fn dual(&self, t: f64) -> Result<f64> {
        Ok(xi(self.model, t)? - self.center)
    }

    /// `I_α(t) = t (Ξ(t) − Ξ(αy)) + K(Ξ(αy)) − K(Ξ(t))`.
    pub fn rate_at(&self, t: f64) -> Result<f64> {
        let xt = xi(self.model, t)?;
        self.rate_with_dual(t, xt)
    }

    /// As [`Tilt::rate_at`] with `Ξ(t)` supplied by the caller.
    pub fn rate_with_dual(&self, t: f64, xi_t: f64) -> Result<f64> {
        let kt = self.model.cumulant_k(xi_t)?;
        let raw = t * (xi_t - self.center) + self.k_center - kt;
        let scale = (t * xi_t).abs() + (t * self.center).abs() + self.k_center.abs() + kt.abs();
        clamp_rate(raw, scale, "tilted rate")
    }

    /// `I_α(δy)`.
    pub fn rate_at_multiple(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0) {
            return Err(Error::Argument(format!(
                "delta must be positive, got {delta}"
            )));
        }
        self.rate_at(delta * self.y)
    }
}

/// `I_α(δy)`; `δ = 1` gives `I_α(y)` and `δ = α` gives 0.
pub fn tilted_rate<M: Cumulant + ?Sized>(model: &M, alpha: f64, delta: f64, y: f64) -> Result<f64> {
    Tilt::new(model, alpha, y)?.rate_at_multiple(delta)
}

/// The two tilted-Chernoff penalties at `(α, δ, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedRates {
    pub alpha: f64,
    pub delta: f64,
    pub y: f64,
    /// `I_α(y)`.
    pub i_alpha_y: f64,
    /// `I_α(δy)`.
    pub i_alpha_delta_y: f64,
    /// `exp(−I_α(y))`.
    pub a: f64,
    /// `exp(−I_α(δy))`.
    pub b: f64,
}

pub fn tilted_pair<M: Cumulant + ?Sized>(
    model: &M,
    alpha: f64,
    delta: f64,
    y: f64,
) -> Result<TiltedRates> {
    let tilt = Tilt::new(model, alpha, y)?;
    let i_alpha_y = tilt.rate_at(y)?;
    let i_alpha_delta_y = tilt.rate_at_multiple(delta)?;
    Ok(TiltedRates {
        alpha,
        delta,
        y,
        i_alpha_y,
        i_alpha_delta_y,
        a: (-i_alpha_y).exp(),
        b: (-i_alpha_delta_y).exp(),
    })
}

/// Cumulant transform of the tilted measure, `K_α(θ) = K(θ + Ξ(αy)) − K(Ξ(αy))`.
///
/// Lets the dual of the tilted measure be solved directly instead of through the
/// shift identity, which is how the identity itself gets checked.
#[derive(Debug, Clone, Copy)]
pub struct TiltedModel<'m, M: ?Sized> {
    tilt: Tilt<'m, M>,
}

impl<'m, M: Cumulant + ?Sized> TiltedModel<'m, M> {
    pub fn new(model: &'m M, alpha: f64, y: f64) -> Result<Self> {
        Ok(Self {
            tilt: Tilt::new(model, alpha, y)?,
        })
    }

    pub fn shift(&self) -> f64 {
        self.tilt.center
    }
}

impl<M: Cumulant + ?Sized> Cumulant for TiltedModel<'_, M> {
    fn cumulant(&self, theta: f64) -> Result<CumulantValues> {
        let inner = self
            .tilt
            .model
            .cumulant(theta + self.tilt.center)
            .map_err(|e| match e {
                Error::Domain { xi, xi_star } => Error::Domain {
                    xi: xi - self.tilt.center,
                    xi_star: xi_star - self.tilt.center,
                },
                other => other,
            })?;
        Ok(CumulantValues {
            k: inner.k - self.tilt.k_center,
            ..inner
        })
    }

    fn xi_star(&self) -> f64 {
        self.tilt.model.xi_star() - self.tilt.center
    }

    fn mean(&self) -> f64 {
        self.tilt.alpha * self.tilt.y
    }

    fn derivative_range(&self) -> (f64, f64) {
        self.tilt.model.derivative_range()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulant::CumulantModel;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn model(s: &str) -> CumulantModel {
        s.parse().unwrap()
    }

    #[test]
    fn dual_examples() {
        assert_abs_diff_eq!(xi(&model("gamma:8,1"), 16.0).unwrap(), 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(xi(&model("normal:0,1"), 2.5).unwrap(), 2.5, epsilon = 1e-13);
        for s in ["gamma:8,1", "gamma:3,2", "exp:1", "normal:0,1", "poisson:4"] {
            let m = model(s);
            assert_eq!(xi(&m, m.mean).unwrap(), 0.0);
        }
    }

    #[test]
    fn dual_residual_and_sign() {
        for (s, ys) in [
            ("gamma:8,1", vec![0.1, 3.0, 7.9, 8.1, 16.0, 1e4]),
            ("poisson:4", vec![0.01, 2.0, 4.5, 60.0]),
            ("normal:1,2", vec![-30.0, 0.0, 1.5, 40.0]),
        ] {
            let m = model(s);
            for y in ys {
                let x = xi(&m, y).unwrap();
                let r = m.cumulant(x).unwrap().k1 - y;
                assert!(
                    r.abs() <= 1e-12 * y.abs().max(1.0) || r.abs() <= 1e-9,
                    "{s} y={y} r={r}"
                );
                assert_eq!(x > 0.0, y > m.mean, "{s} y={y}");
            }
        }
    }

    #[test]
    fn dual_rejects_out_of_range() {
        assert!(matches!(
            xi(&model("gamma:8,1"), 0.0),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            xi(&model("gamma:8,1"), -1.0),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            xi(&model("poisson:4"), 0.0),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_abs_diff_eq!(
            xi_inverse(&model("gamma:8,1"), 0.5).unwrap(),
            16.0,
            epsilon = 1e-12
        );
        assert_eq!(xi_inverse(&model("exp:2"), 0.0).unwrap(), 0.5);
        assert_eq!(xi_inverse(&model("normal:0,1"), 1.7).unwrap(), 1.7);
        assert!(matches!(
            xi_inverse(&model("gamma:8,1"), 1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn inverse_round_trip() {
        for s in ["gamma:8,1", "gamma:3,2", "poisson:4", "normal:-1,0.5"] {
            let m = model(s);
            for lambda in [-2.0, -0.3, 0.0, 0.2, 0.45] {
                let back = xi(&m, xi_inverse(&m, lambda).unwrap()).unwrap();
                assert_abs_diff_eq!(back, lambda, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rate_examples() {
        assert_abs_diff_eq!(
            rate(&model("gamma:8,1"), 16.0).unwrap(),
            8.0 - 8.0 * 2f64.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            rate(&model("normal:0,1"), 3.0).unwrap(),
            4.5,
            epsilon = 1e-12
        );
        for s in ["gamma:8,1", "exp:1", "poisson:4"] {
            let m = model(s);
            assert_eq!(rate(&m, m.mean).unwrap(), 0.0);
        }
    }

    #[test]
    fn tilted_rate_examples() {
        let g = model("gamma:8,1");
        // 16 (0.5 − (1 − 8/19.2)) + 8 log 1.2
        let expected = 16.0 * (0.5 - (1.0 - 8.0 / 19.2)) + 8.0 * 1.2f64.ln();
        assert_abs_diff_eq!(expected, 0.125240, epsilon = 1e-6);
        assert_abs_diff_eq!(
            tilted_rate(&g, 1.2, 1.0, 16.0).unwrap(),
            expected,
            epsilon = 1e-12
        );
        assert_eq!(tilted_rate(&g, 1.3, 1.3, 16.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            tilted_rate(&model("normal:0,1"), 1.2, 2.0, 4.0).unwrap(),
            5.12,
            epsilon = 1e-12
        );
    }

    #[test]
    fn tilted_pair_examples() {
        let g = model("gamma:8,1");
        let p = tilted_pair(&g, 1.2, 2.699, 16.0).unwrap();
        // I_α(δy) = 6.66667δ − 6.54143 − 8 log δ with δ = 2.699
        let i_b = 16.0 * 2.699 * (8.0 / 19.2 - 8.0 / (16.0 * 2.699)) - 8.0 * 2.699f64.ln()
            + 8.0 * 1.2f64.ln();
        assert_relative_eq!(p.b, (-i_b).exp(), max_relative = 1e-10);
        assert_abs_diff_eq!(p.a, 0.88229, epsilon = 1e-5);
        assert_abs_diff_eq!(p.b, 0.02993, epsilon = 1e-5);
        assert_eq!(tilted_pair(&g, 1.0, 2.0, 16.0).unwrap().a, 1.0);
        assert_eq!(tilted_pair(&g, 1.4, 1.4, 16.0).unwrap().b, 1.0);
    }

    #[test]
    fn tilted_rate_preconditions() {
        let g = model("gamma:8,1");
        assert!(matches!(
            tilted_rate(&g, 0.9, 2.0, 16.0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            tilted_rate(&g, 1.2, 2.0, 7.0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            tilted_rate(&g, 1.2, -1.0, 16.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn negative_noise_clamps_but_real_violation_errors() {
        assert_eq!(clamp_rate(-1e-13, 1.0, "r").unwrap(), 0.0);
        assert!(matches!(
            clamp_rate(-1e-6, 1.0, "r"),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn tilted_model_dual_is_shifted_dual() {
        let g = model("gamma:8,1");
        let tilted = TiltedModel::new(&g, 1.3, 16.0).unwrap();
        assert_abs_diff_eq!(tilted.mean(), 20.8, epsilon = 1e-12);
        assert_abs_diff_eq!(tilted.cumulant(0.0).unwrap().k1, 20.8, epsilon = 1e-9);
        for t in [12.0, 16.0, 30.0, 90.0] {
            let direct = xi(&tilted, t).unwrap();
            let shifted = xi(&g, t).unwrap() - tilted.shift();
            assert_abs_diff_eq!(direct, shifted, epsilon = 1e-10);
        }
    }
}
