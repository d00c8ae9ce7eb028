//! The lower-bound objective `L(α, δ, y)`, its first-order curves and the
//! reduced one-parameter objective `L(α, δ*(α), y)`.

use crate::cumulant::Cumulant;
use crate::error::{Error, Result};
use crate::legendre::{xi, Tilt};
use crate::numerics::{find_root, maximize_unimodal, OptimBracket, RootBracket};

use super::{require_scaled_tail, ErrorSink};

/// Everything about `L` at one `(α, δ, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveState {
    pub alpha: f64,
    pub delta: f64,
    pub y: f64,
    pub a: f64,
    pub b: f64,
    /// `L(α, δ, y)`, or `-inf` when `1 − A − B ≤ 0`.
    pub l: f64,
    /// `G = B·Ξ(δy) − (1 − A)·Ξ(αy)`; `∂L/∂δ = L·G·y / (1 − A − B)`.
    pub g: f64,
    pub xi_alpha_y: f64,
    pub xi_delta_y: f64,
}

impl ObjectiveState {
    pub fn is_feasible(&self) -> bool {
        self.l.is_finite()
    }
}

/// Per-`α` quantities shared by every `δ` evaluated at that `α`.
pub(crate) struct AlphaTerms<'m, M: ?Sized> {
    pub tilt: Tilt<'m, M>,
    pub a: f64,
    /// `1 − A`, computed without cancellation.
    pub one_minus_a: f64,
    /// `I(αy)`.
    pub base_rate: f64,
}

impl<'m, M: Cumulant + ?Sized> AlphaTerms<'m, M> {
    pub fn new(model: &'m M, alpha: f64, y: f64) -> Result<Self> {
        let tilt = Tilt::new(model, alpha, y)?;
        let i_alpha_y = tilt.rate_at(y)?;
        Ok(Self {
            a: (-i_alpha_y).exp(),
            one_minus_a: -(-i_alpha_y).exp_m1(),
            base_rate: tilt.center_rate()?,
            tilt,
        })
    }

    pub fn delta_star(&self) -> Result<f64> {
        if !(self.one_minus_a > 0.0) {
            return Err(Error::Degenerate(format!(
                "A = 1 at alpha = {}; delta* = (alpha − A)/(1 − A) is undefined",
                self.tilt.alpha
            )));
        }
        // (α − A)/(1 − A) = 1 + (α − 1)/(1 − A)
        Ok(1.0 + (self.tilt.alpha - 1.0) / self.one_minus_a)
    }

    /// `(B, Ξ(δy))` at `δ`.
    pub fn b_at(&self, delta: f64) -> Result<(f64, f64)> {
        let t = delta * self.tilt.y;
        let xt = xi(self.tilt.model(), t)?;
        Ok(((-self.tilt.rate_with_dual(t, xt)?).exp(), xt))
    }

    pub fn g_at(&self, delta: f64) -> Result<f64> {
        let (b, xt) = self.b_at(delta)?;
        Ok(b * xt - self.one_minus_a * self.tilt.center)
    }

    /// `ln L` at `δ` together with the state; `-inf` when infeasible.
    pub fn state(&self, delta: f64) -> Result<(ObjectiveState, f64)> {
        let (b, xt) = self.b_at(delta)?;
        let margin = self.one_minus_a - b;
        let (alpha, y) = (self.tilt.alpha, self.tilt.y);
        let xa = self.tilt.center;
        let log_l = if margin > 0.0 {
            margin.ln() - self.base_rate - xa * y * (delta - alpha)
        } else {
            f64::NEG_INFINITY
        };
        let state = ObjectiveState {
            alpha,
            delta,
            y,
            a: self.a,
            b,
            l: if margin > 0.0 {
                log_l.exp()
            } else {
                f64::NEG_INFINITY
            },
            g: b * xt - self.one_minus_a * xa,
            xi_alpha_y: xa,
            xi_delta_y: xt,
        };
        Ok((state, log_l))
    }
}

/// `L(α, δ, y) = (1 − A − B)·exp(−I(αy) − Ξ(αy)·y·(δ − α))` for `1 < α < δ`.
///
/// Any finite value is a lower bound on `P(X ≥ y)`.
pub fn objective_l<M: Cumulant + ?Sized>(
    model: &M,
    alpha: f64,
    delta: f64,
    y: f64,
) -> Result<ObjectiveState> {
    if !(1.0 < alpha && alpha < delta) {
        return Err(Error::Argument(format!(
            "objective needs 1 < alpha < delta, got alpha = {alpha}, delta = {delta}"
        )));
    }
    require_scaled_tail(model, y)?;
    Ok(AlphaTerms::new(model, alpha, y)?.state(delta)?.0)
}

/// First-order optimal `δ` for fixed `α`: `δ* = (α − A)/(1 − A)`.
pub fn delta_star<M: Cumulant + ?Sized>(model: &M, alpha: f64, y: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Argument(format!(
            "delta* needs alpha > 1, got {alpha}"
        )));
    }
    require_scaled_tail(model, y)?;
    AlphaTerms::new(model, alpha, y)?.delta_star()
}

/// `G(α, δ, y) = B·Ξ(δy) − (1 − A)·Ξ(αy)`.
pub fn g_function<M: Cumulant + ?Sized>(model: &M, alpha: f64, delta: f64, y: f64) -> Result<f64> {
    require_scaled_tail(model, y)?;
    AlphaTerms::new(model, alpha, y)?.g_at(delta)
}

const DELTA_HAT_REACH: f64 = 1e6;

impl<M: Cumulant + ?Sized> AlphaTerms<'_, M> {
    /// Returns `(δ̄, δ̂)`: the maximizer of `G(α, ·, y)` and the root to its right.
    pub fn delta_hat(&self) -> Result<(f64, f64)> {
        let alpha = self.tilt.alpha;
        let sink = ErrorSink::default();
        let g = |d: f64| sink.absorb(self.g_at(d));

        let mut lo = alpha;
        let mut hi = 2.0 * alpha;
        let mut g_hi = g(hi);
        while g_hi >= 0.0 {
            if g_hi.is_nan() {
                break;
            }
            lo = hi;
            hi *= 2.0;
            if hi > DELTA_HAT_REACH * alpha {
                return Err(Error::SolverFailure {
                    reason: format!(
                        "G(alpha = {alpha}, delta) has no sign change below {}",
                        DELTA_HAT_REACH * alpha
                    ),
                    profile: Vec::new(),
                });
            }
            g_hi = g(hi);
        }
        let peak = maximize_unimodal(g, &OptimBracket::new(alpha, hi)?.with_tol_x(1e-10 * hi))?;
        let start = peak.x.max(lo);
        let bracket = RootBracket::from_values(start, hi, g(start), g_hi)?
            .with_tol_f(1e-13 * self.tilt.center.abs().max(1e-300))
            .with_tol_x(1e-14 * hi);
        let root = find_root(g, &bracket);
        sink.finish(())?;
        Ok((peak.x, root?))
    }
}

/// `δ̂(α, y)`: the unique root of `G(α, ·, y)` on `(α, ∞)`.
pub fn delta_hat<M: Cumulant + ?Sized>(model: &M, alpha: f64, y: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Argument(format!(
            "delta-hat needs alpha > 1, got {alpha}"
        )));
    }
    require_scaled_tail(model, y)?;
    Ok(AlphaTerms::new(model, alpha, y)?.delta_hat()?.1)
}

/// `L` along the first-order curve, `L(α, δ*(α), y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPoint {
    pub alpha: f64,
    pub delta_star: f64,
    pub a: f64,
    pub b_hat: f64,
    /// `1 − A − B̂`; positive exactly on the feasible set.
    pub margin: f64,
    /// `ln L`, `-inf` when infeasible.
    pub log_l: f64,
    pub l: f64,
}

impl<M: Cumulant + ?Sized> AlphaTerms<'_, M> {
    pub fn reduced(&self) -> Result<ReducedPoint> {
        let d = self.delta_star()?;
        let (state, log_l) = self.state(d)?;
        Ok(ReducedPoint {
            alpha: self.tilt.alpha,
            delta_star: d,
            a: self.a,
            b_hat: state.b,
            margin: self.one_minus_a - state.b,
            log_l,
            l: if log_l.is_finite() { log_l.exp() } else { 0.0 },
        })
    }
}

pub fn reduced_objective<M: Cumulant + ?Sized>(
    model: &M,
    alpha: f64,
    y: f64,
) -> Result<ReducedPoint> {
    if !(alpha > 1.0) {
        return Err(Error::Argument(format!(
            "reduced objective needs alpha > 1, got {alpha}"
        )));
    }
    require_scaled_tail(model, y)?;
    AlphaTerms::new(model, alpha, y)?.reduced()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulant::CumulantModel;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn gamma8() -> CumulantModel {
        "gamma:8,1".parse().unwrap()
    }

    /// Closed-form pieces for gamma(8,1): Ξ(t) = 1 − 8/t, K(Ξ(t)) = 8 ln(t/8).
    fn gamma8_a_b(alpha: f64, delta: f64, y: f64) -> (f64, f64) {
        let xi = |t: f64| 1.0 - 8.0 / t;
        let kx = |t: f64| 8.0 * (t / 8.0).ln();
        let rate = |t: f64| t * (xi(t) - xi(alpha * y)) + kx(alpha * y) - kx(t);
        ((-rate(y)).exp(), (-rate(delta * y)).exp())
    }

    #[test]
    fn infeasible_point() {
        let s = objective_l(&gamma8(), 1.2, 2.0, 16.0).unwrap();
        let (a, b) = gamma8_a_b(1.2, 2.0, 16.0);
        assert_relative_eq!(s.a, a, max_relative = 1e-11);
        assert_relative_eq!(s.b, b, max_relative = 1e-11);
        assert_abs_diff_eq!(1.0 - s.a - s.b, -0.1697, epsilon = 1e-4);
        assert_eq!(s.l, f64::NEG_INFINITY);
        assert!(!s.is_feasible());
    }

    #[test]
    fn feasible_point() {
        let s = objective_l(&gamma8(), 1.2, 2.699, 16.0).unwrap();
        let (a, b) = gamma8_a_b(1.2, 2.699, 16.0);
        // I(αy) = 19.2·(1 − 8/19.2) − 8 ln 2.4; Ξ(αy)·y·(δ − α)
        let base = 19.2 * (1.0 - 8.0 / 19.2) - 8.0 * 2.4f64.ln();
        let expected = (1.0 - a - b) * (-base - (1.0 - 8.0 / 19.2) * 16.0 * (2.699 - 1.2)).exp();
        assert_relative_eq!(s.l, expected, max_relative = 1e-9);
        assert_abs_diff_eq!(s.l, 1.11e-9, epsilon = 0.01e-9);
        assert_relative_eq!(
            s.g,
            s.b * s.xi_delta_y - (1.0 - s.a) * s.xi_alpha_y,
            max_relative = 1e-12
        );
    }

    #[test]
    fn near_diagonal_is_infeasible() {
        let s = objective_l(&gamma8(), 1.2, 1.2 + 1e-9, 16.0).unwrap();
        assert!(!s.is_feasible());
    }

    #[test]
    fn objective_preconditions() {
        assert!(matches!(
            objective_l(&gamma8(), 1.0, 2.0, 16.0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            objective_l(&gamma8(), 1.5, 1.4, 16.0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            objective_l(&gamma8(), 1.2, 2.0, 8.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn delta_star_examples() {
        let (a, _) = gamma8_a_b(1.2, 2.0, 16.0);
        let d = delta_star(&gamma8(), 1.2, 16.0).unwrap();
        assert_relative_eq!(d, (1.2 - a) / (1.0 - a), max_relative = 1e-10);
        assert_abs_diff_eq!(d, 2.699, epsilon = 1e-3);
        // α → 1⁺ sends δ* to infinity
        assert!(delta_star(&gamma8(), 1.0 + 1e-5, 16.0).unwrap() > 1e4);
        // A → 0 sends δ* to α
        let far = delta_star(&gamma8(), 40.0, 16.0).unwrap();
        assert_relative_eq!(far, 40.0, max_relative = 1e-6);
    }

    #[test]
    fn delta_star_zeroes_alpha_derivative() {
        let m = gamma8();
        for alpha in [1.1, 1.2, 1.3] {
            let d = delta_star(&m, alpha, 16.0).unwrap();
            let h = 1e-6;
            let lp = objective_l(&m, alpha + h, d, 16.0).unwrap().l;
            let lm = objective_l(&m, alpha - h, d, 16.0).unwrap().l;
            let l0 = objective_l(&m, alpha, d, 16.0).unwrap().l;
            let deriv = (lp - lm) / (2.0 * h);
            assert!(
                deriv.abs() <= 1e-5 * l0 * 16.0 * 16.0,
                "alpha={alpha} dL/da={deriv} L={l0}"
            );
        }
    }

    #[test]
    fn delta_star_degenerate_at_one() {
        assert!(matches!(
            delta_star(&gamma8(), 1.0, 16.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn delta_hat_example() {
        // Sign-change scan of G(δ) on a fine grid, then bisection on the cell.
        let m = gamma8();
        let (a, _) = gamma8_a_b(1.2, 2.0, 16.0);
        let g = |d: f64| {
            let (_, b) = gamma8_a_b(1.2, d, 16.0);
            b * (1.0 - 8.0 / (16.0 * d)) - (1.0 - a) * (1.0 - 8.0 / 19.2)
        };
        let mut prev = 1.2;
        let mut cell = None;
        for i in 1..=100_000 {
            let d = 1.2 + 10.0 * i as f64 / 100_000.0;
            if g(prev) > 0.0 && g(d) <= 0.0 {
                cell = Some((prev, d));
                break;
            }
            prev = d;
        }
        let (mut lo, mut hi) = cell.unwrap();
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let dh = delta_hat(&m, 1.2, 16.0).unwrap();
        assert_abs_diff_eq!(dh, lo, epsilon = 1e-9);
        assert_abs_diff_eq!(dh, 2.397, epsilon = 1e-3);
        assert!(g_function(&m, 1.2, dh, 16.0).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn g_at_diagonal_is_a_times_dual() {
        let m = gamma8();
        let (a, _) = gamma8_a_b(1.3, 2.0, 16.0);
        assert_relative_eq!(
            g_function(&m, 1.3, 1.3, 16.0).unwrap(),
            a * (1.0 - 8.0 / 20.8),
            max_relative = 1e-10
        );
    }

    #[test]
    fn normal_delta_hat_exists() {
        let n: CumulantModel = "normal:0,1".parse().unwrap();
        for alpha in [1.01, 1.5, 3.0, 10.0] {
            let dh = delta_hat(&n, alpha, 2.0).unwrap();
            assert!(dh > alpha);
            assert!(g_function(&n, alpha, dh, 2.0).unwrap().abs() < 1e-11);
        }
    }
}
