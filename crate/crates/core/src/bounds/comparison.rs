//! One-parameter lower bounds used as baselines: Stroock's Chebyshev-based
//! bound with `δ = 2α − 1`, and the Bagdasarov–Ostrovskii bound.

use crate::cumulant::Cumulant;
use crate::error::Result;
use crate::legendre::{xi, xi_inverse, Tilt};
use crate::numerics::{maximize_unimodal, OptimBracket};

use super::{require_right_tail, require_scaled_tail, BoundResult, BoundStatus, ErrorSink};

/// Number of log-spaced `α − 1` points in the baseline scans.
pub const SCAN_POINTS: usize = 2048;
const SCAN_MIN: f64 = 1e-4;
const SCAN_MAX: f64 = 15.0;
const DOMAIN_SLACK: f64 = 1e-10;

/// Stroock's bound at `α`:
/// `(1 − 1/c)·exp(−I(αy) − Ξ(αy)·y·(α − 1))` with `c = Ξ'(αy)·y²·(α − 1)²`.
///
/// `Ok(None)` when `c ≤ 1` or `(2α − 1)y` lies outside the range of `K'`.
pub fn stroock_objective<M: Cumulant + ?Sized>(
    model: &M,
    alpha: f64,
    y: f64,
) -> Result<Option<f64>> {
    Ok(stroock_log(model, alpha, y)?.map(f64::exp))
}

fn stroock_log<M: Cumulant + ?Sized>(model: &M, alpha: f64, y: f64) -> Result<Option<f64>> {
    require_scaled_tail(model, y)?;
    if !(alpha > 1.0) {
        return Ok(None);
    }
    let (_, hi) = model.derivative_range();
    if !((2.0 * alpha - 1.0) * y < hi) {
        return Ok(None);
    }
    let tilt = match Tilt::new(model, alpha, y) {
        Ok(t) => t,
        Err(_) => return Ok(None),
    };
    let xa = tilt.center;
    let k2 = model.cumulant(xa)?.k2;
    let c = y * y * (alpha - 1.0).powi(2) / k2;
    if !(c > 1.0) {
        return Ok(None);
    }
    let log = (-1.0 / c).ln_1p() - tilt.center_rate()? - xa * y * (alpha - 1.0);
    Ok(Some(log))
}

/// The B-O objective at one `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoPoint {
    pub alpha: f64,
    /// `δ_BO = K'(2Ξ(αy) − Ξ(y)) / y`; `None` when `2Ξ(αy) − Ξ(y) ≥ ξ*`.
    pub delta: Option<f64>,
    pub a: f64,
    pub b: f64,
    /// `1 − Ξ(αy)/(Ξ(αy) − Ξ(y))·(A + B)`.
    pub numerator: f64,
    /// Bound value, `None` unless `delta` exists and both the numerator and
    /// `1 − A − B` are positive.
    pub value: Option<f64>,
    log_value: f64,
}

impl BoPoint {
    fn skipped(alpha: f64) -> Self {
        Self {
            alpha,
            delta: None,
            a: f64::NAN,
            b: f64::NAN,
            numerator: f64::NAN,
            value: None,
            log_value: f64::NEG_INFINITY,
        }
    }
}

pub fn bo_objective<M: Cumulant + ?Sized>(model: &M, alpha: f64, y: f64) -> Result<BoPoint> {
    require_scaled_tail(model, y)?;
    if !(alpha > 1.0) {
        return Ok(BoPoint::skipped(alpha));
    }
    let tilt = match Tilt::new(model, alpha, y) {
        Ok(t) => t,
        Err(_) => return Ok(BoPoint::skipped(alpha)),
    };
    let xa = tilt.center;
    let xy = xi(model, y)?;
    let lambda = 2.0 * xa - xy;
    // Ξ carries solver error, so λ that close to ξ* counts as the boundary itself.
    let xi_star = model.xi_star();
    if !(lambda < xi_star - DOMAIN_SLACK * xi_star.abs().max(1.0)) {
        return Ok(BoPoint::skipped(alpha));
    }
    let delta = xi_inverse(model, lambda)? / y;
    let a = (-tilt.rate_with_dual(y, xy)?).exp();
    let b = (-tilt.rate_with_dual(delta * y, lambda)?).exp();
    let numerator = 1.0 - xa / (xa - xy) * (a + b);
    let feasible = numerator > 0.0 && 1.0 - a - b > 0.0 && delta > alpha;
    let log_value = if feasible {
        numerator.ln() - tilt.center_rate()? - xa * y * (delta - alpha)
    } else {
        f64::NEG_INFINITY
    };
    Ok(BoPoint {
        alpha,
        delta: Some(delta),
        a,
        b,
        numerator,
        value: feasible.then(|| log_value.exp()),
        log_value,
    })
}

/// Dense log-spaced scan of `α − 1` followed by golden refinement between the
/// neighbours of the best scan point.
fn scan_then_refine<F>(mut log_obj: F) -> Result<Option<(f64, f64, usize)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let ratio = (SCAN_MAX / SCAN_MIN).ln();
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| 1.0 + SCAN_MIN * (ratio * i as f64 / (SCAN_POINTS - 1) as f64).exp())
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, &a) in grid.iter().enumerate() {
        let v = log_obj(a)?;
        if v.is_finite() && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let mut evals = SCAN_POINTS;
    let Some((i, v)) = best else {
        return Ok(None);
    };
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(SCAN_POINTS - 1)];
    let sink = ErrorSink::default();
    let ext = maximize_unimodal(
        |a| {
            evals += 1;
            let r = log_obj(a);
            sink.absorb(r).max(f64::MIN)
        },
        &OptimBracket::new(lo, hi)?.with_tol_x(1e-12 * hi),
    )?;
    sink.finish(())?;
    Ok(Some(if ext.fx > v {
        (ext.x, ext.fx, evals)
    } else {
        (grid[i], v, evals)
    }))
}

fn finish(found: Option<(f64, f64, usize)>, delta_of: impl Fn(f64) -> Option<f64>) -> BoundResult {
    match found {
        Some((alpha, log_v, evals)) => BoundResult {
            value: Some(log_v.exp()),
            status: BoundStatus::Ok,
            alpha_opt: Some(alpha),
            delta_opt: delta_of(alpha),
            alpha_hat: None,
            alpha_check: None,
            cross_check: None,
            evals,
        },
        None => BoundResult::inapplicable(SCAN_POINTS),
    }
}

/// Stroock's lower bound maximized over `α ∈ (1, 16]`.
pub fn stroock_lower<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<BoundResult> {
    require_right_tail(model, y)?;
    if !(y > 0.0) {
        return Ok(BoundResult::inapplicable(0));
    }
    let found = scan_then_refine(|a| Ok(stroock_log(model, a, y)?.unwrap_or(f64::NEG_INFINITY)))?;
    Ok(finish(found, |a| Some(2.0 * a - 1.0)))
}

/// The B-O lower bound maximized over `α ∈ (1, 16]`.
pub fn bo_lower<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<BoundResult> {
    require_right_tail(model, y)?;
    if !(y > 0.0) {
        return Ok(BoundResult::inapplicable(0));
    }
    let found = scan_then_refine(|a| Ok(bo_objective(model, a, y)?.log_value))?;
    Ok(finish(found, |a| {
        bo_objective(model, a, y).ok().and_then(|p| p.delta)
    }))
}
