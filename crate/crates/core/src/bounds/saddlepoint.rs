use std::f64::consts::PI;

use crate::cumulant::Cumulant;
use crate::error::Result;
use crate::legendre::dual_point;
use crate::numerics::{integrate_adaptive, DEFAULT_REL_TOL};

use super::{require_right_tail, ErrorSink};

/// Nats by which `I` must grow past `I(y)` before the integral is truncated.
pub const DEFAULT_TRUNCATION_NATS: f64 = 40.0;
const TRUNCATION_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlepointEstimate {
    pub value: f64,
    /// Upper integration limit `T`.
    pub upper_limit: f64,
    pub evals: usize,
    /// The search for `T` hit `1e6·max(|y|, 1)` before `I` grew enough.
    pub truncation_warning: bool,
    pub depth_limited: bool,
}

/// Daniels' approximation `(2π)^{-1/2} ∫_y^∞ √Ξ'(t)·e^{−I(t)} dt`.
pub fn saddlepoint_tail<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<f64> {
    Ok(saddlepoint_tail_with(model, y, DEFAULT_TRUNCATION_NATS)?.value)
}

pub fn saddlepoint_tail_with<M: Cumulant + ?Sized>(
    model: &M,
    y: f64,
    nats: f64,
) -> Result<SaddlepointEstimate> {
    require_right_tail(model, y)?;
    let target = dual_point(model, y)?.rate + nats;
    let sd = model.cumulant(0.0)?.k2.sqrt();
    let cap = TRUNCATION_CAP * y.abs().max(1.0);
    let hi = model.derivative_range().1;

    let mut upper = y;
    let mut step = sd;
    let mut truncation_warning = true;
    while y + step < cap {
        let t = y + step;
        if !(t < hi) {
            break;
        }
        upper = t;
        if dual_point(model, t)?.rate >= target {
            truncation_warning = false;
            break;
        }
        step *= 2.0;
    }
    if truncation_warning && upper < cap.min(hi) && cap < hi {
        upper = cap;
    }

    let sink = ErrorSink::default();
    let norm = (2.0 * PI).sqrt().recip();
    let q = integrate_adaptive(
        |t| sink.absorb(dual_point(model, t).map(|d| norm * d.xi_prime.sqrt() * (-d.rate).exp())),
        y,
        upper,
        DEFAULT_REL_TOL,
    )?;
    sink.finish(())?;
    Ok(SaddlepointEstimate {
        value: q.value,
        upper_limit: upper,
        evals: q.evals,
        truncation_warning,
        depth_limited: q.depth_limited,
    })
}
