//! Tail estimates built on the Legendre dual.
//!
//! * [`chernoff_upper`] gives `exp(−I(y))`.
//! * [`lower_bound_new`] is the two-parameter tilted-Chernoff lower bound.
//! * [`stroock_lower`] and [`bo_lower`] are one-parameter lower bounds for comparison.
//! * [`saddlepoint_tail`] is Daniels' approximation, not a bound.

use std::cell::RefCell;

use serde::Serialize;

use crate::cumulant::Cumulant;
use crate::error::{Error, Result};

mod chernoff;
mod comparison;
mod objective;
mod optimizer;
mod saddlepoint;

pub use chernoff::{chernoff_upper, Tail};
pub use comparison::{
    bo_lower, bo_objective, stroock_lower, stroock_objective, BoPoint, SCAN_POINTS,
};
pub use objective::{
    delta_hat, delta_star, g_function, objective_l, reduced_objective, ObjectiveState, ReducedPoint,
};
pub use optimizer::{lower_bound_new, lower_bound_new_with, CrossCheck, NewBoundOptions};
pub use saddlepoint::{
    saddlepoint_tail, saddlepoint_tail_with, SaddlepointEstimate, DEFAULT_TRUNCATION_NATS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Ok,
    /// The method's own applicability condition fails everywhere it was searched.
    Inapplicable,
    Infeasible,
    SolverFailure,
}

/// A bound value with optimizer diagnostics.
///
/// `value` is `None` unless `status` is [`BoundStatus::Ok`]. Values are raw, not
/// clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: Option<f64>,
    pub status: BoundStatus,
    pub alpha_opt: Option<f64>,
    pub delta_opt: Option<f64>,
    /// Feasibility frontier `α̂` (new bound only).
    pub alpha_hat: Option<f64>,
    /// Minimizer `α̌` of `δ*(α)` (new bound only).
    pub alpha_check: Option<f64>,
    pub cross_check: Option<CrossCheck>,
    pub evals: usize,
}

impl BoundResult {
    pub(crate) fn inapplicable(evals: usize) -> Self {
        Self {
            value: None,
            status: BoundStatus::Inapplicable,
            alpha_opt: None,
            delta_opt: None,
            alpha_hat: None,
            alpha_check: None,
            cross_check: None,
            evals,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == BoundStatus::Ok
    }
}

pub(crate) fn require_right_tail<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<()> {
    if y > model.mean() {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "y must exceed the mean ({})",
            model.mean()
        )))
    }
}

/// The scaled tilts `αy`, `δy` move above `y` only when `y > 0`.
pub(crate) fn require_scaled_tail<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<()> {
    require_right_tail(model, y)?;
    if y > 0.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("scaled tilts need y > 0, got {y}")))
    }
}

/// Collects the first error raised inside a closure that must return `f64`.
#[derive(Default)]
pub(crate) struct ErrorSink(RefCell<Option<Error>>);

impl ErrorSink {
    pub(crate) fn absorb(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    pub(crate) fn finish<T>(self, value: T) -> Result<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}
