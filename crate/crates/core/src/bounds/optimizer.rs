//! Maximization of the two-parameter lower bound.
//!
//! The search runs along the curve `δ*(α)` on which `∂L/∂α = 0`:
//!
//! 1. `α̌ = argmin δ*(α)`; `δ*` is quasiconvex, so golden section applies.
//! 2. `α̂ ∈ (1, α̌]`, the zero of `1 − A − B̂`; the reduced objective is feasible
//!    exactly on `(1, α̂)`.
//! 3. Golden-section maximization of `ln L(α, δ*(α), y)` on `(1, α̂)`.
//! 4. Cross-check: the crossing of `δ*(·)` with `δ̂(·)`, where `∂L/∂δ = 0` too,
//!    must land on the same `α`.

use serde::Serialize;

use crate::cumulant::Cumulant;
use crate::error::{Error, Result};
use crate::legendre::xi;
use crate::numerics::{find_root, maximize_unimodal, minimize_unimodal, OptimBracket, RootBracket};

use super::objective::AlphaTerms;
use super::{require_right_tail, BoundResult, BoundStatus, ErrorSink};

/// Left inset of every α search.
const ALPHA_FLOOR_INSET: f64 = 1e-6;
/// Right inset below the feasibility frontier.
const FRONTIER_INSET: f64 = 1e-9;
const FRONTIER_SCAN: usize = 64;
const PROBE_START: f64 = 1e-3;
const CROSS_CHECK_REL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewBoundOptions {
    /// Golden-section tolerance on `α`.
    pub tol_x: f64,
}

impl Default for NewBoundOptions {
    fn default() -> Self {
        Self { tol_x: 1e-10 }
    }
}

/// Where `δ*(·)` and `δ̂(·)` cross, and how well that agrees with the maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    pub alpha: f64,
    pub delta: f64,
    /// `G(α, δ*(α), y)` at the crossing.
    pub g: f64,
    /// `|α_cross − α*| / α*`.
    pub rel_diff: f64,
    pub agrees: bool,
}

/// The two-parameter tilted-Chernoff lower bound on `P(X ≥ y)` with default options.
pub fn lower_bound_new<M: Cumulant + ?Sized>(model: &M, y: f64) -> Result<BoundResult> {
    lower_bound_new_with(model, y, &NewBoundOptions::default())
}

struct Search<'m, M: ?Sized> {
    model: &'m M,
    y: f64,
    evals: std::cell::Cell<usize>,
}

impl<'m, M: Cumulant + ?Sized> Search<'m, M> {
    fn terms(&self, alpha: f64) -> Result<AlphaTerms<'m, M>> {
        self.evals.set(self.evals.get() + 1);
        AlphaTerms::new(self.model, alpha, self.y)
    }

    fn delta_star(&self, alpha: f64) -> Result<f64> {
        self.terms(alpha)?.delta_star()
    }

    fn margin(&self, alpha: f64) -> Result<f64> {
        Ok(self.terms(alpha)?.reduced()?.margin)
    }

    fn log_l(&self, alpha: f64) -> Result<f64> {
        Ok(self.terms(alpha)?.reduced()?.log_l)
    }

    /// Minimizer of `δ*(α)`, bracketed by probes `1 + s·2^j` until `δ*` has
    /// increased across three consecutive probes.
    fn alpha_check(&self) -> Result<f64> {
        let floor = 1.0 + ALPHA_FLOOR_INSET;
        let mut probes: Vec<(f64, f64)> = Vec::new();
        let mut step = PROBE_START;
        for _ in 0..64 {
            let alpha = 1.0 + step;
            probes.push((alpha, self.delta_star(alpha)?));
            let n = probes.len();
            if n >= 3 && probes[n - 3].1 < probes[n - 2].1 && probes[n - 2].1 < probes[n - 1].1 {
                let hi = probes[n - 2].0;
                let sink = ErrorSink::default();
                let ext = minimize_unimodal(
                    |a| sink.absorb(self.delta_star(a)),
                    &OptimBracket::new(floor, hi)?.with_tol_x(1e-10 * hi),
                )?;
                return sink.finish(ext.x);
            }
            step *= 2.0;
        }
        Err(Error::SolverFailure {
            reason: "delta*(alpha) never started increasing".into(),
            profile: probes,
        })
    }

    /// Zero of `1 − A − B̂` below `alpha_check`.
    fn alpha_hat(&self, alpha_check: f64) -> Result<f64> {
        let floor = ALPHA_FLOOR_INSET;
        let mut span = alpha_check - 1.0;
        let mut profile = Vec::with_capacity(FRONTIER_SCAN);
        let mut last_positive: Option<(f64, f64)> = None;
        // α̂ ≤ α̌ can fail numerically; widen past α̌ a few times.
        for _ in 0..8 {
            let ratio = (span / floor).max(1.0);
            for i in 0..FRONTIER_SCAN {
                let t = i as f64 / (FRONTIER_SCAN - 1) as f64;
                let alpha = 1.0 + floor * ratio.powf(t);
                if let Some((a, _)) = last_positive {
                    if alpha <= a {
                        continue;
                    }
                }
                let m = self.margin(alpha)?;
                profile.push((alpha, m));
                match last_positive {
                    _ if m > 0.0 => last_positive = Some((alpha, m)),
                    Some((a, m_pos)) => {
                        let sink = ErrorSink::default();
                        let bracket = RootBracket::from_values(a, alpha, m_pos, m)?
                            .with_tol_f(1e-13)
                            .with_tol_x(1e-15 * alpha);
                        let root = find_root(|x| sink.absorb(self.margin(x)), &bracket);
                        sink.finish(())?;
                        return root;
                    }
                    None => {}
                }
            }
            span *= 2.0;
        }
        Err(Error::SolverFailure {
            reason: match last_positive {
                None => "no feasible alpha found: 1 − A − B̂ ≤ 0 on the whole scan".into(),
                Some(_) => "feasibility frontier not found: 1 − A − B̂ never turned negative".into(),
            },
            profile,
        })
    }

    /// Crossing of `δ*(·)` and `δ̂(·)` near `alpha_opt` within `(1, alpha_hat)`.
    fn cross_check(&self, alpha_opt: f64, alpha_hat: f64) -> Result<CrossCheck> {
        let floor = 1.0 + ALPHA_FLOOR_INSET;
        let gap = |a: f64| -> Result<f64> {
            let terms = self.terms(a)?;
            Ok(terms.delta_star()? - terms.delta_hat()?.1)
        };
        let sink = ErrorSink::default();
        let mut width = 1e-3 * (alpha_opt - 1.0);
        let (mut lo, mut hi, mut f_lo, mut f_hi);
        loop {
            lo = (alpha_opt - width).max(floor);
            hi = (alpha_opt + width).min(alpha_hat);
            f_lo = gap(lo)?;
            f_hi = gap(hi)?;
            if f_lo * f_hi <= 0.0 || (lo <= floor && hi >= alpha_hat) {
                break;
            }
            width *= 2.0;
        }
        let bracket = RootBracket::from_values(lo, hi, f_lo, f_hi)?
            .with_tol_f(1e-12)
            .with_tol_x(1e-14 * hi);
        let alpha = find_root(|a| sink.absorb(gap(a)), &bracket);
        sink.finish(())?;
        let alpha = alpha?;
        let terms = self.terms(alpha)?;
        let delta = terms.delta_star()?;
        let g = terms.g_at(delta)?;
        let rel_diff = (alpha - alpha_opt).abs() / alpha_opt;
        Ok(CrossCheck {
            alpha,
            delta,
            g,
            rel_diff,
            agrees: rel_diff <= CROSS_CHECK_REL,
        })
    }
}

/// As [`lower_bound_new`] with explicit solver options.
///
/// Fails with [`Error::SolverFailure`] (carrying the scanned profile) if no
/// feasible `α` turns up, rather than returning a zero bound.
pub fn lower_bound_new_with<M: Cumulant + ?Sized>(
    model: &M,
    y: f64,
    opts: &NewBoundOptions,
) -> Result<BoundResult> {
    require_right_tail(model, y)?;
    if !(y > 0.0) {
        return Ok(BoundResult::inapplicable(0));
    }
    xi(model, y)?;
    let search = Search {
        model,
        y,
        evals: std::cell::Cell::new(0),
    };

    let alpha_check = search.alpha_check()?;
    let alpha_hat = search.alpha_hat(alpha_check)?;

    let span = alpha_hat - 1.0;
    let lo = 1.0 + ALPHA_FLOOR_INSET.min(1e-3 * span);
    let hi = alpha_hat - FRONTIER_INSET.min(1e-6 * span);
    let sink = ErrorSink::default();
    let best = maximize_unimodal(
        |a| sink.absorb(search.log_l(a)),
        &OptimBracket::new(lo, hi)?.with_tol_x(opts.tol_x),
    )?;
    sink.finish(())?;
    if !best.fx.is_finite() {
        return Err(Error::SolverFailure {
            reason: format!("reduced objective infeasible on ({lo}, {hi})"),
            profile: vec![(best.x, best.fx)],
        });
    }

    let at_opt = search.terms(best.x)?.reduced()?;
    let cross_check = search.cross_check(best.x, alpha_hat).ok();

    Ok(BoundResult {
        value: Some(at_opt.l),
        status: BoundStatus::Ok,
        alpha_opt: Some(best.x),
        delta_opt: Some(at_opt.delta_star),
        alpha_hat: Some(alpha_hat),
        alpha_check: Some(alpha_check),
        cross_check,
        evals: search.evals.get(),
    })
}
