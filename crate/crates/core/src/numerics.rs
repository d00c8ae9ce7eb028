//! One-dimensional root finding, unimodal maximization and adaptive quadrature.
//!
//! The bound optimizers reduce everything to nested scalar problems, so these
//! three routines carry all of the numerical work below the dual solver.

use crate::error::{Error, Result};

pub const DEFAULT_TOL_X: f64 = 1e-10;
pub const DEFAULT_TOL_F: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const MAX_QUAD_DEPTH: usize = 60;

/// A bracketing interval with a certified sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    f_lo: f64,
    f_hi: f64,
    pub tol_x: f64,
    pub tol_f: f64,
    pub max_iter: usize,
}

impl RootBracket {
    /// Evaluates `f` at both ends and refuses the interval unless the signs differ
    /// (a zero at either end counts as a sign change).
    pub fn new<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Argument(format!(
                "root bracket needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        let (f_lo, f_hi) = (f(lo), f(hi));
        Self::from_values(lo, hi, f_lo, f_hi)
    }

    /// Builds a bracket from endpoint values the caller already computed.
    pub fn from_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Argument(format!(
                "root bracket needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        if f_lo.is_nan() || f_hi.is_nan() || f_lo * f_hi > 0.0 {
            return Err(Error::Bracket { lo, hi, f_lo, f_hi });
        }
        Ok(Self {
            lo,
            hi,
            f_lo,
            f_hi,
            tol_x: DEFAULT_TOL_X,
            tol_f: DEFAULT_TOL_F,
            max_iter: DEFAULT_MAX_ITER,
        })
    }

    pub fn with_tol_x(mut self, tol_x: f64) -> Self {
        self.tol_x = tol_x;
        self
    }

    pub fn with_tol_f(mut self, tol_f: f64) -> Self {
        self.tol_f = tol_f;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

/// Bisection with secant acceleration.
///
/// The secant step is taken through the two most recent iterates; it is replaced
/// by a bisection step whenever it leaves the current bracket or the bracket has
/// failed to halve over the last three steps.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: &RootBracket) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (bracket.f_lo, bracket.f_hi);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.abs() <= bracket.tol_f && fa.abs() <= fb.abs() {
        return Ok(a);
    }
    if fb.abs() <= bracket.tol_f {
        return Ok(b);
    }

    let (mut x_prev, mut f_prev, mut x_cur, mut f_cur) = (a, fa, b, fb);
    let mut width_mark = b - a;
    let mut stalled = 0usize;

    for _ in 0..bracket.max_iter {
        if b - a <= bracket.tol_x {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let mut x = if stalled < 3 && f_cur != f_prev {
            x_cur - f_cur * (x_cur - x_prev) / (f_cur - f_prev)
        } else {
            f64::NAN
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
            stalled = 0;
            width_mark = b - a;
        }
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Internal(format!(
                "root function returned NaN at x = {x}"
            )));
        }
        if fx == 0.0 || fx.abs() <= bracket.tol_f {
            return Ok(x);
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        x_prev = x_cur;
        f_prev = f_cur;
        x_cur = x;
        f_cur = fx;
        if b - a > 0.5 * width_mark {
            stalled += 1;
        } else {
            stalled = 0;
            width_mark = b - a;
        }
    }
    Err(Error::Convergence {
        routine: "find_root",
        iterations: bracket.max_iter,
        x: 0.5 * (a + b),
    })
}

/// Search interval for [`maximize_unimodal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol_x: f64,
    pub max_iter: usize,
}

impl OptimBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Argument(format!(
                "optimization bracket needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            lo,
            hi,
            tol_x: DEFAULT_TOL_X,
            max_iter: DEFAULT_MAX_ITER,
        })
    }

    pub fn with_tol_x(mut self, tol_x: f64) -> Self {
        self.tol_x = tol_x;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub fx: f64,
    pub evals: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal function.
///
/// `f` is only ever evaluated inside `[lo, hi]`. NaN values are treated as `-inf`.
pub fn maximize_unimodal<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: &OptimBracket,
) -> Result<Extremum> {
    let mut eval = |x: f64, evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut evals = 0;
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evals);
    let mut fd = eval(d, &mut evals);

    let mut iter = 0;
    while b - a > bracket.tol_x {
        if iter == bracket.max_iter {
            return Err(Error::Convergence {
                routine: "maximize_unimodal",
                iterations: iter,
                x: 0.5 * (a + b),
            });
        }
        iter += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evals);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evals);
        }
    }
    let m = 0.5 * (a + b);
    let fm = eval(m, &mut evals);
    let best = [(m, fm), (c, fc), (d, fd)]
        .into_iter()
        .fold((m, fm), |acc, p| if p.1 > acc.1 { p } else { acc });
    Ok(Extremum {
        x: best.0,
        fx: best.1,
        evals,
    })
}

/// Golden-section search for the minimum of a unimodal function.
pub fn minimize_unimodal<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: &OptimBracket,
) -> Result<Extremum> {
    let ext = maximize_unimodal(|x| -f(x), bracket)?;
    Ok(Extremum { fx: -ext.fx, ..ext })
}

/// Result of [`integrate_adaptive`]. `depth_limited` is the accuracy warning raised
/// when some subinterval hit the recursion cap before meeting its tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub evals: usize,
    pub depth_limited: bool,
}

const QUAD_PANELS: usize = 16;

/// Adaptive Simpson quadrature to relative tolerance `rel_tol`.
///
/// The tolerance is taken relative to a coarse estimate of `∫|f|`, so integrands
/// that vanish identically or cancel over `[a, b]` still terminate.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Argument(format!(
            "integration needs finite a < b, got [{a}, {b}]"
        )));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Argument(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }

    let h = (b - a) / QUAD_PANELS as f64;
    let nodes: Vec<f64> = (0..=2 * QUAD_PANELS)
        .map(|i| {
            if i == 2 * QUAD_PANELS {
                b
            } else {
                a + 0.5 * h * i as f64
            }
        })
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Argument(format!(
            "integrand is not finite at x = {}",
            nodes[i]
        )));
    }
    let scale: f64 = (0..QUAD_PANELS)
        .map(|p| {
            let (l, m, r) = (
                values[2 * p].abs(),
                values[2 * p + 1].abs(),
                values[2 * p + 2].abs(),
            );
            (nodes[2 * p + 2] - nodes[2 * p]) / 6.0 * (l + 4.0 * m + r)
        })
        .sum();
    let tol = rel_tol * scale;

    let mut state = Simpson {
        f: &mut f,
        evals: values.len(),
        depth_limited: false,
    };
    let mut value = 0.0;
    for p in 0..QUAD_PANELS {
        let (l, r) = (nodes[2 * p], nodes[2 * p + 2]);
        let (fl, fm, fr) = (values[2 * p], values[2 * p + 1], values[2 * p + 2]);
        let whole = (r - l) / 6.0 * (fl + 4.0 * fm + fr);
        value += state.refine(l, r, fl, fm, fr, whole, tol / QUAD_PANELS as f64, 0)?;
    }
    Ok(Quadrature {
        value,
        evals: state.evals,
        depth_limited: state.depth_limited,
    })
}

struct Simpson<'a, F> {
    f: &'a mut F,
    evals: usize,
    depth_limited: bool,
}

impl<F: FnMut(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        if !(a < m && m < b) {
            self.depth_limited = true;
            return Ok(whole);
        }
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        self.evals += 2;
        if !flm.is_finite() || !frm.is_finite() {
            return Err(Error::Argument(format!(
                "integrand is not finite near x = {m}"
            )));
        }
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // Below this the difference is pure rounding noise.
        let noise = 1e-15 * (left.abs() + right.abs());
        if delta.abs() <= 15.0 * eps.max(noise) {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= MAX_QUAD_DEPTH {
            self.depth_limited = true;
            return Ok(left + right + delta / 15.0);
        }
        Ok(self.refine(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)?
            + self.refine(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1)?)
    }
}
