use thiserror::Error;

/// Errors raised by model construction, the dual solver, and the bound optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("cannot parse distribution spec `{0}` (expected family:p1,p2)")]
    SpecSyntax(String),

    #[error("xi = {xi} is outside the cumulant domain (xi* = {xi_star})")]
    Domain { xi: f64, xi_star: f64 },

    #[error("y = {y} is outside the range ({lo}, {hi}) of the cumulant derivative")]
    Range { y: f64, lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{routine} did not converge after {iterations} iterations (last x = {x})")]
    Convergence {
        routine: &'static str,
        iterations: usize,
        x: f64,
    },

    #[error("{0}")]
    Argument(String),

    #[error("degenerate argument: {0}")]
    Degenerate(String),

    #[error("internal consistency violated: {0}")]
    Internal(String),

    #[error("cannot write output: {0}")]
    Io(String),

    #[error("solver failure: {reason}")]
    SolverFailure {
        reason: String,
        /// Scanned `(alpha, value)` pairs that led to the failure.
        profile: Vec<(f64, f64)>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
