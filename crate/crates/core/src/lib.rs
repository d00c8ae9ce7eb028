//! Two-sided tail bounds for a random variable known through its cumulant transform.
//!
//! The upper side is the Chernoff bound `P(X ≥ y) ≤ exp(−I(y))`. The lower side
//! tilts the measure to center it at `αy` and applies the Chernoff bound twice to
//! the tilted measure, bounding its mass outside `[y, δy]`. Maximizing over the two
//! tilt parameters gives
//!
//! ```text
//! P(X ≥ y) ≥ sup_{1<α<δ} (1 − A − B) · exp(−I(αy) − Ξ(αy)·y·(δ − α))
//! ```
//!
//! with `A = exp(−I_α(y))`, `B = exp(−I_α(δy))`. The optimum is found by a 1-D
//! reduction along the first-order curve `δ*(α) = (α − A)/(1 − A)`.
//!
//! Stroock's Chebyshev-based bound, the Bagdasarov–Ostrovskii bound and Daniels'
//! saddlepoint approximation are provided for comparison, along with exact tails
//! and a Monte Carlo estimator for validation.
//!
//! ```
//! use tailbound::{bounds, CumulantModel};
//!
//! let model: CumulantModel = "gamma:8,1".parse().unwrap();
//! let upper = bounds::chernoff_upper(&model, 16.0, bounds::Tail::Right).unwrap();
//! let lower = bounds::lower_bound_new(&model, 16.0).unwrap();
//! let exact = tailbound::cumulant::exact_tail(&model, 16.0);
//! assert!(lower.value.unwrap() < exact && exact < upper);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cumulant;
pub mod error;
pub mod legendre;
pub mod montecarlo;
pub mod numerics;
pub mod sweep;

pub use cumulant::{make_model, Cumulant, CumulantModel, DistributionSpec};
pub use error::{Error, Result};
