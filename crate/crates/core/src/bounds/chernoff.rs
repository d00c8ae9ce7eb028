use serde::{Deserialize, Serialize};

use crate::cumulant::Cumulant;
use crate::error::{Error, Result};
use crate::legendre::rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// `P(X ≥ y)` for `y` above the mean.
    Right,
    /// `P(X ≤ y)` for `y` below the mean.
    Left,
}

/// Chernoff bound `exp(−I(y))` on the requested tail, capped at 1.
pub fn chernoff_upper<M: Cumulant + ?Sized>(model: &M, y: f64, tail: Tail) -> Result<f64> {
    let mean = model.mean();
    match tail {
        Tail::Right if !(y > mean) => {
            return Err(Error::Argument(format!("y must exceed the mean ({mean})")));
        }
        Tail::Left if !(y < mean) => {
            return Err(Error::Argument(format!(
                "y must lie below the mean ({mean})"
            )));
        }
        _ => {}
    }
    Ok((-rate(model, y)?).exp().min(1.0))
}
