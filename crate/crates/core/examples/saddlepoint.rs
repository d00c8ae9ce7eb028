//! Daniels' saddlepoint approximation, exact for the Gaussian.
//!
//! cargo run --example saddlepoint

use tailbound::bounds::{saddlepoint_tail_with, DEFAULT_TRUNCATION_NATS};
use tailbound::cumulant::exact_tail;
use tailbound::CumulantModel;

fn main() -> tailbound::Result<()> {
    for (spec, ys) in [
        ("normal:0,1", [1.0, 2.0, 3.0]),
        ("gamma:8,1", [12.0, 16.0, 24.0]),
    ] {
        let model: CumulantModel = spec.parse()?;
        for y in ys {
            let s = saddlepoint_tail_with(&model, y, DEFAULT_TRUNCATION_NATS)?;
            let exact = exact_tail(&model, y);
            println!(
                "{spec:<11} y = {y:>4}  saddlepoint {:.8e}  exact {exact:.8e}  T = {:.2}  evals {}",
                s.value, s.upper_limit, s.evals
            );
        }
    }
    Ok(())
}
