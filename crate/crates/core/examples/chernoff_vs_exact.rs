//! Chernoff upper bound against the exact tail for every catalog family.
//!
//! cargo run --example chernoff_vs_exact

use tailbound::bounds::{chernoff_upper, Tail};
use tailbound::cumulant::exact_tail;
use tailbound::CumulantModel;

fn main() -> tailbound::Result<()> {
    for spec in ["gamma:8,1", "gamma:3,2", "exp:1", "normal:0,1", "poisson:4"] {
        let model: CumulantModel = spec.parse()?;
        let s = model.variance().sqrt();
        println!("{spec}  (mean {}, sd {s:.4})", model.mean);
        for k in [1.0, 2.0, 3.0, 4.0] {
            let y = model.mean + k * s;
            let upper = chernoff_upper(&model, y, Tail::Right)?;
            let exact = exact_tail(&model, y);
            println!(
                "  y = {y:>8.4}   exact {exact:.6e}   chernoff {upper:.6e}   ratio {:.2}",
                upper / exact
            );
        }
    }

    let model: CumulantModel = "normal:0,1".parse()?;
    println!(
        "\nleft tail, normal(0,1): P(X <= -2) <= {:.6e}",
        chernoff_upper(&model, -2.0, Tail::Left)?
    );
    Ok(())
}
