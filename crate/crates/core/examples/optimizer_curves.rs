//! The curves behind the optimizer: delta*(alpha), delta_hat(alpha) and the
//! feasibility margin 1 - A - B_hat, for gamma(8,1) at y = 16.
//!
//! cargo run --example optimizer_curves

use tailbound::bounds::{delta_hat, lower_bound_new, reduced_objective};
use tailbound::CumulantModel;

fn main() -> tailbound::Result<()> {
    let model: CumulantModel = "gamma:8,1".parse()?;
    let y = 16.0;
    let r = lower_bound_new(&model, y)?;
    let alpha_hat = r.alpha_hat.unwrap_or(f64::NAN);
    println!(
        "alpha* = {:.6}, alpha_hat = {alpha_hat:.6}, alpha_check = {:.6}",
        r.alpha_opt.unwrap_or(f64::NAN),
        r.alpha_check.unwrap_or(f64::NAN)
    );
    println!(
        "{:>8} {:>10} {:>10} {:>11} {:>12}",
        "alpha", "delta*", "delta_hat", "margin", "L"
    );
    for i in 1..=24 {
        let alpha = 1.0 + 0.02 * i as f64;
        let p = reduced_objective(&model, alpha, y)?;
        let dh = delta_hat(&model, alpha, y)?;
        let l = if p.margin > 0.0 {
            format!("{:.4e}", p.l)
        } else {
            "infeasible".into()
        };
        println!(
            "{alpha:>8.3} {:>10.4} {dh:>10.4} {:>11.4e} {l:>12}",
            p.delta_star, p.margin
        );
    }
    Ok(())
}
