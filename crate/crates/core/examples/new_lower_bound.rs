//! The two-parameter lower bound with its optimizer diagnostics.
//!
//! cargo run --example new_lower_bound -- gamma:8,1 16

use tailbound::bounds::{chernoff_upper, lower_bound_new, Tail};
use tailbound::cumulant::exact_tail;
use tailbound::CumulantModel;

fn main() -> tailbound::Result<()> {
    let mut args = std::env::args().skip(1);
    let model: CumulantModel = args.next().as_deref().unwrap_or("gamma:8,1").parse()?;
    let y: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(16.0);

    let r = lower_bound_new(&model, y)?;
    let exact = exact_tail(&model, y);
    let upper = chernoff_upper(&model, y, Tail::Right)?;

    println!("{} at y = {y}", model.name);
    println!("  lower bound   {:.6e}", r.value.unwrap_or(0.0));
    println!("  exact tail    {exact:.6e}");
    println!("  chernoff      {upper:.6e}");
    println!("  alpha*        {:.8}", r.alpha_opt.unwrap_or(f64::NAN));
    println!("  delta*        {:.8}", r.delta_opt.unwrap_or(f64::NAN));
    println!(
        "  alpha_hat     {:.8}  (feasibility frontier)",
        r.alpha_hat.unwrap_or(f64::NAN)
    );
    println!(
        "  alpha_check   {:.8}  (argmin of delta*)",
        r.alpha_check.unwrap_or(f64::NAN)
    );
    if let Some(c) = r.cross_check {
        println!(
            "  crossing      alpha {:.8}, G = {:.3e}, agrees: {}",
            c.alpha, c.g, c.agrees
        );
    }
    println!("  evaluations   {}", r.evals);
    Ok(())
}
