//! Stroock and Bagdasarov–Ostrovskii lower bounds next to the new one.
//!
//! cargo run --example comparison_bounds

use tailbound::bounds::{bo_lower, lower_bound_new, stroock_lower, BoundResult};
use tailbound::CumulantModel;

fn show(r: &BoundResult) -> String {
    match (r.value, r.alpha_opt) {
        (Some(v), Some(a)) => format!("{v:.4e} (alpha {a:.4})"),
        _ => "inapplicable".to_string(),
    }
}

fn main() -> tailbound::Result<()> {
    for (spec, ys) in [
        ("gamma:8,1", vec![12.0, 16.0, 24.0, 32.0]),
        ("exp:1", vec![2.0, 5.0, 10.0]),
        ("normal:0,1", vec![2.0, 4.0, 6.0]),
    ] {
        let model: CumulantModel = spec.parse()?;
        println!("{spec}");
        for y in ys {
            println!("  y = {y:>5}");
            println!("    new      {}", show(&lower_bound_new(&model, y)?));
            println!("    stroock  {}", show(&stroock_lower(&model, y)?));
            println!("    b-o      {}", show(&bo_lower(&model, y)?));
        }
    }
    Ok(())
}
