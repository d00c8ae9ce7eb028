//! The Legendre dual, the rate function and the tilted rates for a gamma law.
//!
//! cargo run --example legendre_dual

use tailbound::legendre::{dual_point, tilted_pair};
use tailbound::CumulantModel;

fn main() -> tailbound::Result<()> {
    let model: CumulantModel = "gamma:8,1".parse()?;
    println!("{:>6} {:>12} {:>12} {:>12}", "y", "xi(y)", "xi'(y)", "I(y)");
    for y in [9.0, 12.0, 16.0, 24.0, 32.0] {
        let d = dual_point(&model, y)?;
        println!(
            "{:>6} {:>12.6} {:>12.6} {:>12.6}",
            y, d.xi, d.xi_prime, d.rate
        );
    }

    let t = tilted_pair(&model, 1.2, 2.0, 16.0)?;
    println!();
    println!("alpha = 1.2, delta = 2.0, y = 16");
    println!("  I_alpha(y)       = {:.6}   A = {:.6}", t.i_alpha_y, t.a);
    println!(
        "  I_alpha(delta y) = {:.6}   B = {:.6}",
        t.i_alpha_delta_y, t.b
    );
    println!("  1 - A - B        = {:.6}", 1.0 - t.a - t.b);
    Ok(())
}
