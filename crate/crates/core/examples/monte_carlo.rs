//! Monte Carlo tail estimates with 99.9% Wilson intervals, checked against the bounds.
//!
//! cargo run --release --example monte_carlo

use tailbound::montecarlo::DEFAULT_CONFIDENCE;
use tailbound::sweep::{mc_report, McConfig};
use tailbound::DistributionSpec;

fn main() -> tailbound::Result<()> {
    let spec: DistributionSpec = "gamma:8,1".parse()?;
    for seed in 1..=5 {
        let r = mc_report(
            spec,
            16.0,
            &McConfig::new(1_000_000, seed, DEFAULT_CONFIDENCE)?,
        )?;
        let e = &r.estimate;
        println!(
            "seed {seed}: p_hat {:.6e}  ci [{:.6e}, {:.6e}]  exact inside: {}  consistent with bounds: {}",
            e.p_hat,
            e.ci_lo,
            e.ci_hi,
            r.exact_in_interval,
            r.passed()
        );
    }
    Ok(())
}
