//! Right tail of gamma(8,1) over a linear grid, as CSV on stdout.
//!
//! cargo run --release --example gamma_sweep > gamma.csv

use tailbound::sweep::{sweep, write_rows, Format, Grid, Settings};
use tailbound::CumulantModel;

fn main() -> tailbound::Result<()> {
    let model: CumulantModel = "gamma:8,1".parse()?;
    let grid = Grid::new(10.0, 40.0, 61)?;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let rows = sweep(&model, &grid, &Settings::default(), threads)?;
    let broken = rows.iter().filter(|r| !r.sandwich_holds()).count();
    eprintln!("{} rows, {broken} sandwich violations", rows.len());
    write_rows(&rows, Format::Csv, std::io::stdout().lock())
}
