use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tailbound::montecarlo::DEFAULT_CONFIDENCE;
use tailbound::sweep::{self, Format, Grid, McConfig, Selection, Settings};
use tailbound::{CumulantModel, DistributionSpec, Error};

#[derive(Parser)]
#[command(
    name = "tailbound",
    version,
    about = "Chernoff-type tail bounds from a cumulant transform"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every bound at a single y.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// One row per point of a linear y grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Grid as min:max:steps.
        #[arg(long, allow_hyphen_values = true)]
        y: Grid,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Monte Carlo tail estimate checked against the bounds.
    Mc {
        #[arg(long)]
        dist: DistributionSpec,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
        confidence: f64,
        #[arg(long, default_value = "text")]
        format: String,
    },
}

#[derive(Args)]
struct Common {
    /// Distribution as family:p1,p2 (gamma, exp, normal, poisson).
    #[arg(long)]
    dist: DistributionSpec,
    /// Comma-separated subset of exact,chernoff,new,stroock,bo,saddlepoint.
    #[arg(long, default_value = "all")]
    bounds: Selection,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = tailbound::bounds::DEFAULT_TRUNCATION_NATS)]
    trunc_nats: f64,
    /// Add Monte Carlo columns with this many samples per point.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
    confidence: f64,
}

impl Common {
    fn settings(&self) -> Result<Settings, Error> {
        let mc = self
            .samples
            .map(|n| McConfig::new(n, self.seed, self.confidence))
            .transpose()?;
        Ok(Settings {
            bounds: self.bounds.clone(),
            tol: self.tol,
            trunc_nats: self.trunc_nats,
            mc,
        })
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 4,
        Error::SolverFailure { .. }
        | Error::Convergence { .. }
        | Error::Bracket { .. }
        | Error::Degenerate(_)
        | Error::Internal(_) => 3,
        _ => 2,
    }
}

fn text_or_json(format: &str) -> Result<bool, Error> {
    match format {
        "text" => Ok(false),
        "json" => Ok(true),
        other => Err(Error::Argument(format!(
            "unknown format `{other}` (expected text or json)"
        ))),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let stdout = io::stdout();
    match cli.command {
        Command::Eval { common, y, format } => {
            let json = text_or_json(&format)?;
            let model = CumulantModel::new(common.dist)?;
            let report = sweep::evaluate_point(&model, y, 0, &common.settings()?)?;
            let mut out = stdout.lock();
            let written = if json {
                serde_json::to_writer_pretty(&mut out, &report.row)
                    .map_err(io::Error::from)
                    .and_then(|_| writeln!(out))
            } else {
                out.write_all(sweep::render_point(&model, &report).as_bytes())
            };
            written.map_err(|e| Error::Io(e.to_string()))
        }
        Command::Sweep {
            common,
            y,
            format,
            out,
            parallel,
        } => {
            let model = CumulantModel::new(common.dist)?;
            let settings = common.settings()?;
            let writer: Box<dyn Write> = match &out {
                Some(path) => Box::new(BufWriter::new(
                    File::create(path)
                        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
                )),
                None => Box::new(stdout.lock()),
            };
            let rows = sweep::sweep(&model, &y, &settings, parallel)?;
            sweep::write_rows(&rows, format, writer)
        }
        Command::Mc {
            dist,
            y,
            samples,
            seed,
            confidence,
            format,
        } => {
            let json = text_or_json(&format)?;
            let cfg = McConfig::new(samples, seed, confidence)?;
            let report = sweep::mc_report(dist, y, &cfg)?;
            let mut out = stdout.lock();
            let written = if json {
                serde_json::to_writer_pretty(&mut out, &report)
                    .map_err(io::Error::from)
                    .and_then(|_| writeln!(out))
            } else {
                out.write_all(sweep::render_mc(&report).as_bytes())
            };
            written.map_err(|e| Error::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
