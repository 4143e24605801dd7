//! `sprteff`: efficiency tables, curves and surfaces, inequality checks,
//! Monte Carlo comparisons and the inverse efficiency map.

mod commands;
mod error;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};

use commands::{Output, SimulateArgs};
use error::CliError;

const SUITES: [&str; 8] = [
    "mills",
    "twodim",
    "disc",
    "omega-max",
    "monotone",
    "bounds",
    "theorem2",
    "all",
];

#[derive(Parser)]
#[command(name = "sprteff", version, about = "Relative efficiency of the SPRT")]
struct Cli {
    /// Write the data to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Efficiency and sample-size reduction at the usual power levels.
    Table,
    /// f(alpha) on a grid, as CSV `alpha,f,reduction`.
    Curve {
        #[arg(long, default_value_t = 1e-3)]
        alpha_min: f64,
        #[arg(long, default_value_t = 0.499)]
        alpha_max: f64,
        #[arg(long, default_value_t = 500)]
        points: usize,
        /// Geometric spacing.
        #[arg(long)]
        log: bool,
    },
    /// F(alpha, beta) on a square grid, as CSV `alpha,beta,F`.
    Surface {
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// Geometric spacing; the default range becomes [1e-6, 0.1].
        #[arg(long)]
        log: bool,
        #[arg(long)]
        alpha_min: Option<f64>,
        #[arg(long)]
        alpha_max: Option<f64>,
    },
    /// Small-alpha expansion, as CSV `alpha,f,f_asymp,residual`.
    Asymp {
        #[arg(long, num_args = 1.., default_values_t = [1e-10, 1e-20, 1e-40, 1e-60])]
        alpha: Vec<f64>,
    },
    /// Scan the inequalities on their default grids; exit 1 on violations.
    Verify {
        #[arg(long, default_value = "all", value_parser = PossibleValuesParser::new(SUITES))]
        suite: String,
    },
    /// Monte Carlo SPRT and fixed-sample runs under both hypotheses.
    Simulate {
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Defaults to alpha.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        #[arg(long, default_value_t = 100_000)]
        paths: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Detect exits only at grid points.
        #[arg(long)]
        no_bridge: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// The alpha whose sample-size reduction equals the target.
    Solve {
        #[arg(long)]
        reduction: f64,
    },
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Table => commands::table(),
        Command::Curve {
            alpha_min,
            alpha_max,
            points,
            log,
        } => commands::curve_csv(*alpha_min, *alpha_max, *points, *log),
        Command::Surface {
            grid,
            log,
            alpha_min,
            alpha_max,
        } => {
            let (lo, hi) = if *log { (1e-6, 0.1) } else { (0.01, 0.49) };
            commands::surface_csv(
                alpha_min.unwrap_or(lo),
                alpha_max.unwrap_or(hi),
                *grid,
                *log,
            )
        }
        Command::Asymp { alpha } => commands::asymp_csv(alpha),
        Command::Verify { suite } => commands::verify(suite),
        Command::Simulate {
            alpha,
            beta,
            step,
            paths,
            seed,
            mu,
            sigma,
            no_bridge,
            workers,
        } => commands::simulate(&SimulateArgs {
            alpha: *alpha,
            beta: *beta,
            step: *step,
            paths: *paths,
            seed: *seed,
            mu: *mu,
            sigma: *sigma,
            bridge: !no_bridge,
            workers: *workers,
        }),
        Command::Solve { reduction } => commands::solve(*reduction),
    }
}

fn emit(out: &Option<PathBuf>, output: &Output) -> Result<(), CliError> {
    let mut data = output.data.trim_end_matches('\n').to_owned();
    data.push('\n');
    match out {
        Some(path) => fs::write(path, data)?,
        None => io::stdout().lock().write_all(data.as_bytes())?,
    }
    if !output.note.is_empty() {
        eprint!("{}", output.note);
    }
    if output.violations > 0 {
        return Err(CliError::Violations(output.violations));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|output| emit(&cli.out, &output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sprteff: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
