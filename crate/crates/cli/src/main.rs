//! `cbifree`: batch front end for cumulants, joins, oracle checks, series residuals and limit experiments.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 on usage or schema errors.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{Mode, VerifyArgs};
use error::CliResult;
use io::{Format, Report};

#[derive(Parser)]
#[command(name = "cbifree", version, about = "Conditionally bi-free cumulants, joins and transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// kappa and K tables from a word distribution or a commuting-pair moment table.
    Cumulants {
        input: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Rational)]
        mode: Mode,
    },
    /// Joint distribution of c-bi-free copies of the inputs.
    Join {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Oracle versus cumulant and diagram moments for every word up to the cap.
    Verify {
        /// Matrix model file; a random model is drawn when absent.
        #[arg(long, conflicts_with = "seed")]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        families: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        cap: usize,
        /// Adds 1 to both moments of this generator before joining.
        #[arg(long)]
        fault_inject: Option<String>,
    },
    /// Residuals of the transform identities of a commuting pair.
    Residuals {
        #[arg(required_unless_present = "seed")]
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "input")]
        seed: Option<u64>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Rational)]
        mode: Mode,
        /// Coefficient tolerance in float mode.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// CLT or Poisson limit experiment described by a config file.
    Limits { config: PathBuf },
}

fn run(command: &Command) -> CliResult<Report> {
    match command {
        Command::Cumulants { input, degree, mode } => commands::cumulants(input, *degree, *mode),
        Command::Join { inputs, degree } => commands::join(inputs, *degree),
        Command::Verify {
            model,
            seed,
            families,
            dim,
            cap,
            fault_inject,
        } => commands::verify(&VerifyArgs {
            model: model.clone(),
            seed: *seed,
            families: *families,
            dim: *dim,
            cap: *cap,
            fault: fault_inject.clone(),
        }),
        Command::Residuals {
            input,
            seed,
            degree,
            mode,
            tol,
        } => commands::residuals(input.as_deref(), *seed, *degree, *mode, *tol),
        Command::Limits { config } => commands::limits(config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli.command).and_then(|r| io::emit(&r, cli.format, cli.out.as_ref()).map(|_| r.ok));
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
