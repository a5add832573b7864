//! Command-line front end for the multiobjective shortest path solvers.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation failure, 3 I/O or
//! format error. Set `PARETO_ROUTE_LOG=debug` for run traces.

mod bench;
mod commands;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{CliError, Command};

#[derive(Parser)]
#[command(
    name = "pareto-route",
    about = "Exact one-to-one multiobjective shortest paths: generate, solve, validate, benchmark",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("PARETO_ROUTE_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are ordinary successful output.
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                std::process::exit(0);
            }
            eprint!("{err}");
            std::process::exit(1);
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(match err {
                CliError::Usage(_) => 1,
                CliError::Validation(_) => 2,
                CliError::Io(_) => 3,
            });
        }
    }
}
