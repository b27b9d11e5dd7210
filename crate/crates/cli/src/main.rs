//! `cmcindex`: stability index reports for CMC hypersurfaces of round
//! spheres.
//!
//! Thin shell over the library crate: parse arguments, run one
//! subcommand, print a single machine-readable document, exit with a
//! code that classifies any failure. See the subcommand help for the
//! full surface.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid request, 3 solver
//! non-convergence, 4 violated invariant or failed verification.
//! `CMCINDEX_THREADS` caps the worker pool used by `sweep` and
//! `verify`.

use clap::Parser;

mod args;
mod commands;
mod error;
mod output;
mod plot;

use error::CliError;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    if let Err(err) = configure_threads() {
        eprintln!("{}", output::error_json(err.kind(), &err.message()));
        return err.exit_code();
    }
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = err.print();
                return if err.use_stderr() { 2 } else { 0 };
            }
            eprintln!("{}", output::error_json("parameter", &err.to_string()));
            return 2;
        }
    };
    match commands::run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", output::error_json(err.kind(), &err.message()));
            err.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CMCINDEX_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "CMCINDEX_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}
