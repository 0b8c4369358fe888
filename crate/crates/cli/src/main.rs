mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use mismatch_core::Error as CoreError;

const EXIT_STATISTICAL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<CoreError>()) {
        Some(CoreError::Capacity { .. }) => EXIT_CAPACITY,
        Some(CoreError::ImaginaryResidue { .. } | CoreError::NonFinite(_)) => EXIT_STATISTICAL,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let raw: Vec<_> = std::env::args_os().collect();
    let argv = match config::expand(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    // clap exits with 2 on usage errors and 0 for --help.
    let cli = args::Cli::parse_from(argv);

    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }

    match commands::run(&cli.command) {
        Ok(outcome) if outcome.passed => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("statistical check failed");
            ExitCode::from(EXIT_STATISTICAL)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
