mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::Output;

/// Flag combination the parser cannot reject on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_NOT_FOUND: u8 = 5;

fn exit_code(err: &anyhow::Error) -> u8 {
    use latzero::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Domain(_) | E::Range(_) | E::Undersampled { .. } | E::GridTooLarge { .. } | E::UnsupportedFormat(_) => {
                    EXIT_USAGE
                }
                E::Singular { .. } | E::Degenerate(_) => EXIT_NUMERICAL,
                E::Io(_) | E::Json(_) | E::Parse(_) => EXIT_IO,
                E::NotFound(_) => EXIT_NOT_FOUND,
            };
        }
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if cause.is::<std::io::Error>() || cause.is::<serde_json::Error>() {
            return EXIT_IO;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "error" } else { "warn" }))
        .init();
    log::debug!("latzero {}", env!("CARGO_PKG_VERSION"));

    let out = Output::new(cli.output.clone(), cli.format, cli.quiet);
    let result = match &cli.command {
        Command::Design(a) => commands::design(a, &out),
        Command::Crosstalk(a) => commands::crosstalk(a, &out),
        Command::Table1(a) => commands::table1(a, &out),
        Command::Gaussian(a) => commands::gaussian(a, &out),
        Command::NaCurve(a) => commands::na_curve_cmd(a, &out),
        Command::Synth(a) => commands::synth(a, &out),
        Command::Steer(a) => commands::steer(a, &out),
        Command::Quantize(a) => commands::quantize(a, &out),
        Command::Map(a) => commands::map(a, &out),
        Command::Ring(a) => commands::ring(a, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
