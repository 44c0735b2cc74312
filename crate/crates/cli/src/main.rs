//! `rdv`: exact evaluation, verification, simulation and optimisation for the
//! rendezvous game on `n` locations.
//!
//! Exit status: 0 on success, 1 when a verifier fails, 2 on bad input.

mod args;
mod commands;
mod specs;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Format};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(rendezvous::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers.filter(|&w| w > 0) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let out = match commands::run(&cli.command) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("rdv: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("json values serialise") + "\n",
        Format::Text => out.text,
        Format::Csv => match out.csv {
            Some(csv) => csv,
            None => {
                eprintln!("rdv: this command has no CSV output");
                return ExitCode::from(2);
            }
        },
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, rendered),
        None => std::io::stdout().write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("rdv: {}", CliError::Io(e));
        return ExitCode::from(2);
    }
    if out.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
