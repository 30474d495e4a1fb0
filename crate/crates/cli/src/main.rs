//! `phdnas`: run hardware-aware multi-objective architecture searches, the
//! exact brute-force oracles, and the diversity ablation, over benchmark
//! tables in the documented CSV format.

mod ablate;
mod gen_bench;
mod manifest;
mod oracle;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "phdnas", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the three-objective search and write the archive plus a manifest.
    Run(run::RunArgs),
    /// Compute the exact Pareto front of a benchmark table.
    Oracle(oracle::OracleArgs),
    /// Paired 3-objective vs 2-objective diversity ablation across seeds.
    Ablate(ablate::AblateArgs),
    /// Generate a synthetic benchmark CSV.
    GenBench(gen_bench::GenBenchArgs),
}

/// Command failures, split by exit status: domain and configuration errors
/// exit 1, I/O failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Io(String),
}

impl From<phdnas_core::Error> for CliError {
    fn from(error: phdnas_core::Error) -> Self {
        match error {
            phdnas_core::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(error: std::io::Error) -> Self {
        CliError::Io(error.to_string())
    }
}

/// Create `dir` (and parents) then write `name` inside it.
pub fn write_output_file(dir: &PathBuf, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };

    let outcome = match cli.command {
        Command::Run(args) => run::execute(args),
        Command::Oracle(args) => oracle::execute(args),
        Command::Ablate(args) => ablate::execute(args),
        Command::GenBench(args) => gen_bench::execute(args),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Io(message)) => {
            eprintln!("I/O error: {message}");
            ExitCode::from(2)
        }
    }
}
