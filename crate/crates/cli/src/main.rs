//! `cdiscord`: batch front end for the discord library.

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use run::CliError;

#[derive(Debug, Parser)]
#[command(name = "cdiscord", version, about = "Classical discord of noisy measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input JSON file
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when omitted
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Comparison tolerance, must be positive
    #[arg(long = "tol", global = true, allow_negative_numbers = true, default_value_t = cdiscord::DEFAULT_TOL)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Discord of `{"state", "channel"}`
    Discord,
    /// Stationary family of `{"channel", "weights"?}` and a zero-discord state
    ZeroStates,
    /// Polytope of channels leaving a state unchanged
    ZeroChannels,
    /// Least discord of `{"state", "family", "budget"?}` over the family
    MinDiscord,
    /// Merging-identity sweep over `{"q_points", "eps_points"}`
    MergeDemo,
    /// Conditional purity of a state
    PurityCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report(&CliError::Usage(e.to_string().trim().to_string()));
        }
    };
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    eprintln!("{body}");
    ExitCode::from(e.exit_code())
}
