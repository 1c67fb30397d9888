//! Batch front end for the cdlab laboratory: configuration, subcommands and
//! report files.

pub mod commands;
pub mod config;
mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, ExitStatus};

use crate::commands::Run;
use crate::config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "cdlab",
    version,
    about = "Cyclic vectors for truncated weighted multi-shift models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the factorial inequalities exhaustively over the lemma grid.
    VerifyLemmas(RunArgs),
    /// Build the model, export it and run the structure suite.
    BuildModel(RunArgs),
    /// Build the weighted series f and check its norm bound.
    Synthesize(RunArgs),
    /// Full pipeline ending in cyclicity certificates.
    Certify(RunArgs),
    /// Merge the certificates and run records under a directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.directory`.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bits of the log-domain floats.
    #[arg(long)]
    pub precision: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding earlier runs.
    pub dir: PathBuf,
    /// Where to write the summary; defaults to `dir`.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

fn prepare(args: &RunArgs) -> Result<Run, CliError> {
    let overrides = Overrides {
        out: args.out.clone(),
        seed: args.seed,
        precision: args.precision,
    };
    let cfg = RunConfig::load(args.config.as_deref())?.resolve(&overrides)?;
    Ok(Run::new(cfg))
}

fn run_command(
    name: &str,
    args: &RunArgs,
    body: fn(&mut Run) -> Result<(ExitStatus, String), CliError>,
) -> (ExitStatus, String) {
    let mut run = match prepare(args) {
        Ok(r) => r,
        Err(e) => return (e.status(), e.to_string()),
    };
    let (status, message) = match body(&mut run) {
        Ok(r) => r,
        Err(e) => (e.status(), e.to_string()),
    };
    if let Err(e) = run.finish(name, status, &message) {
        return (e.status(), e.to_string());
    }
    (status, message)
}

/// Runs one subcommand and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let (status, message) = match &cli.command {
        Command::VerifyLemmas(a) => run_command("verify-lemmas", a, commands::verify_lemmas_cmd),
        Command::BuildModel(a) => run_command("build-model", a, commands::build_model_cmd),
        Command::Synthesize(a) => run_command("synthesize", a, commands::synthesize_cmd),
        Command::Certify(a) => run_command("certify", a, commands::certify_cmd),
        Command::Report(a) => match commands::report_cmd(&a.dir, a.out.as_deref()) {
            Ok(r) => r,
            Err(e) => (e.status(), e.to_string()),
        },
    };
    if status == ExitStatus::Ok {
        println!("{message}");
    } else {
        eprintln!("cdlab: {message}");
    }
    status.code()
}

/// Parses `args` (including the program name) and runs.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitStatus::Config.code()
            } else {
                ExitStatus::Ok.code()
            }
        }
    }
}
