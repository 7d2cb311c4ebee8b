//! `hypalg` — discrete commutative hypergroups on the nonnegative
//! integers: linearization tables, axiom verification, truncated
//! spectra, and amenability verdicts with explicitly constructed means.
//!
//! Exit codes: 0 success; 1 configuration or usage error; 2 axiom
//! verification failure; 3 numerical failure; 4 requested construction
//! impossible (for example a mean at a character that is not
//! square-summable).

mod config;
mod emit;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Backend, CliResult};
use runner::Invocation;

#[derive(Parser)]
#[command(
    name = "hypalg",
    version,
    about = "Discrete commutative hypergroups: tables, spectra, amenability"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Character parameter (repeatable). A real number for polynomial
    /// and orthonormal families; a nonnegative integer level for
    /// symmetric families.
    #[arg(long = "x", allow_hyphen_values = true)]
    x: Vec<String>,

    /// Output directory for artifacts. Defaults to the config's
    /// `output` field, else the current directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Arithmetic backend override: `float` or `rational`.
    #[arg(long)]
    backend: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the linearization table and verify the hypergroup axioms.
    Build(CommonArgs),
    /// Compute truncated Jacobi spectra and estimate the spectral support.
    Spectrum(CommonArgs),
    /// Amenability verdicts at the given character parameters.
    Analyze(CommonArgs),
    /// Amenability verdicts over a grid of character parameters.
    Scan(CommonArgs),
    /// Construct and verify the mean of one character.
    Mean(CommonArgs),
}

fn invocation(args: &CommonArgs) -> CliResult<Invocation> {
    Ok(Invocation {
        config_path: args.config.clone(),
        xs: args.x.clone(),
        out: args.out.clone(),
        backend: args.backend.as_deref().map(Backend::parse).transpose()?,
    })
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Build(a) => runner::cmd_build(&invocation(a)?),
        Command::Spectrum(a) => runner::cmd_spectrum(&invocation(a)?),
        Command::Analyze(a) => runner::cmd_analyze(&invocation(a)?),
        Command::Scan(a) => runner::cmd_scan(&invocation(a)?),
        Command::Mean(a) => runner::cmd_mean(&invocation(a)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // Help and version requests are not errors.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
