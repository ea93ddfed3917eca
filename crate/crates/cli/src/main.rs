mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mep_core::Method;

use commands::{Context, Status};
use config::{FlagOverrides, RunConfig};
use error::CliError;
use output::OutDir;

#[derive(Parser)]
#[command(name = "mep", version, about = "Minimum energy paths on 2-D potential energy surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: the config's `output`, else `mep-out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    force: bool,
    /// Seed of the stability probe's random directions.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    /// Number of path segments M.
    #[arg(long, global = true)]
    images: Option<usize>,
    /// NEB spring constant.
    #[arg(long, global = true)]
    spring: Option<f64>,
    /// Force tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Refine the two minimizers and the saddle, with Hessian spectra.
    Critical,
    /// Converge one discrete MEP.
    Mep,
    /// Check the endpoint and saddle assumptions on a fine reference path.
    Verify,
    /// Run a mesh-refinement convergence study.
    Converge,
    /// Residual and stability-gain diagnostics of a converged path.
    Probe,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Neb,
    String,
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let config_path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <file> is required".into()))?;
    let mut config = RunConfig::load(&config_path)?;
    let flags = FlagOverrides {
        seed: cli.seed,
        method: cli.method.map(|m| match m {
            MethodArg::Neb => Method::Neb,
            MethodArg::String => Method::String,
        }),
        images: cli.images,
        spring: cli.spring,
        tol: cli.tol,
    };
    config.apply(&flags)?;
    let out_root = cli
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("mep-out"));
    let base = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let ctx = Context {
        config,
        flags,
        out: OutDir::new(out_root, cli.force),
        base: &base,
    };
    match cli.command {
        Command::Critical => commands::critical(&ctx),
        Command::Mep => commands::mep(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Converge => commands::converge(&ctx),
        Command::Probe => commands::probe(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
