//! `planewave <subcommand> --config run.json [--out dir]`

mod config;
mod error;
mod output;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use planewave::Execution;

use crate::config::check_experiment;
use crate::error::CliError;
use crate::output::{sha256_hex, ArtifactWriter, Manifest};

#[derive(Debug, Parser)]
#[command(name = "planewave", version, about = "Planewave Galerkin experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides the config's `out_dir`.
    #[arg(long, global = true, env = "PLANEWAVE_OUT_DIR")]
    out: Option<PathBuf>,

    /// Worker threads for sweeps; 1 runs sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Reserved; no experiment is stochastic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    Linsolve,
    EigConvergence,
    GpSolve,
    StripEstimate,
    Blowup,
    Bands,
    BzConvergence,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Linsolve => "linsolve",
            Command::EigConvergence => "eig-convergence",
            Command::GpSolve => "gp-solve",
            Command::StripEstimate => "strip-estimate",
            Command::Blowup => "blowup",
            Command::Bands => "bands",
            Command::BzConvergence => "bz-convergence",
        }
    }
}

macro_rules! experiment {
    ($ty:ty, $runner:path) => {
        |text: &str, cli: &Cli, ctx: &run::Context, name: &'static str| -> Result<PathBuf, CliError> {
            let cfg: $ty = config::parse(text)?;
            check_experiment(&cfg.experiment, name)?;
            cfg.validate()?;
            let dir = out_dir(cli, cfg.out_dir.as_deref());
            let mut out = ArtifactWriter::new(&dir)?;
            let start = Instant::now();
            $runner(&cfg, ctx, &mut out)?;
            out.finish(Manifest {
                subcommand: name,
                config_sha256: sha256_hex(text.as_bytes()),
                wall_time: start.elapsed(),
                threads: cli.threads,
                seed: cli.seed,
            })?;
            Ok(dir)
        }
    };
}

fn out_dir(cli: &Cli, from_config: Option<&Path>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| from_config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn execution(threads: Option<usize>) -> Result<Execution, CliError> {
    match threads {
        Some(0) => Err(CliError::config("--threads must be at least 1")),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::config(e.to_string()))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::default()),
    }
}

fn dispatch(cli: &Cli) -> Result<PathBuf, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config <path> is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let ctx = run::Context {
        base,
        exec: execution(cli.threads)?,
    };
    let name = cli.command.name();
    match cli.command {
        Command::Linsolve => experiment!(config::LinsolveConfig, run::linsolve)(&text, cli, &ctx, name),
        Command::EigConvergence => {
            experiment!(config::EigConvergenceConfig, run::eig_convergence)(&text, cli, &ctx, name)
        }
        Command::GpSolve => experiment!(config::GpSolveConfig, run::gp_solve)(&text, cli, &ctx, name),
        Command::StripEstimate => experiment!(config::StripEstimateConfig, run::strip_estimate)(&text, cli, &ctx, name),
        Command::Blowup => experiment!(config::BlowupCliConfig, run::blowup)(&text, cli, &ctx, name),
        Command::Bands => experiment!(config::BandsConfig, run::bands)(&text, cli, &ctx, name),
        Command::BzConvergence => experiment!(config::BzConvergenceConfig, run::bz_convergence)(&text, cli, &ctx, name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(dir) => {
            println!("{}", serde_json::json!({ "status": "ok", "out_dir": dir }));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
