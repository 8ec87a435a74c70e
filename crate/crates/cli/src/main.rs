//! `frictionlab`: reproducible experiment runner.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical
//! failure (non-convergence, blow-up), 1 i/o error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use commands::{AppError, AppResult};
use config::ExperimentConfig;
use output::Emitted;
use std::path::PathBuf;
use std::time::Instant;

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "FRICTIONLAB_THREADS";

#[derive(Parser)]
#[command(name = "frictionlab", version, about = "Friction and fiber-spectrum experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config; every key has a default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override one key, e.g. `--set model.mu=0.5`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Drag curves and fitted power laws per μ.
    Drag,
    /// Particle-field trajectory with a conservation report.
    Simulate,
    /// Constant-velocity drag measurement against the kernel.
    Clamp,
    /// Golden-rule coefficient c(P) per μ.
    Fgr,
    /// Fiber ground states, flatness, infrared and Mourre probes.
    Spectrum,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Drag => "drag",
            Command::Simulate => "simulate",
            Command::Clamp => "clamp",
            Command::Fgr => "fgr",
            Command::Spectrum => "spectrum",
        }
    }
}

fn threads() -> AppResult<usize> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(AppError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn run(cli: Cli) -> AppResult<PathBuf> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref(), &cli.set)?;
    if let Some(o) = cli.out {
        cfg.output.dir = o;
    }
    let n = threads()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::Usage(e.to_string()))?;
    let start = Instant::now();
    let mut out = Emitted::new(&cfg.output.dir)?;
    match cli.command {
        Command::Drag => commands::drag(&cfg, &mut out)?,
        Command::Simulate => commands::simulate(&cfg, &mut out)?,
        Command::Clamp => commands::clamp(&cfg, &mut out)?,
        Command::Fgr => commands::fgr(&cfg, &mut out)?,
        Command::Spectrum => commands::spectrum(&cfg, &mut out)?,
    }
    let wall = start.elapsed().as_secs_f64();
    Ok(output::write_manifest(&out, cli.command.name(), wall, n, &cfg.to_toml())?)
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(manifest) => println!("{}", manifest.display()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
