//! `qsync`: build a coupled-oscillator scenario from a JSON config, solve
//! its Lindblad steady state, and write phase-distribution, excitation-subset,
//! and correlation-measure artifacts. `sweep` grids up to two parameters.
//!
//! Exit codes: 0 success, 2 schema violation, 3 solver failure,
//! 4 truncation check failure (the measured tail mass is printed).

mod config;
mod runner;
mod sweep;

use clap::{Parser, Subcommand};
use config::RunConfig;
use runner::Failure;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qsync",
    about = "steady-state phase synchronization of coupled quantum oscillators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write its artifacts into --out.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (fallback: QSYNC_WORKERS, then all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Override the config's phi-grid resolution.
        #[arg(long)]
        grid_points: Option<usize>,
    },
    /// Solve every grid point of a sweep config and write sweep.csv.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Schema-check a config: exit 0 if valid, 2 if not.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, out, workers, grid_points } => {
            let mut config = load(&config)?;
            if let Some(n) = grid_points {
                config.grid_points = n;
                config.validate().map_err(Failure::Schema)?;
            }
            // The solve itself is a single point; the pool size only caps
            // whatever parallelism the numeric kernels pick up.
            rayon::ThreadPoolBuilder::new()
                .num_threads(resolve_workers(workers))
                .build_global()
                .ok();
            for path in runner::run_scenario(&config, &out)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Sweep { config, out, workers } => {
            let config = load(&config)?;
            let path = sweep::run_sweep(&config, &out, resolve_workers(workers))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Validate { config } => {
            load(&config)?;
            println!("ok");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Schema(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(Failure::Schema)
}

fn resolve_workers(flag: Option<usize>) -> usize {
    flag.filter(|&n| n > 0)
        .or_else(|| {
            std::env::var("QSYNC_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
                .filter(|&n| n > 0)
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
}
