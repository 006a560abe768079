//! `loctrig` — command-line front-end of the experiment pipelines.
//!
//! Usage: `loctrig <experiment> --config <path.json> [--seed S]
//! [--out <path.json>] [--threads T]`. Bad usage (unknown experiment,
//! missing flags) exits with status 2 via the argument parser; runtime
//! failures print a diagnostic and exit with status 1.

use clap::Parser;
use loctrig_cli::error::Error;
use loctrig_cli::experiments::{run_experiment, Experiment};
use loctrig_cli::Result;
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs the synthetic experiments of the localized-kernel toolkit.
#[derive(Debug, Parser)]
#[command(name = "loctrig", version, about)]
struct Cli {
    /// Which experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,

    /// Path to the JSON config; `{}` uses the experiment's defaults.
    #[arg(long)]
    config: PathBuf,

    /// Seed override; wins over the config's `seed` key.
    #[arg(long)]
    seed: Option<u64>,

    /// Where to write the JSON run report (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker-thread cap; falls back to the LOCTRIG_THREADS environment
    /// variable, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("loctrig: {e}");
            ExitCode::FAILURE
        }
    }
}

fn thread_cap(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("LOCTRIG_THREADS") {
        Ok(raw) => {
            let parsed = raw.parse::<usize>().map_err(|_| {
                Error::Config(format!("LOCTRIG_THREADS must be a positive integer, got {raw:?}"))
            })?;
            Ok(Some(parsed))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = thread_cap(cli.threads)? {
        if threads == 0 {
            return Err(Error::Config("thread cap must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let text = std::fs::read_to_string(&cli.config)?;
    let config: serde_json::Value = serde_json::from_str(&text)?;
    let report = run_experiment(cli.experiment, &config, cli.seed)?;
    match &cli.out {
        Some(path) => report.write(path)?,
        None => {
            use std::io::Write;
            // Tolerate a closed pipe (e.g. `loctrig ... | head`).
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{}", report.to_json()?) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}
