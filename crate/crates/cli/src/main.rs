//! `moran`: runs one experiment described by a key/value config file and
//! writes CSV artifacts plus a manifest.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use config::RunConfig;
use output::Artifacts;

#[derive(Parser, Debug)]
#[command(name = "moran", version, about = "Spectra and estimators for two-phase Moran measures")]
struct Args {
    /// Run configuration (`[model]` and `[run]` sections).
    config: PathBuf,
    /// Output directory; overrides `run.out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn execute(args: &Args) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let config = RunConfig::from_text(&text).with_context(|| format!("in {}", args.config.display()))?;
    let dir = args.out.clone().unwrap_or_else(|| config.out.clone());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build()?;
    let mut artifacts = Artifacts::new(&dir, &config)?;
    let outcome = pool.install(|| commands::run(&config, &mut artifacts))?;
    let manifest = artifacts.finish(&config)?;
    println!("{}", outcome.summary.trim_end());
    println!("wrote {}", manifest.display());
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
