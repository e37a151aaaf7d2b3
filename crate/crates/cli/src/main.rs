//! `hp43`: experiment driver for the hartree-core toolkit.
//!
//! Every subcommand reads an optional flat JSON config (`--config`), applies flag
//! overrides, writes its tables into `--out` and finishes with `manifest.json`.
//! Exit codes: 0 success, 2 configuration or I/O error, 3 numerical guard.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hartree_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use commands::*;
use output::Outputs;

#[derive(Parser, Debug)]
#[command(name = "hp43", version, about = "Spectral experiments for the Hartree Φ⁴₃ model")]
struct Cli {
    /// Flat JSON config; flags take precedence over its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; HP43_THREADS takes precedence when set.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Renormalization constants as JSON plus the κ_N table.
    RenormTable(RenormTableFlags),
    /// Free-field snapshots and per-mode variances.
    Sample(SampleFlags),
    /// Energy breakdown of a snapshot.
    Energy(EnergyFlags),
    /// Shell spectra of Ψ, Z and the paracontrolled product.
    Objects(ObjectsFlags),
    /// Counter-term tables and operator-norm estimates of the kernel.
    Paraop(ParaopFlags),
    /// One trajectory of the truncated wave or heat flow.
    Evolve(EvolveFlags),
    /// Compare long-run dynamics with the Gibbs reference chain.
    Invariance(InvarianceFlags),
    /// Variational upper bound on −log Z_N.
    Partition(PartitionFlags),
    /// Witness certificates over a list of M.
    Witness(WitnessFlags),
    /// β = 2 certificates over a σ grid.
    PhaseScan(PhaseScanFlags),
}

fn threads(flag: Option<usize>) -> Result<usize> {
    let n = match std::env::var("HP43_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Config(format!("HP43_THREADS must be a positive integer, got {v:?}")))?,
        Err(_) => flag.unwrap_or(1),
    };
    if n == 0 {
        return Err(Error::Config("the worker pool needs at least one thread".into()));
    }
    Ok(n)
}

fn run_one<C, F>(
    name: &str,
    file: &Map<String, Value>,
    flags: &F,
    out: &mut Outputs,
    body: impl FnOnce(&C, &mut Outputs) -> Result<()>,
) -> Result<Value>
where
    C: Serialize + DeserializeOwned + Default,
    F: Serialize,
{
    let cfg: C = config::resolve(file, flags)?;
    body(&cfg, out)?;
    let mut v = serde_json::to_value(&cfg).map_err(|e| Error::Config(e.to_string()))?;
    if let Value::Object(m) = &mut v {
        m.insert("subcommand".into(), Value::from(name));
    }
    Ok(v)
}

fn run(cli: Cli) -> Result<()> {
    let start = Instant::now();
    let mut file = match &cli.config {
        Some(p) => config::read_file(p)?,
        None => Map::new(),
    };
    let out_dir = match (cli.out, file.remove("out")) {
        (Some(p), _) => p,
        (None, Some(Value::String(s))) => PathBuf::from(s),
        (None, Some(_)) => return Err(Error::Config("\"out\" must be a string".into())),
        (None, None) => PathBuf::from("hp43-out"),
    };
    let flag_threads = match (cli.threads, file.remove("threads")) {
        (Some(t), _) => Some(t),
        (None, Some(v)) => Some(v.as_u64().ok_or_else(|| Error::Config("\"threads\" must be an integer".into()))? as usize),
        (None, None) => None,
    };
    let threads = threads(flag_threads)?;
    hartree_core::parallel::init_pool(threads);
    let mut out = Outputs::create(&out_dir)?;
    let (name, cfg) = match &cli.command {
        Command::RenormTable(f) => ("renorm-table", run_one("renorm-table", &file, f, &mut out, renorm_table)?),
        Command::Sample(f) => ("sample", run_one("sample", &file, f, &mut out, sample)?),
        Command::Energy(f) => ("energy", run_one("energy", &file, f, &mut out, energy)?),
        Command::Objects(f) => ("objects", run_one("objects", &file, f, &mut out, objects)?),
        Command::Paraop(f) => ("paraop", run_one("paraop", &file, f, &mut out, paraop)?),
        Command::Evolve(f) => ("evolve", run_one("evolve", &file, f, &mut out, evolve)?),
        Command::Invariance(f) => ("invariance", run_one("invariance", &file, f, &mut out, invariance)?),
        Command::Partition(f) => ("partition", run_one("partition", &file, f, &mut out, partition)?),
        Command::Witness(f) => ("witness", run_one("witness", &file, f, &mut out, witness)?),
        Command::PhaseScan(f) => ("phase-scan", run_one("phase-scan", &file, f, &mut out, phase_scan)?),
    };
    out.manifest(name, &cfg, threads, start.elapsed().as_secs_f64())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hp43: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
