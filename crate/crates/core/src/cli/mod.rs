//! The `pyramid-landing` command line.
//!
//! Each subcommand reads an optional flat TOML file (`--config`) whose keys
//! are the fields of the matching config struct; `--seed`, `--out` and
//! `--input` override the file. Exit status is 0 on success, 1 when a gate
//! fails under `--check` and 2 on any error.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_bench, cmd_detect, cmd_eval, cmd_fuse, cmd_simulate, run_experiment, ExperimentOutput};
pub use config::{load, BenchCliConfig, DetectConfig, EvalConfig, FuseConfig, SimulateConfig};

use crate::evalbench::GateOutcome;
use crate::Result;

#[derive(Debug, Parser)]
#[command(name = "pyramid-landing", version, about = "Multi-resolution elevation mapping and landing-site detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a simulated flight to range images and a pose log.
    Simulate(Common),
    /// Fuse recorded range images into a map dump.
    Fuse(WithInput),
    /// Classify a map dump into landing classes and candidates.
    Detect(WithInput),
    /// Run an evaluation experiment.
    Eval(WithCheck),
    /// Time fusion and detection on full-size frames.
    Bench(WithCheck),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat TOML configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Top-level random seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WithInput {
    #[command(flatten)]
    common: Common,
    /// Input directory.
    #[arg(long, value_name = "DIR")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WithCheck {
    #[command(flatten)]
    common: Common,
    /// Compare results against gates and fail if any is violated.
    #[arg(long)]
    check: bool,
    /// Gate file with `[[gate]]` tables; built-in gates otherwise.
    #[arg(long, value_name = "PATH")]
    gates: Option<PathBuf>,
}

fn override_path(slot: &mut Option<PathBuf>, flag: Option<PathBuf>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn execute(cli: Cli) -> Result<Vec<GateOutcome>> {
    match cli.command {
        Command::Simulate(a) => {
            let mut cfg: SimulateConfig = load(a.config.as_deref())?;
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            override_path(&mut cfg.out, a.out);
            let n = cmd_simulate(&cfg)?;
            println!("wrote {n} frames");
            Ok(Vec::new())
        }
        Command::Fuse(a) => {
            let mut cfg: FuseConfig = load(a.common.config.as_deref())?;
            override_path(&mut cfg.out, a.common.out);
            override_path(&mut cfg.input, a.input);
            let map = cmd_fuse(&cfg)?;
            let finest = map.depth();
            println!("finest layer holds {} observed cells", map.observed_cells(finest));
            Ok(Vec::new())
        }
        Command::Detect(a) => {
            let mut cfg: DetectConfig = load(a.common.config.as_deref())?;
            override_path(&mut cfg.out, a.common.out);
            override_path(&mut cfg.input, a.input);
            let landing = cmd_detect(&cfg)?;
            let [safe, hazard, unknown, border, nodata] = landing.class_counts();
            println!(
                "safe {safe}, hazard {hazard}, unknown {unknown}, border {border}, no data {nodata}; {} candidates",
                landing.candidates.len()
            );
            Ok(Vec::new())
        }
        Command::Eval(a) => {
            let mut cfg: EvalConfig = load(a.common.config.as_deref())?;
            if a.common.seed.is_some() {
                cfg.seed = a.common.seed;
            }
            override_path(&mut cfg.out, a.common.out);
            override_path(&mut cfg.gates, a.gates);
            cmd_eval(&cfg, a.check)
        }
        Command::Bench(a) => {
            let mut cfg: BenchCliConfig = load(a.common.config.as_deref())?;
            if let Some(s) = a.common.seed {
                cfg.seed = s;
            }
            override_path(&mut cfg.out, a.common.out);
            override_path(&mut cfg.gates, a.gates);
            cmd_bench(&cfg, a.check)
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand, returning
/// the process exit status.
pub fn run_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(outcomes) => {
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.gate.name.as_str()).collect();
            if failed.is_empty() {
                0
            } else {
                eprintln!("gate failed: {}", failed.join(", "));
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os())
}
