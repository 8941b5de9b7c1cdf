//! `arw`: simulate the flow of critical activated random walk, sample its
//! scaling limit, run the verification checks and plot the results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod config;
mod error;
mod flow_cmd;
mod limit_cmd;
mod output;
mod plot;
mod svg;
mod verify_cmd;

use error::{CliError, Result};

#[derive(Parser, Debug)]
#[command(name = "arw", version, about = "Flow of critical activated random walk and its scaling limit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Common {
    /// Master seed. Replica seeds are derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    pub replicas: usize,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Common {
    pub fn seed_or(&self, default: u64) -> u64 {
        self.seed.unwrap_or(default)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample flow trajectories (C_0, ..., C_n) of the discrete model.
    SimulateFlow(flow_cmd::FlowArgs),
    /// Sample the scaling limit.
    SampleLimit(limit_cmd::LimitArgs),
    /// Run a named verification check and print its JSON report.
    Verify(verify_cmd::VerifyArgs),
    /// Render CSV outputs as an SVG figure.
    Plot(plot::PlotArgs),
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Run(e.to_string()))?;
    }
    if cli.common.replicas == 0 {
        return Err(CliError::Config("--replicas must be positive".into()));
    }
    match cli.command {
        Command::SimulateFlow(a) => flow_cmd::run(&cli.common, &a),
        Command::SampleLimit(a) => limit_cmd::run(&cli.common, &a),
        Command::Verify(a) => verify_cmd::run(&cli.common, &a),
        Command::Plot(a) => plot::run(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ARW_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed) => CliError::CheckFailed.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
