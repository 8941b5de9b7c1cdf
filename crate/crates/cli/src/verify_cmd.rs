use arw_lab::checks::{run_check, CheckError, CheckOptions, DEFAULT_SEED};
use clap::Args;
use log::info;

use crate::error::{CliError, Result};
use crate::output::{ensure_dir, write_json};
use crate::Common;

#[derive(Args, Clone, Debug)]
pub struct VerifyArgs {
    /// One of marginal-ks, abelian, oracle-equivalence, cross-sampler,
    /// self-similar, pure-jump.
    pub check: String,
    /// rho for the limit-process checks.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
}

pub fn run(common: &Common, args: &VerifyArgs) -> Result<()> {
    let opts = CheckOptions {
        seed: common.seed_or(DEFAULT_SEED),
        rho: args.rho,
    };
    info!("running {} with seed {}", args.check, opts.seed);
    let report = run_check(&args.check, &opts).map_err(|e| match e {
        CheckError::UnknownCheck(_) => CliError::Config(e.to_string()),
        CheckError::Limit(_) | CheckError::Model(_) => CliError::Config(e.to_string()),
        other => CliError::Run(other.to_string()),
    })?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Run(e.to_string()))?;
    println!("{text}");
    if let Some(dir) = &common.out {
        ensure_dir(dir)?;
        write_json(&dir.join(format!("verify-{}.json", args.check)), &report)?;
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}
