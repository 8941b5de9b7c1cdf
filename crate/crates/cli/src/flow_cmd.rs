use std::time::Instant;

use arw_lab::flow::{flow_trajectory, write_dense_csv, write_jump_csv, FlowTrajectory, TrajectoryMeta};
use arw_lab::limit::DiffusionParams;
use arw_lab::rng::derive_seed;
use clap::Args;
use log::info;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{resolve_eta, resolve_params, Derived};
use crate::error::{CliError, Result};
use crate::output::{ensure_dir, write_atomic, write_json, RunManifest};
use crate::{Common, Format};

#[derive(Args, Clone, Debug, Serialize)]
pub struct FlowArgs {
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// bernoulli, poisson, geometric or twopoint:M
    #[arg(long, default_value = "bernoulli")]
    pub eta: String,
    /// Number of sites n; the trajectory is C_0, ..., C_n.
    #[arg(long)]
    pub steps: u64,
    /// Write every C_k instead of the jump list.
    #[arg(long)]
    pub dense: bool,
}

#[derive(Serialize)]
struct Echo<'a> {
    #[serde(flatten)]
    args: &'a FlowArgs,
    replicas: usize,
    format: Format,
}

pub fn run(common: &Common, args: &FlowArgs) -> Result<()> {
    let started = Instant::now();
    let params = resolve_params(args.zeta, args.lambda)?;
    let dist = resolve_eta(&args.eta, params.zeta)?;
    let seed = common.seed_or(0);
    let dir = common.out_dir();
    ensure_dir(&dir)?;

    let trajs: Vec<FlowTrajectory> = (0..common.replicas as u64)
        .into_par_iter()
        .map(|r| flow_trajectory(args.steps, &params, &dist, derive_seed(seed, r, "flow")))
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let derived = DiffusionParams::from_eta(&dist).ok().map(Derived::from);
    let echo = Echo {
        args,
        replicas: common.replicas,
        format: common.format,
    };
    let mut manifest = RunManifest::new("simulate-flow", echo, derived, seed, started);
    for (r, traj) in trajs.iter().enumerate() {
        let stem = format!("flow-{r:04}");
        let data = match common.format {
            Format::Csv => {
                let path = dir.join(format!("{stem}.csv"));
                write_atomic(&path, |w| {
                    if args.dense {
                        write_dense_csv(traj, w)
                    } else {
                        write_jump_csv(traj, w)
                    }
                })?;
                path
            }
            Format::Json => {
                let path = dir.join(format!("{stem}.json"));
                write_json(&path, traj)?;
                path
            }
        };
        let meta = dir.join(format!("{stem}.meta.json"));
        write_json(&meta, &TrajectoryMeta::of(traj))?;
        info!("replica {r}: {} jumps, C_n = {}", traj.jumps.len(), traj.final_value());
        manifest.outputs.push(file_name(&data));
        manifest.outputs.push(file_name(&meta));
    }
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write(&dir)
}

pub fn file_name(path: &std::path::Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
