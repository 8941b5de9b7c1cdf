use std::time::Instant;

use arw_lab::limit::{
    running_max_bm, sample_fidi, sample_limit_path, write_hitting_csv, write_sampled_csv,
    write_step_csv, DiffusionParams, FidiRequest, LimitError, LimitMeta, LimitPathConfig,
};
use arw_lab::rng::derive_seed;
use clap::{Args, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Derived;
use crate::error::{CliError, Result};
use crate::flow_cmd::file_name;
use crate::output::{ensure_dir, write_atomic, write_json, RunManifest};
use crate::{Common, Format};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Finite-dimensional marginals at `--xs`.
    Fidi,
    /// Whole path on `[0, xmax]` from the dual level-set construction.
    Path,
    /// Running maximum of a Brownian motion (the `rho = 0` limit).
    Runmax,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct LimitArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Ratio sigma_s / sigma_p in (0, 1].
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub xmax: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dx: f64,
    /// Evaluation points for fidi mode; defaults to xmax.
    #[arg(long, value_delimiter = ',')]
    pub xs: Vec<f64>,
    /// Left end of the window where path mode resolves jumps.
    #[arg(long)]
    pub x_lo: Option<f64>,
    /// Relative level spacing target around jumps in path mode.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Cap on sampled levels per path.
    #[arg(long, default_value_t = 4096)]
    pub max_levels: usize,
    /// Coarsest grid of the coupled noise; defaults to dx.
    #[arg(long)]
    pub base_dx: Option<f64>,
    /// Brownian-bridge correction between grid points (fidi mode).
    #[arg(long)]
    pub bridge: bool,
}

#[derive(Serialize)]
struct Echo<'a> {
    #[serde(flatten)]
    args: &'a LimitArgs,
    replicas: usize,
    format: Format,
}

fn config_err(e: LimitError) -> CliError {
    CliError::Config(e.to_string())
}

fn need_rho(args: &LimitArgs) -> Result<f64> {
    let rho = args
        .rho
        .ok_or_else(|| CliError::Config("--rho is required for this mode".into()))?;
    if rho == 0.0 {
        return Err(CliError::Config(
            "rho = 0 has no dual paths to sample; use --mode runmax for the rho = 0 limit".into(),
        ));
    }
    Ok(rho)
}

pub fn run(common: &Common, args: &LimitArgs) -> Result<()> {
    let started = Instant::now();
    let seed = common.seed_or(0);
    let dir = common.out_dir();
    let echo = Echo {
        args,
        replicas: common.replicas,
        format: common.format,
    };
    let derived = match args.mode {
        Mode::Runmax => None,
        _ => Some(Derived::from(
            DiffusionParams::normalized(need_rho(args)?).map_err(config_err)?,
        )),
    };
    ensure_dir(&dir)?;
    let mut manifest = RunManifest::new("sample-limit", echo, derived, seed, started);
    match args.mode {
        Mode::Path => path_mode(common, args, seed, &mut manifest)?,
        Mode::Fidi => fidi_mode(common, args, seed, &mut manifest)?,
        Mode::Runmax => runmax_mode(common, args, seed, &mut manifest)?,
    }
    for w in &manifest.warnings {
        warn!("{w}");
    }
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write(&dir)
}

fn path_mode<C: Serialize>(
    common: &Common,
    args: &LimitArgs,
    seed: u64,
    manifest: &mut RunManifest<C>,
) -> Result<()> {
    let rho = need_rho(args)?;
    let dir = common.out_dir();
    let mut base = LimitPathConfig::new(rho, args.xmax, args.dx, seed)
        .with_tolerance(args.tol)
        .with_max_levels(args.max_levels);
    if let Some(x_lo) = args.x_lo {
        base = base.with_window(x_lo);
    }
    if let Some(b) = args.base_dx {
        base = base.with_base_dx(b);
    }
    let samples = (0..common.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let cfg = LimitPathConfig {
                seed: derive_seed(seed, r, "limit-path"),
                ..base.clone()
            };
            sample_limit_path(&cfg)
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(config_err)?;

    for (r, s) in samples.iter().enumerate() {
        let stem = format!("limit-{r:04}");
        if s.under_resolved {
            manifest.warnings.push(format!(
                "replica {r}: refinement budget of {} levels exhausted; level resolution {:.3e}",
                args.max_levels, s.resolution
            ));
        }
        info!("replica {r}: {} jumps, {} levels", s.step.jumps.len(), s.profile.levels.len());
        match common.format {
            Format::Csv => {
                let step = dir.join(format!("{stem}.csv"));
                write_atomic(&step, |w| write_step_csv(&s.step, w))?;
                let hit = dir.join(format!("{stem}-hitting.csv"));
                write_atomic(&hit, |w| write_hitting_csv(&s.profile, w))?;
                manifest.outputs.push(file_name(&step));
                manifest.outputs.push(file_name(&hit));
            }
            Format::Json => {
                let path = dir.join(format!("{stem}.json"));
                write_json(&path, s)?;
                manifest.outputs.push(file_name(&path));
            }
        }
        let meta_path = dir.join(format!("{stem}.meta.json"));
        let meta = LimitMeta {
            mode: "path".into(),
            rho,
            xmax: args.xmax,
            dx: args.dx,
            seed: s.config.seed,
            level_resolution: Some(s.resolution),
            refinement_budget: Some(args.max_levels),
            under_resolved: s.under_resolved,
        };
        write_json(&meta_path, &meta)?;
        manifest.outputs.push(file_name(&meta_path));
    }
    Ok(())
}

fn fidi_mode<C: Serialize>(
    common: &Common,
    args: &LimitArgs,
    seed: u64,
    manifest: &mut RunManifest<C>,
) -> Result<()> {
    let rho = need_rho(args)?;
    let dir = common.out_dir();
    let xs = if args.xs.is_empty() {
        vec![args.xmax]
    } else {
        args.xs.clone()
    };
    let params = DiffusionParams::normalized(rho).map_err(config_err)?;
    let req = FidiRequest::new(xs, args.dx, common.replicas, seed).with_bridge(args.bridge);
    let sample = sample_fidi(&req, &params).map_err(config_err)?;
    let path = match common.format {
        Format::Csv => {
            let path = dir.join("fidi.csv");
            write_atomic(&path, |w| {
                writeln!(w, "replica,x,value")?;
                for (r, row) in sample.values.iter().enumerate() {
                    for (x, v) in sample.xs.iter().zip(row) {
                        writeln!(w, "{r},{x},{v}")?;
                    }
                }
                Ok(())
            })?;
            path
        }
        Format::Json => {
            let path = dir.join("fidi.json");
            write_json(&path, &sample)?;
            path
        }
    };
    manifest.outputs.push(file_name(&path));
    let meta_path = dir.join("fidi.meta.json");
    let meta = LimitMeta {
        mode: "fidi".into(),
        rho,
        xmax: sample.xs.last().copied().unwrap_or(args.xmax),
        dx: args.dx,
        seed,
        level_resolution: None,
        refinement_budget: None,
        under_resolved: false,
    };
    write_json(&meta_path, &meta)?;
    manifest.outputs.push(file_name(&meta_path));
    Ok(())
}

fn runmax_mode<C: Serialize>(
    common: &Common,
    args: &LimitArgs,
    seed: u64,
    manifest: &mut RunManifest<C>,
) -> Result<()> {
    if let Some(rho) = args.rho.filter(|&r| r != 0.0) {
        manifest
            .warnings
            .push(format!("--rho {rho} ignored: runmax samples the rho = 0 limit"));
    }
    let dir = common.out_dir();
    let paths = (0..common.replicas as u64)
        .into_par_iter()
        .map(|r| running_max_bm(args.xmax, args.dx, derive_seed(seed, r, "runmax")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(config_err)?;
    for (r, p) in paths.iter().enumerate() {
        let stem = format!("runmax-{r:04}");
        let path = match common.format {
            Format::Csv => {
                let path = dir.join(format!("{stem}.csv"));
                write_atomic(&path, |w| write_sampled_csv(p, w))?;
                path
            }
            Format::Json => {
                let path = dir.join(format!("{stem}.json"));
                write_json(&path, p)?;
                path
            }
        };
        manifest.outputs.push(file_name(&path));
        let meta_path = dir.join(format!("{stem}.meta.json"));
        let meta = LimitMeta {
            mode: "runmax".into(),
            rho: 0.0,
            xmax: args.xmax,
            dx: args.dx,
            seed: derive_seed(seed, r as u64, "runmax"),
            level_resolution: None,
            refinement_budget: None,
            under_resolved: false,
        };
        write_json(&meta_path, &meta)?;
        manifest.outputs.push(file_name(&meta_path));
    }
    Ok(())
}
