//! Named verification checks with pinned seeds and thresholds.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{flow_oracle, flow_trajectory, sample_flow_value, FlowError};
use crate::limit::{
    running_max_bm, sample_fidi, sample_limit_path, DiffusionParams, FidiRequest, LimitError,
    LimitPathConfig,
};
use crate::model::{
    stabilize, ArwError, Configuration, EtaDistribution, InstructionField, LeftToRight,
    ModelParams, UniformRandom, DEFAULT_TOPPLE_BUDGET,
};
use crate::rng::{derive_seed, stream_rng};
use crate::stats::{
    half_normal_cdf, ks_one_sample, ks_two_sample, scaling_check, EmpiricalSample, StatsError,
    TestReport,
};

pub const CHECKS: [&str; 6] = [
    "marginal-ks",
    "abelian",
    "oracle-equivalence",
    "cross-sampler",
    "self-similar",
    "pure-jump",
];

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("unknown check {0:?}; available: {list}", list = CHECKS.join(", "))]
    UnknownCheck(String),
    #[error(transparent)]
    Model(#[from] ArwError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub seed: u64,
    /// `rho` for the limit-process checks.
    pub rho: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            rho: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub seed: u64,
    pub pass: bool,
    pub results: Vec<TestReport>,
}

impl CheckReport {
    fn new(check: &str, seed: u64, results: Vec<TestReport>) -> Self {
        Self {
            check: check.to_owned(),
            seed,
            pass: results.iter().all(|r| r.pass),
            results,
        }
    }
}

pub fn run_check(name: &str, opts: &CheckOptions) -> Result<CheckReport, CheckError> {
    let results = match name {
        "marginal-ks" => marginal_ks(opts)?,
        "abelian" => abelian(opts)?,
        "oracle-equivalence" => oracle_equivalence(opts)?,
        "cross-sampler" => cross_sampler(opts)?,
        "self-similar" => self_similar(opts)?,
        "pure-jump" => pure_jump(opts)?,
        other => return Err(CheckError::UnknownCheck(other.to_owned())),
    };
    Ok(CheckReport::new(name, opts.seed, results))
}

/// `n` marginals at `x` from the dual path sampler, in normalized units.
pub fn path_marginals(rho: f64, x: f64, dx: f64, n: usize, seed: u64) -> Result<Vec<f64>, LimitError> {
    (0..n)
        .into_par_iter()
        .map(|r| {
            let cfg = LimitPathConfig::marginal(rho, x, dx, derive_seed(seed, r as u64, "limit-path"));
            Ok(sample_limit_path(&cfg)?.require_resolved()?.value_at(x))
        })
        .collect()
}

/// `n` marginals at `x` from the finite-dimensional sampler, normalized.
pub fn fidi_marginals(rho: f64, x: f64, dx: f64, n: usize, seed: u64) -> Result<Vec<f64>, LimitError> {
    let params = DiffusionParams::normalized(rho)?;
    Ok(sample_fidi(&FidiRequest::new(vec![x], dx, n, seed), &params)?.column(0))
}

fn marginal_ks(opts: &CheckOptions) -> Result<Vec<TestReport>, CheckError> {
    let mut out = Vec::new();

    let n = 10_000u64;
    let reps = 2000u64;
    let dist = EtaDistribution::bernoulli(0.5)?;
    let params = ModelParams::from_zeta(0.5)?;
    let eps = 1.0 / (n as f64).sqrt();
    let r = DiffusionParams::from_eta(&dist)?.r;
    let recursion: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|i| eps * sample_flow_value(n, dist, derive_seed(opts.seed, i, "marginal")) as f64)
        .collect();
    let ks = ks_one_sample(&EmpiricalSample::new(recursion)?, |c| {
        half_normal_cdf(c, r).expect("positive scale")
    });
    out.push(TestReport::below("flow-marginal-half-normal", &ks, 0.05));

    let graphical = (0..reps)
        .into_par_iter()
        .map(|i| {
            let t = flow_trajectory(n, &params, &dist, derive_seed(opts.seed, i, "trajectory"))?;
            Ok(eps * t.final_value() as f64)
        })
        .collect::<Result<Vec<f64>, FlowError>>()?;
    let ks = ks_one_sample(&EmpiricalSample::new(graphical)?, |c| {
        half_normal_cdf(c, r).expect("positive scale")
    });
    out.push(TestReport::below("flow-trajectory-half-normal", &ks, 0.05));

    let lp = DiffusionParams::normalized(opts.rho)?;
    let fidi = fidi_marginals(opts.rho, 1.0, 1e-4, 2000, derive_seed(opts.seed, 0, "fidi"))?;
    let scale = lp.marginal_scale(1.0);
    let ks = ks_one_sample(&EmpiricalSample::new(fidi)?, |c| {
        half_normal_cdf(c, scale).expect("positive scale")
    });
    out.push(TestReport::below("fidi-marginal-half-normal", &ks, 0.05));

    let runmax = (0..2000u64)
        .into_par_iter()
        .map(|i| {
            let p = running_max_bm(1.0, 1e-4, derive_seed(opts.seed, i, "runmax"))?;
            Ok(p.last().expect("nonempty"))
        })
        .collect::<Result<Vec<f64>, LimitError>>()?;
    let ks = ks_one_sample(&EmpiricalSample::new(runmax)?, |c| {
        half_normal_cdf(c, 1.0).expect("positive scale")
    });
    out.push(TestReport::below("running-max-half-normal", &ks, 0.05));
    Ok(out)
}

/// Stabilize `instances` random configurations under `policies` random
/// orders each; returns the number of instances where some order disagreed
/// with the left-to-right sweep.
pub fn abelian_mismatches(seed: u64, instances: u64, policies: u64) -> Result<u64, ArwError> {
    let bad = (0..instances)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, i, "abelian");
            let mut rng = stream_rng(s, 0, "counts");
            let counts: Vec<u32> = (0..11).map(|_| rng.random_range(0..=3)).collect();
            let config = Configuration::from_counts(-10, &counts)?;
            let field = InstructionField::new(0.5, s)?;

            let mut reference = config.clone();
            let odo = stabilize(
                &mut reference,
                &mut field.rewound(),
                (-10, 0),
                &mut LeftToRight,
                DEFAULT_TOPPLE_BUDGET,
            )?;
            for j in 0..policies {
                let mut c = config.clone();
                let mut policy = UniformRandom(stream_rng(s, j, "policy"));
                let o = stabilize(&mut c, &mut field.rewound(), (-10, 0), &mut policy, DEFAULT_TOPPLE_BUDGET)?;
                if c != reference || o != odo {
                    return Ok(1);
                }
            }
            Ok(0)
        })
        .collect::<Result<Vec<u64>, ArwError>>()?;
    Ok(bad.iter().sum())
}

fn abelian(opts: &CheckOptions) -> Result<Vec<TestReport>, CheckError> {
    let instances = 200;
    let bad = abelian_mismatches(opts.seed, instances, 20)?;
    Ok(vec![TestReport::metric(
        "abelian-exact",
        bad as f64 / instances as f64,
        instances as usize,
        bad == 0,
        "fraction of instances where 20 random orders disagree",
    )])
}

fn oracle_equivalence(opts: &CheckOptions) -> Result<Vec<TestReport>, CheckError> {
    let l = 20;
    let n = 5000u64;
    let dist = EtaDistribution::bernoulli(0.5)?;
    let params = ModelParams::from_zeta(0.5)?;
    let oracle = (0..n)
        .into_par_iter()
        .map(|i| {
            let run = flow_oracle(l, &params, &dist, derive_seed(opts.seed, i, "oracle"))?;
            Ok(run.trajectory.final_value() as f64)
        })
        .collect::<Result<Vec<f64>, FlowError>>()?;
    let recursion: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sample_flow_value(l, dist, derive_seed(opts.seed, i, "recursion")) as f64)
        .collect();
    let graphical = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = flow_trajectory(l, &params, &dist, derive_seed(opts.seed, i, "graphical"))?;
            Ok(t.final_value() as f64)
        })
        .collect::<Result<Vec<f64>, FlowError>>()?;
    let oracle = EmpiricalSample::new(oracle)?;
    let recursion = EmpiricalSample::new(recursion)?;
    let graphical = EmpiricalSample::new(graphical)?;
    Ok(vec![
        TestReport::below("oracle-vs-recursion", &ks_two_sample(&oracle, &recursion), 0.04),
        TestReport::below("graphical-vs-recursion", &ks_two_sample(&graphical, &recursion), 0.04),
    ])
}

fn cross_sampler(opts: &CheckOptions) -> Result<Vec<TestReport>, CheckError> {
    let fidi = fidi_marginals(opts.rho, 1.0, 1e-4, 2000, derive_seed(opts.seed, 1, "fidi"))?;
    let path = path_marginals(opts.rho, 1.0, 1e-4, 2000, opts.seed)?;
    let ks = ks_two_sample(&EmpiricalSample::new(fidi)?, &EmpiricalSample::new(path)?);
    Ok(vec![TestReport::below("fidi-vs-path", &ks, 0.06)])
}

fn self_similar(opts: &CheckOptions) -> Result<Vec<TestReport>, CheckError> {
    let dx = 2.5e-4;
    let mut cache: HashMap<(u64, u64), Vec<f64>> = HashMap::new();
    let mut sampler = |x: f64, s: u64| -> Result<Vec<f64>, CheckError> {
        if let Some(v) = cache.get(&(x.to_bits(), s)) {
            return Ok(v.clone());
        }
        let v = path_marginals(opts.rho, x, dx, 2000, s)?;
        cache.insert((x.to_bits(), s), v.clone());
        Ok(v)
    };
    let good = scaling_check(&mut sampler, 1.0, 4.0, 0.5, opts.seed)?;
    let linear = scaling_check(&mut sampler, 1.0, 4.0, 1.0, opts.seed)?;
    Ok(vec![
        TestReport::below("c4-vs-2c1", &good, 0.06),
        TestReport::above("c4-vs-4c1-negative-control", &linear, 0.3),
    ])
}

/// Per-path statistics for the pure-jump check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureJumpStats {
    pub paths: usize,
    pub mean_distinct_coarse: f64,
    pub mean_distinct_fine: f64,
    /// Mean jump counts on `(a, 2]` for `a` in `windows`.
    pub windows: Vec<f64>,
    pub mean_jumps: Vec<f64>,
    pub under_resolved: usize,
}

pub fn pure_jump_stats(rho: f64, paths: usize, seed: u64) -> Result<PureJumpStats, LimitError> {
    let windows = vec![0.5, 0.1, 0.02];
    let per_path = (0..paths)
        .into_par_iter()
        .map(|r| {
            let s = derive_seed(seed, r as u64, "pure-jump");
            let coarse = LimitPathConfig::new(rho, 2.0, 1e-4, s).with_window(0.02);
            let fine = LimitPathConfig {
                dx: 5e-5,
                ..coarse.clone()
            };
            let a = sample_limit_path(&coarse)?;
            let b = sample_limit_path(&fine)?;
            let jumps: Vec<usize> = windows.iter().map(|&lo| a.step.jumps_in(lo, 2.0).len()).collect();
            Ok((
                a.step.distinct_values_on(0.5, 2.0),
                b.step.distinct_values_on(0.5, 2.0),
                jumps,
                a.under_resolved as usize + b.under_resolved as usize,
            ))
        })
        .collect::<Result<Vec<_>, LimitError>>()?;
    let m = paths as f64;
    let mut mean_jumps = vec![0.0; windows.len()];
    for (_, _, j, _) in &per_path {
        for (acc, &c) in mean_jumps.iter_mut().zip(j) {
            *acc += c as f64 / m;
        }
    }
    Ok(PureJumpStats {
        paths,
        mean_distinct_coarse: per_path.iter().map(|p| p.0 as f64).sum::<f64>() / m,
        mean_distinct_fine: per_path.iter().map(|p| p.1 as f64).sum::<f64>() / m,
        windows,
        mean_jumps,
        under_resolved: per_path.iter().map(|p| p.3).sum(),
    })
}

fn pure_jump(opts: &CheckOptions) -> Result<Vec<TestReport>, CheckError> {
    let s = pure_jump_stats(opts.rho, 50, opts.seed)?;
    let change = (s.mean_distinct_fine - s.mean_distinct_coarse).abs() / s.mean_distinct_coarse;
    let increasing = s.mean_jumps.windows(2).all(|w| w[1] > w[0]);
    Ok(vec![
        TestReport::metric(
            "finitely-many-values",
            s.under_resolved as f64,
            2 * s.paths,
            s.under_resolved == 0,
            "paths whose level refinement hit its budget",
        ),
        TestReport::metric(
            "distinct-values-stable-under-dx-halving",
            change,
            s.paths,
            change < 0.05,
            format!(
                "mean distinct values on [0.5, 2]: {:.3} at dx = 1e-4, {:.3} at dx = 5e-5",
                s.mean_distinct_coarse, s.mean_distinct_fine
            ),
        ),
        TestReport::metric(
            "jumps-accumulate-at-zero",
            s.mean_jumps[s.mean_jumps.len() - 1],
            s.paths,
            increasing,
            format!("mean jump counts on (a, 2] for a = {:?}: {:?}", s.windows, s.mean_jumps),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_checks_are_rejected() {
        assert!(matches!(
            run_check("nope", &CheckOptions::default()),
            Err(CheckError::UnknownCheck(_))
        ));
    }

    #[test]
    fn abelian_check_on_a_few_instances() {
        assert_eq!(abelian_mismatches(1, 10, 5).unwrap(), 0);
    }
}
