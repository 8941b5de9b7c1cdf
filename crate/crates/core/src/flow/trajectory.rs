use serde::{Deserialize, Serialize};

use crate::model::{EtaDistribution, EtaSampler, ModelParams};

use super::paths::{red_step, ArrowField, ArrowSource, BlackPath};
use super::FlowError;

/// A point where the flow increases: `C_k = value` and `C_{k-1} < value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowJump {
    pub k: u64,
    pub value: u64,
}

/// The flow `(C_0, ..., C_n)` stored as its jump list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub n: u64,
    pub params: ModelParams,
    pub eta_dist: EtaDistribution,
    pub seed: u64,
    pub jumps: Vec<FlowJump>,
}

impl FlowTrajectory {
    pub(crate) fn from_values(
        values: &[u64],
        params: ModelParams,
        eta_dist: EtaDistribution,
        seed: u64,
    ) -> Self {
        let mut jumps = Vec::new();
        let mut prev = 0;
        for (k, &v) in values.iter().enumerate() {
            if v != prev {
                jumps.push(FlowJump { k: k as u64, value: v });
                prev = v;
            }
        }
        Self {
            n: values.len() as u64 - 1,
            params,
            eta_dist,
            seed,
            jumps,
        }
    }

    /// `C_k`.
    pub fn value_at(&self, k: u64) -> u64 {
        let idx = self.jumps.partition_point(|j| j.k <= k);
        if idx == 0 {
            0
        } else {
            self.jumps[idx - 1].value
        }
    }

    pub fn final_value(&self) -> u64 {
        self.jumps.last().map_or(0, |j| j.value)
    }

    /// `(C_0, ..., C_n)`.
    pub fn dense(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.n as usize + 1);
        let mut next = 0;
        let mut current = 0;
        for k in 0..=self.n {
            if next < self.jumps.len() && self.jumps[next].k == k {
                current = self.jumps[next].value;
                next += 1;
            }
            out.push(current);
        }
        out
    }

    /// Increments `(k, C_k - C_{k-1})` with `C_{-1} = 0`.
    pub fn increments(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let mut prev = 0;
        self.jumps.iter().map(move |j| {
            let d = j.value - prev;
            prev = j.value;
            (j.k, d)
        })
    }
}

/// Values `C_0, ..., C_n` of the coupled red paths over one black path.
///
/// The red path started at `-k` is evolved against the stored path from
/// `-(k - 1)` and stops as soon as the two meet, after which they share the
/// same heights. Only the overwritten prefix is ever recomputed.
pub fn flow_values_with<A: ArrowSource + ?Sized>(black: &BlackPath, arrows: &mut A) -> Vec<u64> {
    let n = (-black.left()) as usize;
    let left = black.left();
    // heights[c - left] is the current red path's height at column c.
    let mut heights = vec![0u64; n + 2];
    let mut values = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let start = -(k as i64);
        let mut h = black.height(start);
        heights[(start - left) as usize] = h;
        let mut column = start;
        while column <= 0 {
            h = red_step(black, arrows, column, h);
            column += 1;
            let slot = &mut heights[(column - left) as usize];
            if k > 0 {
                debug_assert!(h >= *slot, "red paths are ordered");
                if h == *slot {
                    break;
                }
            }
            *slot = h;
        }
        values.push(heights[(1 - left) as usize]);
    }
    values
}

fn check_params(params: &ModelParams, dist: &EtaDistribution) -> Result<(), FlowError> {
    if (params.zeta - dist.zeta()).abs() > params.criticality_tolerance {
        return Err(FlowError::ParamMismatch {
            params_zeta: params.zeta,
            eta_zeta: dist.zeta(),
        });
    }
    Ok(())
}

/// Joint sample of `(C_0, ..., C_n)` by the graphical construction.
pub fn flow_trajectory(
    n: u64,
    params: &ModelParams,
    dist: &EtaDistribution,
    seed: u64,
) -> Result<FlowTrajectory, FlowError> {
    check_params(params, dist)?;
    let black = BlackPath::sample(n, &EtaSampler::new(*dist, seed));
    let mut arrows = ArrowField::new(params.zeta, seed);
    let values = flow_values_with(&black, &mut arrows);
    Ok(FlowTrajectory::from_values(&values, *params, *dist, seed))
}

#[cfg(test)]
mod tests {
    use super::super::paths::red_path;
    use super::*;

    #[test]
    fn zero_steps_on_an_empty_origin() {
        let black = BlackPath::from_counts(vec![0]);
        let mut arrows = ArrowField::new(0.5, 0);
        assert_eq!(flow_values_with(&black, &mut arrows), vec![0]);
    }

    #[test]
    fn coupled_values_equal_independent_red_paths() {
        let dist = EtaDistribution::two_point(3, 0.6).unwrap();
        for seed in 0..30 {
            let black = BlackPath::sample(60, &EtaSampler::new(dist, seed));
            let mut arrows = ArrowField::new(0.6, seed);
            let values = flow_values_with(&black, &mut arrows);
            for k in 0..=60i64 {
                let r = red_path(&black, &mut arrows, -k);
                assert_eq!(r.terminal(), values[k as usize], "seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn jump_list_roundtrip() {
        let params = ModelParams::from_zeta(0.5).unwrap();
        let dist = EtaDistribution::bernoulli(0.5).unwrap();
        let traj = flow_trajectory(500, &params, &dist, 9).unwrap();
        let dense = traj.dense();
        assert_eq!(dense.len(), 501);
        for (k, &v) in dense.iter().enumerate() {
            assert_eq!(traj.value_at(k as u64), v);
        }
        let rebuilt = FlowTrajectory::from_values(&dense, params, dist, 9);
        assert_eq!(rebuilt, traj);
        let total: u64 = traj.increments().map(|(_, d)| d).sum();
        assert_eq!(total, traj.final_value());
    }

    #[test]
    fn mismatched_density_is_rejected() {
        let params = ModelParams::from_zeta(0.5).unwrap();
        let dist = EtaDistribution::bernoulli(0.4).unwrap();
        assert!(matches!(
            flow_trajectory(10, &params, &dist, 1),
            Err(FlowError::ParamMismatch { .. })
        ));
    }
}
