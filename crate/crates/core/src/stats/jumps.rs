use serde::{Deserialize, Serialize};

use crate::flow::FlowTrajectory;
use crate::limit::StepFunction;

/// Anything that can list its increments as `(location, size)`.
pub trait JumpSource {
    fn jump_increments(&self) -> Vec<(f64, f64)>;
}

impl JumpSource for StepFunction {
    fn jump_increments(&self) -> Vec<(f64, f64)> {
        self.increments()
    }
}

impl JumpSource for FlowTrajectory {
    fn jump_increments(&self) -> Vec<(f64, f64)> {
        self.increments().map(|(k, d)| (k as f64, d as f64)).collect()
    }
}

impl JumpSource for [(f64, f64)] {
    fn jump_increments(&self) -> Vec<(f64, f64)> {
        self.to_vec()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSummary {
    pub gamma: f64,
    pub window: f64,
    /// Jumps larger than `gamma`, sorted by location.
    pub locations: Vec<f64>,
    pub sizes: Vec<f64>,
    /// Largest number of those jumps inside one window `[x, x + window)`.
    pub max_per_window: usize,
}

impl JumpSummary {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> f64 {
        self.sizes.iter().sum()
    }

    pub fn mean_size(&self) -> Option<f64> {
        (!self.sizes.is_empty()).then(|| self.total() / self.count() as f64)
    }

    /// `sum J^2 / sum J`: the mean size of the jump covering a uniformly
    /// chosen unit of the total increase.
    pub fn size_biased_mean(&self) -> Option<f64> {
        let total = self.total();
        (total > 0.0).then(|| self.sizes.iter().map(|j| j * j).sum::<f64>() / total)
    }
}

/// Jumps larger than `gamma`, with the densest cluster inside windows of
/// length `window`.
pub fn extract_jumps<S: JumpSource + ?Sized>(path: &S, gamma: f64, window: f64) -> JumpSummary {
    let mut incs: Vec<(f64, f64)> = path
        .jump_increments()
        .into_iter()
        .filter(|&(_, d)| d > gamma)
        .collect();
    incs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let locations: Vec<f64> = incs.iter().map(|j| j.0).collect();
    let sizes = incs.iter().map(|j| j.1).collect();
    let mut max_per_window = 0;
    let mut lo = 0;
    for hi in 0..locations.len() {
        while locations[hi] - locations[lo] >= window {
            lo += 1;
        }
        max_per_window = max_per_window.max(hi - lo + 1);
    }
    JumpSummary {
        gamma,
        window,
        locations,
        sizes,
        max_per_window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::flow_trajectory;
    use crate::model::{EtaDistribution, ModelParams};

    #[test]
    fn constant_path_has_no_jumps() {
        let f = StepFunction {
            start: 0.0,
            end: 1.0,
            initial: 3.0,
            jumps: vec![],
        };
        let s = extract_jumps(&f, 0.0, 0.1);
        assert_eq!(s.count(), 0);
        assert_eq!(s.mean_size(), None);
        assert_eq!(s.max_per_window, 0);
    }

    #[test]
    fn single_step_above_threshold() {
        let f = StepFunction {
            start: 0.0,
            end: 2.0,
            initial: 0.0,
            jumps: vec![(1.0, 2.0)],
        };
        let s = extract_jumps(&f, 1.0, 0.5);
        assert_eq!(s.locations, vec![1.0]);
        assert_eq!(s.sizes, vec![2.0]);
        assert_eq!(extract_jumps(&f, 2.0, 0.5).count(), 0);
    }

    #[test]
    fn clusters_and_size_bias() {
        let incs = [(0.0, 1.0), (0.1, 1.0), (0.15, 2.0), (1.0, 4.0)];
        let s = extract_jumps(&incs[..], 0.0, 0.2);
        assert_eq!(s.max_per_window, 3);
        assert_eq!(extract_jumps(&incs[..], 0.0, 0.1).max_per_window, 2);
        assert_eq!(s.mean_size(), Some(2.0));
        assert!((s.size_biased_mean().unwrap() - 22.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn total_variation_of_a_trajectory() {
        let params = ModelParams::from_zeta(0.6).unwrap();
        let dist = EtaDistribution::two_point(3, 0.6).unwrap();
        let traj = flow_trajectory(2000, &params, &dist, 4).unwrap();
        let s = extract_jumps(&traj, 0.0, 10.0);
        assert_eq!(s.total(), traj.final_value() as f64);
    }
}
