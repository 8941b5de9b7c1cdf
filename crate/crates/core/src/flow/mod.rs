//! The flow process `C_n`: particles crossing from 0 to 1 as sites
//! `0, -1, ..., -n` are released and stabilized in turn.
//!
//! Three routes are provided. [`flow_marginal`] evaluates a single `C_L` as a
//! reflected random walk. [`flow_trajectory`] samples the whole sequence
//! jointly from coalescing red paths over one black path. [`flow_oracle`]
//! releases and restabilizes the particles with legal topplings.

mod io;
mod marginal;
mod oracle;
mod paths;
mod trajectory;

use std::collections::HashMap;

use thiserror::Error;

use crate::model::ArwError;

pub use io::{read_jump_csv, write_dense_csv, write_jump_csv, TrajectoryMeta};
pub use marginal::{
    flow_marginal, flow_marginal_by_running_min, sample_flow_value, FlowMarginal,
    SleepIndicatorStream,
};
pub use oracle::{flow_oracle, flow_oracle_with, OracleRun};
pub use paths::{blue_paths, red_path, ArrowField, ArrowSource, BlackPath, BluePath, RedPath};
pub use trajectory::{flow_trajectory, flow_values_with, FlowJump, FlowTrajectory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Model(#[from] ArwError),
    #[error("configuration support [{left}, {right}] exceeds [{expected_left}, 0]")]
    DomainMismatch {
        left: i64,
        right: i64,
        expected_left: i64,
    },
    #[error("model density {params_zeta} differs from the initial-law mean {eta_zeta}")]
    ParamMismatch { params_zeta: f64, eta_zeta: f64 },
    #[error("seed {seed} already used with different parameters ({previous}) in this batch")]
    SeedCollision { seed: u64, previous: String },
}

/// Tracks which parameters each seed was used with inside one batch.
#[derive(Debug, Default)]
pub struct SeedRegistry {
    seen: HashMap<u64, String>,
}

impl SeedRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record `seed` for the parameter set `fingerprint`. Reusing a seed with
    /// the same fingerprint is allowed.
    pub fn register(&mut self, seed: u64, fingerprint: &str) -> Result<(), FlowError> {
        match self.seen.get(&seed) {
            Some(prev) if prev != fingerprint => Err(FlowError::SeedCollision {
                seed,
                previous: prev.clone(),
            }),
            Some(_) => Ok(()),
            None => {
                self.seen.insert(seed, fingerprint.to_owned());
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_reuse_with_other_params_collides() {
        let mut reg = SeedRegistry::new();
        reg.register(1, "zeta=0.5").unwrap();
        reg.register(1, "zeta=0.5").unwrap();
        reg.register(2, "zeta=0.6").unwrap();
        assert!(matches!(
            reg.register(1, "zeta=0.6"),
            Err(FlowError::SeedCollision { seed: 1, .. })
        ));
    }
}
