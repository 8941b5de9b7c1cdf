use crate::model::{
    stabilize, ArwError, Configuration, EtaDistribution, EtaSampler, InstructionField, LeftToRight,
    ModelParams, TopplingPolicy, DEFAULT_TOPPLE_BUDGET,
};

use super::paths::BlackPath;
use super::trajectory::FlowTrajectory;
use super::FlowError;

/// Output of the direct simulation.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub trajectory: FlowTrajectory,
    /// Stable configuration after the last release; particles that left the
    /// origin sit at site 1.
    pub final_config: Configuration,
}

/// Release `eta(0)`, `eta(-1)`, ... one site at a time, restabilizing in
/// between, and record the cumulative number of particles sent from 0 to 1.
pub fn flow_oracle_with<P: TopplingPolicy + ?Sized>(
    black: &BlackPath,
    field: &mut InstructionField,
    policy: &mut P,
    budget: u64,
) -> Result<(Vec<u64>, Configuration), ArwError> {
    let n = -black.left();
    let mut config = Configuration::empty(0, 1)?;
    let mut values = Vec::with_capacity(n as usize + 1);
    let mut emitted = 0u64;
    for k in 0..=n {
        let site = -k;
        config.add_particles(site, black.eta(site));
        let odometer = stabilize(&mut config, field, (site, 0), policy, budget)?;
        emitted += odometer.emissions(0);
        values.push(emitted);
    }
    Ok((values, config))
}

/// Direct-stabilization sample of `(C_0, ..., C_n)`.
///
/// Draws the same initial configuration as [`super::flow_trajectory`] for the
/// same seed. Costs at least quadratically in `n`; meant as a reference for
/// small systems.
pub fn flow_oracle(
    n: u64,
    params: &ModelParams,
    dist: &EtaDistribution,
    seed: u64,
) -> Result<OracleRun, FlowError> {
    if (params.zeta - dist.zeta()).abs() > params.criticality_tolerance {
        return Err(FlowError::ParamMismatch {
            params_zeta: params.zeta,
            eta_zeta: dist.zeta(),
        });
    }
    let black = BlackPath::sample(n, &EtaSampler::new(*dist, seed));
    let mut field = InstructionField::new(params.zeta, seed)?;
    let (values, final_config) =
        flow_oracle_with(&black, &mut field, &mut LeftToRight, DEFAULT_TOPPLE_BUDGET)?;
    Ok(OracleRun {
        trajectory: FlowTrajectory::from_values(&values, *params, *dist, seed),
        final_config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Instruction, SiteState};

    #[test]
    fn single_particle_falls_asleep() {
        let black = BlackPath::from_counts(vec![1]);
        let mut field = InstructionField::new(0.5, 0)
            .unwrap()
            .with_prefix(0, vec![Instruction::Sleep]);
        let (values, cfg) = flow_oracle_with(&black, &mut field, &mut LeftToRight, 100).unwrap();
        assert_eq!(values, vec![0]);
        assert_eq!(cfg.get(0), SiteState::Sleeping);
    }

    #[test]
    fn single_particle_moves_out() {
        let black = BlackPath::from_counts(vec![1]);
        let mut field = InstructionField::new(0.5, 0)
            .unwrap()
            .with_prefix(0, vec![Instruction::Move]);
        let (values, cfg) = flow_oracle_with(&black, &mut field, &mut LeftToRight, 100).unwrap();
        assert_eq!(values, vec![1]);
        assert_eq!(cfg.get(1), SiteState::Count(1));
    }

    #[test]
    fn mass_is_conserved_and_flow_is_monotone() {
        let params = ModelParams::from_zeta(0.5).unwrap();
        let dist = EtaDistribution::poisson(0.5).unwrap();
        for seed in 0..20 {
            let run = flow_oracle(40, &params, &dist, seed).unwrap();
            let dense = run.trajectory.dense();
            assert!(dense.windows(2).all(|w| w[0] <= w[1]));
            let released: u64 = (-40..=0)
                .map(|x| EtaSampler::new(dist, seed).at(x) as u64)
                .sum();
            assert_eq!(run.final_config.mass(), released);
            assert_eq!(
                run.final_config.get(1).mass() as u64,
                run.trajectory.final_value()
            );
        }
    }

    #[test]
    fn degenerate_density_is_an_error() {
        let params = ModelParams::from_zeta(1.0).unwrap();
        let dist = EtaDistribution::two_point(3, 1.0).unwrap();
        assert!(flow_oracle(3, &params, &dist, 0).is_err());
    }
}
