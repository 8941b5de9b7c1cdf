use serde::{Deserialize, Serialize};

use super::ArwError;

/// Default tolerance for the criticality relation `zeta = lambda / (1 + lambda)`.
pub const CRITICALITY_TOLERANCE: f64 = 1e-12;

/// Sleep rate and density of a critical system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Sleep rate; `f64::INFINITY` is the instantaneous-sleep limit.
    pub lambda: f64,
    pub zeta: f64,
    pub criticality_tolerance: f64,
}

/// `lambda / (1 + lambda)`, with the `lambda = inf` limit mapped to 1.
pub fn critical_density(lambda: f64) -> f64 {
    if lambda.is_infinite() {
        1.0
    } else {
        lambda / (1.0 + lambda)
    }
}

impl ModelParams {
    pub fn new(lambda: f64, zeta: f64, tolerance: f64) -> Result<Self, ArwError> {
        if lambda.is_nan() || lambda <= 0.0 {
            return Err(ArwError::InvalidParameter(format!(
                "lambda must lie in (0, inf], got {lambda}"
            )));
        }
        if !(zeta > 0.0 && zeta <= 1.0) {
            return Err(ArwError::InvalidParameter(format!(
                "zeta must lie in (0, 1], got {zeta}"
            )));
        }
        if !(tolerance > 0.0) {
            return Err(ArwError::InvalidParameter(format!(
                "criticality tolerance must be positive, got {tolerance}"
            )));
        }
        let expected = critical_density(lambda);
        if (zeta - expected).abs() > tolerance {
            return Err(ArwError::CriticalityViolation {
                zeta,
                expected,
                tolerance,
            });
        }
        Ok(Self {
            lambda,
            zeta,
            criticality_tolerance: tolerance,
        })
    }

    /// The critical system with density `zeta`.
    pub fn from_zeta(zeta: f64) -> Result<Self, ArwError> {
        if !(zeta > 0.0 && zeta <= 1.0) {
            return Err(ArwError::InvalidParameter(format!(
                "zeta must lie in (0, 1], got {zeta}"
            )));
        }
        let lambda = if zeta == 1.0 {
            f64::INFINITY
        } else {
            zeta / (1.0 - zeta)
        };
        Self::new(lambda, zeta, CRITICALITY_TOLERANCE)
    }

    /// The critical system with sleep rate `lambda`.
    pub fn from_lambda(lambda: f64) -> Result<Self, ArwError> {
        Self::new(lambda, critical_density(lambda), CRITICALITY_TOLERANCE)
    }

    /// Probability that a single instruction is a sleep instruction.
    pub fn sleep_probability(&self) -> f64 {
        self.zeta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_pairs_are_critical() {
        let p = ModelParams::from_zeta(0.5).unwrap();
        assert_eq!(p.lambda, 1.0);
        let q = ModelParams::from_lambda(3.0).unwrap();
        assert!((q.zeta - 0.75).abs() < 1e-15);
        let inf = ModelParams::from_zeta(1.0).unwrap();
        assert!(inf.lambda.is_infinite());
    }

    #[test]
    fn off_critical_pair_is_rejected() {
        let err = ModelParams::new(1.0, 0.9, CRITICALITY_TOLERANCE).unwrap_err();
        assert!(matches!(err, ArwError::CriticalityViolation { .. }));
    }

    #[test]
    fn out_of_range_inputs_are_rejected() {
        assert!(ModelParams::from_zeta(0.0).is_err());
        assert!(ModelParams::from_zeta(1.2).is_err());
        assert!(ModelParams::from_lambda(-1.0).is_err());
        assert!(ModelParams::new(1.0, 0.5, 0.0).is_err());
    }
}
