use serde::{Deserialize, Serialize};

use crate::model::EtaDistribution;

use super::LimitError;

/// Diffusion constants of the scaling limit.
///
/// `sigma_s^2 = zeta - zeta^2` comes from the sleep instructions, `sigma_p^2`
/// is the variance of the initial law, `r^2 = sigma_s^2 + sigma_p^2` and
/// `rho = sigma_s / sigma_p`. Raw flow values convert to normalized ones by
/// dividing by `sigma_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    pub zeta: Option<f64>,
    pub sigma_s: f64,
    pub sigma_p: f64,
    pub r: f64,
    pub rho: f64,
}

impl DiffusionParams {
    pub fn new(sigma_s: f64, sigma_p: f64) -> Result<Self, LimitError> {
        if !(sigma_p.is_finite() && sigma_p > 0.0) {
            return Err(LimitError::InvalidRequest(format!(
                "sigma_p must be positive, got {sigma_p}"
            )));
        }
        if !(sigma_s.is_finite() && sigma_s >= 0.0 && sigma_s <= sigma_p * (1.0 + 1e-12)) {
            return Err(LimitError::InvalidRequest(format!(
                "sigma_s must lie in [0, sigma_p], got {sigma_s}"
            )));
        }
        Ok(Self {
            zeta: None,
            sigma_s,
            sigma_p,
            r: (sigma_s * sigma_s + sigma_p * sigma_p).sqrt(),
            rho: (sigma_s / sigma_p).min(1.0),
        })
    }

    /// Constants of the lattice model with initial law `dist`.
    pub fn from_eta(dist: &EtaDistribution) -> Result<Self, LimitError> {
        let mut p = Self::new(dist.sigma_s2().sqrt(), dist.sigma_p2().sqrt())?;
        p.zeta = Some(dist.zeta());
        Ok(p)
    }

    /// Normalized units: `sigma_p = 1`, `sigma_s = rho`.
    pub fn normalized(rho: f64) -> Result<Self, LimitError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(LimitError::InvalidRho(rho));
        }
        Self::new(rho, 1.0)
    }

    /// The same process in normalized units.
    pub fn to_normalized(&self) -> Self {
        Self {
            zeta: self.zeta,
            sigma_s: self.rho,
            sigma_p: 1.0,
            r: (1.0 + self.rho * self.rho).sqrt(),
            rho: self.rho,
        }
    }

    /// Raw flow value to normalized.
    pub fn normalize(&self, raw: f64) -> f64 {
        raw / self.sigma_p
    }

    /// Normalized value to raw flow units.
    pub fn denormalize(&self, value: f64) -> f64 {
        value * self.sigma_p
    }

    /// Scale of the half-normal one-point law at `x`, in normalized units.
    pub fn marginal_scale(&self, x: f64) -> f64 {
        (self.r / self.sigma_p) * x.sqrt()
    }
}
