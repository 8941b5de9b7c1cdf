use arw_lab::limit::DiffusionParams;
use arw_lab::model::{EtaDistribution, EtaKind, ModelParams, CRITICALITY_TOLERANCE};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Model parameters from `--zeta` and/or `--lambda`.
///
/// One of the two is required. When both are given they must satisfy
/// `zeta = lambda / (1 + lambda)`.
pub fn resolve_params(zeta: Option<f64>, lambda: Option<f64>) -> Result<ModelParams> {
    let params = match (zeta, lambda) {
        (Some(z), Some(l)) => ModelParams::new(l, z, CRITICALITY_TOLERANCE),
        (Some(z), None) => ModelParams::from_zeta(z),
        (None, Some(l)) => ModelParams::from_lambda(l),
        (None, None) => {
            return Err(CliError::Config(
                "one of --zeta or --lambda is required".into(),
            ))
        }
    };
    params.map_err(|e| CliError::Config(e.to_string()))
}

pub fn resolve_eta(name: &str, zeta: f64) -> Result<EtaDistribution> {
    let kind: EtaKind = name
        .parse()
        .map_err(|e| CliError::Config(format!("--eta {name:?}: {e}")))?;
    EtaDistribution::new(kind, zeta).map_err(|e| CliError::Config(e.to_string()))
}

/// Derived constants echoed into manifests.
#[derive(Clone, Debug, Serialize)]
pub struct Derived {
    pub sigma_s: f64,
    pub sigma_p: f64,
    pub r: f64,
    pub rho: f64,
}

impl From<DiffusionParams> for Derived {
    fn from(p: DiffusionParams) -> Self {
        Self {
            sigma_s: p.sigma_s,
            sigma_p: p.sigma_p,
            r: p.r,
            rho: p.rho,
        }
    }
}
