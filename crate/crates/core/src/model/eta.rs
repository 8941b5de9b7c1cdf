use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ArwError, Configuration};
use crate::rng::{site_word, CounterRng};

/// Shape of the initial per-site particle law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaKind {
    Bernoulli,
    Poisson,
    /// `m` particles with probability `zeta / m`, none otherwise.
    TwoPoint(u32),
    /// Geometric on `{0, 1, ...}`.
    Geometric,
}

/// An i.i.d. initial law with mean `zeta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaDistribution {
    kind: EtaKind,
    zeta: f64,
}

impl EtaDistribution {
    pub fn new(kind: EtaKind, zeta: f64) -> Result<Self, ArwError> {
        if !(zeta > 0.0 && zeta <= 1.0) {
            return Err(ArwError::InvalidDistributionParams(format!(
                "mean zeta must lie in (0, 1], got {zeta}"
            )));
        }
        if let EtaKind::TwoPoint(m) = kind {
            if m == 0 || (m as f64) < zeta {
                return Err(ArwError::InvalidDistributionParams(format!(
                    "two-point height m = {m} must be a positive integer with m >= zeta"
                )));
            }
        }
        Ok(Self { kind, zeta })
    }

    pub fn bernoulli(zeta: f64) -> Result<Self, ArwError> {
        Self::new(EtaKind::Bernoulli, zeta)
    }

    pub fn poisson(zeta: f64) -> Result<Self, ArwError> {
        Self::new(EtaKind::Poisson, zeta)
    }

    pub fn two_point(m: u32, zeta: f64) -> Result<Self, ArwError> {
        Self::new(EtaKind::TwoPoint(m), zeta)
    }

    pub fn geometric(zeta: f64) -> Result<Self, ArwError> {
        Self::new(EtaKind::Geometric, zeta)
    }

    /// The two-point law with height `m` whose variance ratio is `rho`.
    ///
    /// Solves `(zeta - zeta^2) / (zeta m - zeta^2) = rho^2` for `zeta`.
    pub fn two_point_with_rho(m: u32, rho: f64) -> Result<Self, ArwError> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(ArwError::InvalidDistributionParams(format!(
                "target rho must lie in (0, 1), got {rho}"
            )));
        }
        let r2 = rho * rho;
        let zeta = (1.0 - r2 * m as f64) / (1.0 - r2);
        Self::two_point(m, zeta)
    }

    pub fn kind(&self) -> EtaKind {
        self.kind
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Variance of a Bernoulli(zeta) sleep indicator.
    pub fn sigma_s2(&self) -> f64 {
        self.zeta - self.zeta * self.zeta
    }

    /// Variance of the initial law.
    pub fn sigma_p2(&self) -> f64 {
        let z = self.zeta;
        match self.kind {
            EtaKind::Bernoulli => z - z * z,
            EtaKind::Poisson => z,
            EtaKind::TwoPoint(m) => z * m as f64 - z * z,
            EtaKind::Geometric => z + z * z,
        }
    }

    /// `sigma_s / sigma_p`; zero when the sleep indicators are degenerate.
    pub fn rho(&self) -> f64 {
        let sp2 = self.sigma_p2();
        if sp2 == 0.0 {
            return f64::NAN;
        }
        (self.sigma_s2() / sp2).sqrt()
    }

    /// Inverse-CDF draw from a uniform in (0, 1).
    pub fn quantile(&self, u: f64) -> u32 {
        let z = self.zeta;
        match self.kind {
            EtaKind::Bernoulli => (u < z) as u32,
            EtaKind::TwoPoint(m) => {
                if u < z / m as f64 {
                    m
                } else {
                    0
                }
            }
            EtaKind::Geometric => {
                // P[eta >= k] = q^k with q = zeta / (1 + zeta).
                let q = z / (1.0 + z);
                (u.ln() / q.ln()).floor() as u32
            }
            EtaKind::Poisson => {
                let mut k = 0u32;
                let mut p = (-z).exp();
                let mut cdf = p;
                while u > cdf && k < 1_000 {
                    k += 1;
                    p *= z / k as f64;
                    cdf += p;
                }
                k
            }
        }
    }
}

impl fmt::Display for EtaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaKind::Bernoulli => f.write_str("bernoulli"),
            EtaKind::Poisson => f.write_str("poisson"),
            EtaKind::TwoPoint(m) => write!(f, "twopoint:{m}"),
            EtaKind::Geometric => f.write_str("geometric"),
        }
    }
}

impl FromStr for EtaKind {
    type Err = ArwError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "bernoulli" => Ok(EtaKind::Bernoulli),
            "poisson" => Ok(EtaKind::Poisson),
            "geometric" => Ok(EtaKind::Geometric),
            other => {
                let m = other
                    .strip_prefix("twopoint:")
                    .ok_or_else(|| {
                        ArwError::InvalidDistributionParams(format!(
                            "unknown eta distribution {s:?}; expected bernoulli, poisson, geometric or twopoint:M"
                        ))
                    })?
                    .parse::<u32>()
                    .map_err(|_| {
                        ArwError::InvalidDistributionParams(format!(
                            "two-point height in {s:?} is not a positive integer"
                        ))
                    })?;
                Ok(EtaKind::TwoPoint(m))
            }
        }
    }
}

/// Keyed per-site sampler: `eta(x)` depends only on the seed and `x`.
#[derive(Clone, Copy, Debug)]
pub struct EtaSampler {
    dist: EtaDistribution,
    rng: CounterRng,
}

impl EtaSampler {
    pub fn new(dist: EtaDistribution, seed: u64) -> Self {
        Self {
            dist,
            rng: CounterRng::new(seed, "eta"),
        }
    }

    #[inline]
    pub fn at(&self, site: i64) -> u32 {
        self.dist.quantile(self.rng.uniform2(site_word(site), 0))
    }

    pub fn distribution(&self) -> EtaDistribution {
        self.dist
    }
}

/// Draw an i.i.d. configuration on `[left, right]`.
pub fn sample_eta(
    dist: EtaDistribution,
    left: i64,
    right: i64,
    seed: u64,
) -> Result<Configuration, ArwError> {
    if right < left {
        return Err(ArwError::EmptyDomain { left, right });
    }
    let sampler = EtaSampler::new(dist, seed);
    let counts: Vec<u32> = (left..=right).map(|x| sampler.at(x)).collect();
    Configuration::from_counts(left, &counts)
}
