use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use super::StatsError;

/// A finite sample, kept sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptySample);
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(v));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.values
    }

    /// Fraction of the sample `<= x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut values: Vec<f64> = self.values.iter().map(|v| v * c).collect();
        if c < 0.0 {
            values.reverse();
        }
        Self { values }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSResult {
    pub statistic: f64,
    pub n_effective: f64,
    pub p_value: f64,
}

impl KSResult {
    fn new(statistic: f64, n_effective: f64) -> Self {
        Self {
            statistic,
            n_effective,
            p_value: kolmogorov_survival(statistic * n_effective.sqrt()),
        }
    }
}

/// `P[K > lambda]` for the Kolmogorov distribution.
///
/// Uses the alternating series for `lambda >= 1` and the Jacobi theta form
/// below, with 100 terms each.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.0 {
        let mut sum = 0.0;
        for k in 1..=100 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * PI * PI / (8.0 * lambda * lambda)).exp();
            sum += term;
            if term < 1e-300 {
                break;
            }
        }
        1.0 - (2.0 * PI).sqrt() / lambda * sum
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// Sup distance between the sample's empirical CDF and `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &EmpiricalSample, cdf: F) -> KSResult {
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sample.sorted().iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    KSResult::new(d.min(1.0), n)
}

/// Sup distance between two empirical CDFs.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> KSResult {
    let (xa, xb) = (a.sorted(), b.sorted());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    KSResult::new(d, na * nb / (na + nb))
}

/// CDF of `|Normal(0, s^2)|`: `2 Phi(c / s) - 1` for `c >= 0`.
pub fn half_normal_cdf(c: f64, s: f64) -> Result<f64, StatsError> {
    if !(s > 0.0) {
        return Err(StatsError::NonpositiveScale(s));
    }
    Ok(if c <= 0.0 { 0.0 } else { erf(c / (s * SQRT_2)) })
}
