//! Empirical distributions, Kolmogorov-Smirnov tests, reference laws and
//! jump diagnostics.

mod jumps;
mod ks;
mod selfsim;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use jumps::{extract_jumps, JumpSource, JumpSummary};
pub use ks::{
    half_normal_cdf, kolmogorov_survival, ks_one_sample, ks_two_sample, EmpiricalSample, KSResult,
};
pub use selfsim::{scaling_check, self_similarity_check};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value {0}")]
    NonFinite(f64),
    #[error("scale must be positive, got {0}")]
    NonpositiveScale(f64),
}

/// One line of a verification report.
///
/// KS lines carry the statistic in `d` and the p-value in `p`. Other lines
/// put their measured quantity in `d` and leave `p` empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: String,
    #[serde(rename = "D")]
    pub d: f64,
    pub n: f64,
    pub p: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl TestReport {
    /// Pass when `D < max_d`.
    pub fn below(test: impl Into<String>, ks: &KSResult, max_d: f64) -> Self {
        Self {
            test: test.into(),
            d: ks.statistic,
            n: ks.n_effective,
            p: Some(ks.p_value),
            pass: ks.statistic < max_d,
            detail: Some(format!("threshold D < {max_d}")),
        }
    }

    /// Pass when `D > min_d`.
    pub fn above(test: impl Into<String>, ks: &KSResult, min_d: f64) -> Self {
        Self {
            pass: ks.statistic > min_d,
            detail: Some(format!("threshold D > {min_d}")),
            ..Self::below(test, ks, f64::INFINITY)
        }
    }

    /// A non-KS measurement.
    pub fn metric(test: impl Into<String>, value: f64, n: usize, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            test: test.into(),
            d: value,
            n: n as f64,
            p: None,
            pass,
            detail: Some(detail.into()),
        }
    }
}
