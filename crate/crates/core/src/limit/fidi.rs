use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::stream_rng;

use super::params::DiffusionParams;
use super::path::{coalesce_by, SampledPath};
use super::{steps_for, LimitError};

/// Query times and discretization for [`sample_fidi`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidiRequest {
    /// `0 <= x_0 <= x_1 <= ... <= x_k`.
    pub xs: Vec<f64>,
    pub dx: f64,
    pub replicas: usize,
    pub seed: u64,
    /// Account for crossings between grid points with Brownian-bridge
    /// probabilities. Off by default.
    pub bridge: bool,
    /// `dx` may be at most `x / guard` for the smallest positive query `x`.
    pub guard: f64,
}

impl FidiRequest {
    pub fn new(xs: Vec<f64>, dx: f64, replicas: usize, seed: u64) -> Self {
        Self {
            xs,
            dx,
            replicas,
            seed,
            bridge: false,
            guard: 50.0,
        }
    }

    pub fn with_bridge(mut self, bridge: bool) -> Self {
        self.bridge = bridge;
        self
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    fn validate(&self) -> Result<(), LimitError> {
        if self.xs.is_empty() {
            return Err(LimitError::InvalidRequest("no query times".into()));
        }
        if !(self.dx.is_finite() && self.dx > 0.0) {
            return Err(LimitError::InvalidRequest(format!(
                "dx must be positive, got {}",
                self.dx
            )));
        }
        if self.xs.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(LimitError::InvalidRequest(
                "query times must be finite and nonnegative".into(),
            ));
        }
        if self.xs.windows(2).any(|w| w[0] > w[1]) {
            return Err(LimitError::InvalidRequest(
                "query times must be sorted".into(),
            ));
        }
        if let Some(&x) = self.xs.iter().find(|&&x| x > 0.0) {
            let limit = x / self.guard;
            if self.dx > limit {
                return Err(LimitError::GridTooCoarse { dx: self.dx, limit });
            }
        }
        Ok(())
    }
}

/// Joint samples `(C_{x_0}, ..., C_{x_k})` in normalized units, one row per
/// replica.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidiSample {
    pub xs: Vec<f64>,
    pub params: DiffusionParams,
    pub values: Vec<Vec<f64>>,
}

impl FidiSample {
    /// All replicas of coordinate `i`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[i]).collect()
    }
}

/// Finite-dimensional marginals from coalescing reflected Brownian motions.
///
/// Per replica: a backward Brownian motion `P` with diffusivity `sigma_p` and
/// independent forward motions `S^i` with diffusivity `sigma_s` started at
/// `-x_i` give `P_x - P_{-x_i} - S^i_x`; these are reflected at their running
/// minimum, coalesced from the longest down, read at 0 and divided by
/// `sigma_p`.
pub fn sample_fidi(req: &FidiRequest, params: &DiffusionParams) -> Result<FidiSample, LimitError> {
    req.validate()?;
    let values = (0..req.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(req.seed, r as u64, "fidi");
            fidi_replica(req, params, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FidiSample {
        xs: req.xs.clone(),
        params: *params,
        values,
    })
}

fn fidi_replica(
    req: &FidiRequest,
    params: &DiffusionParams,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, LimitError> {
    let dx = req.dx;
    let sq = dx.sqrt();
    let steps: Vec<usize> = req.xs.iter().map(|&x| steps_for(x, dx)).collect();
    let m = *steps.last().expect("validated nonempty");

    // p[t] is P at x = -t dx.
    let mut p = Vec::with_capacity(m + 1);
    p.push(0.0);
    for t in 1..=m {
        let z: f64 = rng.sample(StandardNormal);
        p.push(p[t - 1] + params.sigma_p * sq * z);
    }

    let r2dx = params.r * params.r * dx;
    let mut reflected = Vec::with_capacity(steps.len());
    for &n in &steps {
        let mut values = Vec::with_capacity(n + 1);
        let mut s = 0.0;
        let mut min = 0.0f64;
        let mut prev = 0.0;
        values.push(0.0);
        for t in (0..n).rev() {
            let z: f64 = rng.sample(StandardNormal);
            s += params.sigma_s * sq * z;
            let b = p[t] - p[n] - s;
            if req.bridge {
                // Minimum of the Brownian bridge from prev to b.
                let u: f64 = rng.random();
                let d = b - prev;
                let low = 0.5 * (prev + b - (d * d - 2.0 * r2dx * (1.0 - u).ln()).sqrt());
                min = min.min(low);
            }
            min = min.min(b);
            values.push(b - min);
            prev = b;
        }
        reflected.push(SampledPath::new(-(n as f64) * dx, dx, values));
    }

    let gap_var = 2.0 * params.sigma_s * params.sigma_s * dx;
    let coalesced = if req.bridge && gap_var > 0.0 {
        coalesce_by(&reflected, |prev, gap| {
            if gap <= 0.0 {
                return true;
            }
            match prev {
                Some(g0) if g0 > 0.0 => {
                    let u: f64 = rng.random();
                    u < (-2.0 * g0 * gap / gap_var).exp()
                }
                _ => false,
            }
        })?
    } else {
        coalesce_by(&reflected, |_, gap| gap <= 0.0)?
    };
    Ok(coalesced
        .paths
        .iter()
        .map(|path| params.normalize(path.last().expect("nonempty")))
        .collect())
}
