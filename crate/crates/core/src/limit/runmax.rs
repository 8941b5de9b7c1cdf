use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::stream_rng;

use super::path::SampledPath;
use super::{steps_for, LimitError};

/// Running maximum of a standard Brownian motion on `[0, xmax]`.
///
/// This is the limit when `rho = 0`.
pub fn running_max_bm(xmax: f64, dx: f64, seed: u64) -> Result<SampledPath, LimitError> {
    if !(dx.is_finite() && dx > 0.0 && xmax.is_finite() && xmax >= 0.0) {
        return Err(LimitError::InvalidRequest(format!(
            "need dx > 0 and xmax >= 0, got dx = {dx}, xmax = {xmax}"
        )));
    }
    let n = steps_for(xmax, dx);
    let mut rng = stream_rng(seed, 0, "running-max");
    let sq = dx.sqrt();
    let mut w = 0.0f64;
    let mut max = 0.0f64;
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        w += sq * z;
        max = max.max(w);
        values.push(max);
    }
    Ok(SampledPath::new(0.0, dx, values))
}
