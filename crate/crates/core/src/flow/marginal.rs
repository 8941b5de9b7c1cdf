use crate::model::{Configuration, EtaDistribution, EtaSampler};
use crate::rng::{site_word, CounterRng};

use super::FlowError;

/// Per-site sleep indicators `Y(x)`, i.i.d. Bernoulli(zeta).
///
/// `Y(x)` says whether the last particle to visit `x` during a left-to-right
/// stabilization ends up asleep there. One indicator is drawn per site even
/// when no particle visits it, so every site keeps its own draw whatever
/// happens to its neighbours.
#[derive(Clone, Copy, Debug)]
pub struct SleepIndicatorStream {
    zeta: f64,
    seed: u64,
    rng: CounterRng,
}

impl SleepIndicatorStream {
    pub fn new(zeta: f64, seed: u64) -> Self {
        Self {
            zeta,
            seed,
            rng: CounterRng::new(seed, "sleep-indicators"),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn at(&self, site: i64) -> u32 {
        (self.rng.uniform2(site_word(site), 0) < self.zeta) as u32
    }
}

/// Result of stabilizing `[-L, 0]` site by site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowMarginal {
    /// Particles sent from 0 to 1.
    pub value: u64,
    /// `profile[i]` = particles sent from `-L + i` to `-L + i + 1`.
    pub profile: Vec<u64>,
}

impl FlowMarginal {
    pub fn emitted_from(&self, site: i64) -> u64 {
        let l = self.profile.len() as i64 - 1;
        self.profile[(site + l) as usize]
    }
}

fn check_domain(l: u64, eta: &Configuration) -> Result<(), FlowError> {
    let left = -(l as i64);
    if eta.left() < left || eta.right() > 0 {
        return Err(FlowError::DomainMismatch {
            left: eta.left(),
            right: eta.right(),
            expected_left: left,
        });
    }
    Ok(())
}

/// Emissions when `eta` on `[-L, 0]` is stabilized from left to right.
///
/// `N(x) = max(N(x - 1) + eta(x) - Y(x), 0)` with `N(-L - 1) = 0`, and the
/// flow is `N(0)`.
pub fn flow_marginal(
    l: u64,
    eta: &Configuration,
    ys: &SleepIndicatorStream,
) -> Result<FlowMarginal, FlowError> {
    check_domain(l, eta)?;
    let left = -(l as i64);
    let mut profile = Vec::with_capacity(l as usize + 1);
    let mut n: u64 = 0;
    for x in left..=0 {
        n = (n + eta.get(x).mass() as u64).saturating_sub(ys.at(x) as u64);
        profile.push(n);
    }
    Ok(FlowMarginal { value: n, profile })
}

/// The same profile as [`flow_marginal`], computed as `T(x) - min T` where
/// `T(x) = sum_{y=-L}^{x} (eta(y) - Y(y))` and the running minimum includes
/// the empty sum `T(-L - 1) = 0`.
pub fn flow_marginal_by_running_min(
    l: u64,
    eta: &Configuration,
    ys: &SleepIndicatorStream,
) -> Result<Vec<u64>, FlowError> {
    check_domain(l, eta)?;
    let left = -(l as i64);
    let mut t: i64 = 0;
    let mut running_min: i64 = 0;
    let mut out = Vec::with_capacity(l as usize + 1);
    for x in left..=0 {
        t += eta.get(x).mass() as i64 - ys.at(x) as i64;
        running_min = running_min.min(t);
        out.push((t - running_min) as u64);
    }
    Ok(out)
}

/// `C_L` in O(L) time and O(1) memory, drawing `eta` and `Y` from `seed`.
pub fn sample_flow_value(l: u64, dist: EtaDistribution, seed: u64) -> u64 {
    let eta = EtaSampler::new(dist, seed);
    let ys = SleepIndicatorStream::new(dist.zeta(), seed);
    let mut n: u64 = 0;
    for x in -(l as i64)..=0 {
        n = (n + eta.at(x) as u64).saturating_sub(ys.at(x) as u64);
    }
    n
}
