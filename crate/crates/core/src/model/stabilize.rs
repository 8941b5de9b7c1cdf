use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ArwError, Configuration, Instruction, InstructionField, SiteState};

/// Default cap on the total number of topplings in one stabilization.
pub const DEFAULT_TOPPLE_BUDGET: u64 = 1_000_000_000;

/// Apply the next instruction at `site`.
///
/// A `Move` sends one particle to `site + 1`, growing the support if needed.
/// A `Sleep` turns a lone active particle into a sleeping one and leaves
/// larger piles unchanged; the instruction is consumed either way.
pub fn topple(
    config: &mut Configuration,
    field: &mut InstructionField,
    site: i64,
) -> Result<Instruction, ArwError> {
    let state = *config.slot_mut(site)?;
    if !state.is_unstable() {
        return Err(ArwError::ToppleIllegal { site });
    }
    let ins = field.next(site);
    match ins {
        Instruction::Move => {
            let SiteState::Count(n) = state else {
                unreachable!("unstable sites hold active particles")
            };
            *config.slot_mut(site)? = SiteState::Count(n - 1);
            let target = config.get(site + 1).with_arrival();
            config.set(site + 1, target);
        }
        Instruction::Sleep => {
            *config.slot_mut(site)? = state.with_sleep_attempt();
        }
    }
    Ok(ins)
}

/// Per-site toppling and emission counts of one stabilization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Odometer {
    left: i64,
    counts: Vec<u64>,
    emissions: Vec<u64>,
}

impl Odometer {
    pub fn zero(left: i64, right: i64) -> Self {
        let len = (right - left + 1).max(0) as usize;
        Self {
            left,
            counts: vec![0; len],
            emissions: vec![0; len],
        }
    }

    fn index(&self, site: i64) -> Option<usize> {
        let i = site - self.left;
        (i >= 0 && (i as usize) < self.counts.len()).then_some(i as usize)
    }

    pub fn left(&self) -> i64 {
        self.left
    }

    pub fn right(&self) -> i64 {
        self.left + self.counts.len() as i64 - 1
    }

    /// Topplings performed at `site`.
    pub fn count(&self, site: i64) -> u64 {
        self.index(site).map_or(0, |i| self.counts[i])
    }

    /// Particles sent from `site` to `site + 1`.
    pub fn emissions(&self, site: i64) -> u64 {
        self.index(site).map_or(0, |i| self.emissions[i])
    }

    pub fn total_topplings(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn record(&mut self, site: i64, ins: Instruction) {
        let i = self.index(site).expect("toppling inside the domain");
        self.counts[i] += 1;
        if ins == Instruction::Move {
            self.emissions[i] += 1;
        }
    }

    /// Sites with their toppling counts, as a sorted map.
    pub fn counts_map(&self) -> BTreeMap<i64, u64> {
        (self.left..=self.right()).map(|x| (x, self.count(x))).collect()
    }

    pub fn emissions_map(&self) -> BTreeMap<i64, u64> {
        (self.left..=self.right())
            .map(|x| (x, self.emissions(x)))
            .collect()
    }
}

/// Chooses which unstable site to topple next.
pub trait TopplingPolicy {
    /// Pick a site from the nonempty set of currently unstable sites.
    fn choose(&mut self, unstable: &BTreeSet<i64>) -> i64;
}

/// Always topple the leftmost unstable site.
#[derive(Clone, Copy, Debug, Default)]
pub struct LeftToRight;

/// Always topple the rightmost unstable site.
#[derive(Clone, Copy, Debug, Default)]
pub struct RightmostFirst;

/// Topple a uniformly chosen unstable site.
#[derive(Clone, Debug)]
pub struct UniformRandom(pub ChaCha8Rng);

impl TopplingPolicy for LeftToRight {
    fn choose(&mut self, unstable: &BTreeSet<i64>) -> i64 {
        *unstable.first().expect("nonempty")
    }
}

impl TopplingPolicy for RightmostFirst {
    fn choose(&mut self, unstable: &BTreeSet<i64>) -> i64 {
        *unstable.last().expect("nonempty")
    }
}

impl TopplingPolicy for UniformRandom {
    fn choose(&mut self, unstable: &BTreeSet<i64>) -> i64 {
        let k = self.0.random_range(0..unstable.len());
        *unstable.iter().nth(k).expect("index in range")
    }
}

impl<F: FnMut(&BTreeSet<i64>) -> i64> TopplingPolicy for F {
    fn choose(&mut self, unstable: &BTreeSet<i64>) -> i64 {
        self(unstable)
    }
}

/// Stabilize `config` on the domain `[left, right]`.
///
/// Particles leaving the domain through its right end pile up at
/// `right + 1`, which is never toppled. Sites left of the domain are not
/// touched. The policy may pick any unstable site of the domain at each step;
/// a pick outside the unstable set is reported as an illegal toppling.
pub fn stabilize<P: TopplingPolicy + ?Sized>(
    config: &mut Configuration,
    field: &mut InstructionField,
    domain: (i64, i64),
    policy: &mut P,
    budget: u64,
) -> Result<Odometer, ArwError> {
    let (left, right) = domain;
    if right < left {
        return Err(ArwError::EmptyDomain { left, right });
    }
    config.extend_to(left);
    config.extend_to(right + 1);
    let mut odometer = Odometer::zero(left, right);
    let mut unstable: BTreeSet<i64> = config.unstable_sites(left, right).collect();
    let mut performed = 0u64;
    while !unstable.is_empty() {
        if performed >= budget {
            return Err(ArwError::ToppleBudgetExceeded { cap: budget });
        }
        let site = policy.choose(&unstable);
        if !unstable.contains(&site) {
            return Err(ArwError::ToppleIllegal { site });
        }
        let ins = topple(config, field, site)?;
        performed += 1;
        odometer.record(site, ins);
        if !config.get(site).is_unstable() {
            unstable.remove(&site);
        }
        if ins == Instruction::Move && site < right && config.get(site + 1).is_unstable() {
            unstable.insert(site + 1);
        }
    }
    Ok(odometer)
}
