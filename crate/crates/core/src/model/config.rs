use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ArwError, SiteState};

/// Particle configuration on a finite interval of sites. Sites outside the
/// support hold no particles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    left: i64,
    states: Vec<SiteState>,
}

impl Configuration {
    /// Empty configuration on `[left, right]`.
    pub fn empty(left: i64, right: i64) -> Result<Self, ArwError> {
        if right < left {
            return Err(ArwError::EmptyDomain { left, right });
        }
        Ok(Self {
            left,
            states: vec![SiteState::EMPTY; (right - left + 1) as usize],
        })
    }

    /// Active-particle counts on `[left, left + counts.len() - 1]`.
    pub fn from_counts(left: i64, counts: &[u32]) -> Result<Self, ArwError> {
        Self::from_states(left, counts.iter().map(|&n| SiteState::Count(n)).collect())
    }

    pub fn from_states(left: i64, states: Vec<SiteState>) -> Result<Self, ArwError> {
        if states.is_empty() {
            return Err(ArwError::EmptyDomain {
                left,
                right: left - 1,
            });
        }
        Ok(Self { left, states })
    }

    pub fn left(&self) -> i64 {
        self.left
    }

    pub fn right(&self) -> i64 {
        self.left + self.states.len() as i64 - 1
    }

    pub fn contains(&self, site: i64) -> bool {
        site >= self.left && site <= self.right()
    }

    /// State at `site`; zero outside the support.
    pub fn get(&self, site: i64) -> SiteState {
        if self.contains(site) {
            self.states[(site - self.left) as usize]
        } else {
            SiteState::EMPTY
        }
    }

    pub fn states(&self) -> &[SiteState] {
        &self.states
    }

    pub(crate) fn slot_mut(&mut self, site: i64) -> Result<&mut SiteState, ArwError> {
        if !self.contains(site) {
            return Err(ArwError::SiteOutsideSupport {
                site,
                left: self.left,
                right: self.right(),
            });
        }
        Ok(&mut self.states[(site - self.left) as usize])
    }

    pub fn set(&mut self, site: i64, state: SiteState) {
        self.extend_to(site);
        let idx = (site - self.left) as usize;
        self.states[idx] = state;
    }

    /// Add `count` active particles at `site`, waking a sleeping particle.
    pub fn add_particles(&mut self, site: i64, count: u32) {
        if count == 0 {
            self.extend_to(site);
            return;
        }
        let current = self.get(site);
        let next = match current {
            SiteState::Count(n) => SiteState::Count(n + count),
            SiteState::Sleeping => SiteState::Count(1 + count),
        };
        self.set(site, next);
    }

    /// Grow the support so that it contains `site`.
    pub fn extend_to(&mut self, site: i64) {
        if site < self.left {
            let extra = (self.left - site) as usize;
            let mut grown = vec![SiteState::EMPTY; extra];
            grown.extend_from_slice(&self.states);
            self.states = grown;
            self.left = site;
        } else if site > self.right() {
            let extra = (site - self.right()) as usize;
            self.states
                .extend(std::iter::repeat_n(SiteState::EMPTY, extra));
        }
    }

    /// Total number of particles, sleeping ones included.
    pub fn mass(&self) -> u64 {
        self.states.iter().map(|s| s.mass() as u64).sum()
    }

    /// Total mass on the sites of `[left, right]`.
    pub fn mass_in(&self, left: i64, right: i64) -> u64 {
        (left..=right).map(|x| self.get(x).mass() as u64).sum()
    }

    pub fn is_stable_on(&self, left: i64, right: i64) -> bool {
        (left..=right).all(|x| !self.get(x).is_unstable())
    }

    pub fn unstable_sites(&self, left: i64, right: i64) -> impl Iterator<Item = i64> + '_ {
        (left..=right).filter(move |&x| self.get(x).is_unstable())
    }

    /// Equality of particle content, ignoring how far the supports extend.
    pub fn same_particles(&self, other: &Configuration) -> bool {
        let lo = self.left.min(other.left);
        let hi = self.right().max(other.right());
        (lo..=hi).all(|x| self.get(x) == other.get(x))
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, SiteState> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| ((self.left + i as i64).to_string(), *s))
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw: BTreeMap<String, SiteState> = BTreeMap::deserialize(deserializer)?;
        let mut sites = BTreeMap::new();
        for (k, v) in raw {
            let site: i64 = k
                .parse()
                .map_err(|_| D::Error::custom(format!("site key {k:?} is not an integer")))?;
            sites.insert(site, v);
        }
        let (&left, _) = sites
            .first_key_value()
            .ok_or_else(|| D::Error::custom("configuration has no sites"))?;
        let (&right, _) = sites.last_key_value().expect("nonempty");
        let mut cfg = Configuration::empty(left, right).map_err(D::Error::custom)?;
        for (site, state) in sites {
            cfg.set(site, state);
        }
        Ok(cfg)
    }
}
