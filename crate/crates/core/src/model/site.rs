use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// State of a single site: a number of active particles, or one sleeping
/// particle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteState {
    Count(u32),
    Sleeping,
}

impl Default for SiteState {
    fn default() -> Self {
        SiteState::EMPTY
    }
}

impl SiteState {
    pub const EMPTY: SiteState = SiteState::Count(0);

    /// Number of particles, with a sleeping particle counted as one.
    #[inline]
    pub fn mass(self) -> u32 {
        match self {
            SiteState::Count(n) => n,
            SiteState::Sleeping => 1,
        }
    }

    /// A site is unstable iff it holds at least one active particle.
    #[inline]
    pub fn is_unstable(self) -> bool {
        matches!(self, SiteState::Count(n) if n >= 1)
    }

    /// One more active particle arrives; a sleeping particle is woken up.
    #[inline]
    pub fn with_arrival(self) -> SiteState {
        match self {
            SiteState::Count(n) => SiteState::Count(n + 1),
            SiteState::Sleeping => SiteState::Count(2),
        }
    }

    /// The sleep operator: a lone active particle falls asleep, larger piles
    /// are unaffected.
    #[inline]
    pub fn with_sleep_attempt(self) -> SiteState {
        match self {
            SiteState::Count(1) => SiteState::Sleeping,
            other => other,
        }
    }

    fn rank(self) -> u64 {
        match self {
            SiteState::Count(0) => 0,
            SiteState::Sleeping => 1,
            SiteState::Count(n) => n as u64 + 1,
        }
    }
}

impl PartialOrd for SiteState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `0 < s < 1 < 2 < ...`
impl Ord for SiteState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for SiteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteState::Sleeping => f.write_str("s"),
            SiteState::Count(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for SiteState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            SiteState::Sleeping => serializer.serialize_str("s"),
            SiteState::Count(n) => serializer.serialize_u32(n),
        }
    }
}

impl<'de> Deserialize<'de> for SiteState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct StateVisitor;

        impl Visitor<'_> for StateVisitor {
            type Value = SiteState;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a particle count or the sleeping mark \"s\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<SiteState, E> {
                u32::try_from(v)
                    .map(SiteState::Count)
                    .map_err(|_| E::custom("particle count out of range"))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<SiteState, E> {
                u32::try_from(v)
                    .map(SiteState::Count)
                    .map_err(|_| E::custom("particle count must be a nonnegative u32"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<SiteState, E> {
                if v == "s" {
                    Ok(SiteState::Sleeping)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(StateVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_sleeping_between_zero_and_one() {
        let mut v = vec![
            SiteState::Count(2),
            SiteState::Count(1),
            SiteState::Sleeping,
            SiteState::Count(0),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                SiteState::Count(0),
                SiteState::Sleeping,
                SiteState::Count(1),
                SiteState::Count(2)
            ]
        );
    }

    #[test]
    fn arithmetic_of_sleeping_mark() {
        assert_eq!(SiteState::Sleeping.mass(), 1);
        assert_eq!(SiteState::Sleeping.with_arrival(), SiteState::Count(2));
        assert_eq!(SiteState::Count(1).with_sleep_attempt(), SiteState::Sleeping);
        assert_eq!(SiteState::Count(3).with_sleep_attempt(), SiteState::Count(3));
        assert!(!SiteState::Sleeping.is_unstable());
        assert!(!SiteState::EMPTY.is_unstable());
        assert!(SiteState::Count(1).is_unstable());
    }

    #[test]
    fn json_encoding() {
        assert_eq!(serde_json::to_string(&SiteState::Sleeping).unwrap(), "\"s\"");
        assert_eq!(serde_json::to_string(&SiteState::Count(4)).unwrap(), "4");
        let s: SiteState = serde_json::from_str("\"s\"").unwrap();
        assert_eq!(s, SiteState::Sleeping);
        let c: SiteState = serde_json::from_str("7").unwrap();
        assert_eq!(c, SiteState::Count(7));
        assert!(serde_json::from_str::<SiteState>("\"x\"").is_err());
    }
}
