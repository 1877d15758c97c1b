//! Agent identities and small agent sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// Largest agent universe the model supports. Sets are stored as bitmasks.
pub const MAX_AGENTS: usize = 16;

/// Symbolic agent identity (`A1`, `A2`, ...). The numeric index doubles as
/// the priority: lower index wins.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(u8);

impl AgentId {
    pub fn new(index: usize) -> Result<Self, ModelError> {
        if index == 0 || index > MAX_AGENTS {
            return Err(ModelError::InvalidAgent(format!("A{index}")));
        }
        Ok(AgentId(index as u8))
    }

    /// 1-based index parsed from the label.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> String {
        format!("A{}", self.0)
    }

    fn bit(self) -> u32 {
        1 << (self.0 - 1)
    }
}

impl fmt::Debug for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

impl FromStr for AgentId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix('A')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| ModelError::InvalidAgent(s.to_string()))?;
        let index: usize = digits.parse().map_err(|_| ModelError::InvalidAgent(s.to_string()))?;
        AgentId::new(index).map_err(|_| ModelError::InvalidAgent(s.to_string()))
    }
}

impl Serialize for AgentId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for AgentId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The agent with priority: the one with the smaller index.
pub fn priority(a: AgentId, b: AgentId) -> AgentId {
    if b.index() < a.index() {
        b
    } else {
        a
    }
}

/// A set of agents, iterated in ascending index order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentSet(u32);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    /// `{A1, ..., An}`.
    pub fn first_n(n: usize) -> Self {
        debug_assert!(n <= MAX_AGENTS);
        if n >= 32 {
            AgentSet(u32::MAX)
        } else {
            AgentSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(a: AgentId) -> Self {
        AgentSet(a.bit())
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, a: AgentId) -> bool {
        self.0 & a.bit() != 0
    }

    pub fn with(self, a: AgentId) -> Self {
        AgentSet(self.0 | a.bit())
    }

    pub fn without(self, a: AgentId) -> Self {
        AgentSet(self.0 & !a.bit())
    }

    pub fn union(self, other: AgentSet) -> Self {
        AgentSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AgentSet) -> Self {
        AgentSet(self.0 & other.0)
    }

    pub fn difference(self, other: AgentSet) -> Self {
        AgentSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: AgentSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: AgentSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest-index member.
    pub fn first(self) -> Option<AgentId> {
        if self.0 == 0 {
            None
        } else {
            Some(AgentId(self.0.trailing_zeros() as u8 + 1))
        }
    }

    pub fn iter(self) -> impl Iterator<Item = AgentId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let tz = bits.trailing_zeros();
            bits &= bits - 1;
            Some(AgentId(tz as u8 + 1))
        })
    }

    /// All nonempty subsets with at most `max_len` members, in ascending
    /// bitmask order.
    pub fn subsets_up_to(self, max_len: usize) -> Vec<AgentSet> {
        let mut out = Vec::new();
        // Standard submask enumeration, collected then sorted.
        let mut sub = self.0;
        while sub != 0 {
            if (sub.count_ones() as usize) <= max_len {
                out.push(AgentSet(sub));
            }
            sub = (sub - 1) & self.0;
        }
        out.sort();
        out
    }
}

impl FromIterator<AgentId> for AgentSet {
    fn from_iter<I: IntoIterator<Item = AgentId>>(iter: I) -> Self {
        iter.into_iter().fold(AgentSet::EMPTY, AgentSet::with)
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for AgentSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for AgentSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ids = Vec::<AgentId>::deserialize(deserializer)?;
        Ok(ids.into_iter().collect())
    }
}

#[macro_export]
/// Builds an [`AgentSet`] from 1-based indices: `agents![1, 2]`.
macro_rules! agents {
    ($($i:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut set = $crate::protocol::AgentSet::EMPTY;
        $( set = set.with($crate::protocol::AgentId::new($i).unwrap()); )*
        set
    }};
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(i: usize) -> AgentId {
        AgentId::new(i).unwrap()
    }

    #[test]
    fn priority_examples() {
        assert_eq!(priority(a(1), a(2)), a(1));
        assert_eq!(priority(a(2), a(2)), a(2));
        assert_eq!(priority(a(3), a(2)), a(2));
    }

    #[test]
    fn parse_and_render() {
        assert_eq!("A12".parse::<AgentId>().unwrap().index(), 12);
        assert!("A0".parse::<AgentId>().is_err());
        assert!("B1".parse::<AgentId>().is_err());
        assert!("A".parse::<AgentId>().is_err());
        assert!("A17".parse::<AgentId>().is_err());
        assert_eq!(a(3).name(), "A3");
        assert_eq!(format!("{:?}", agents![3, 1]), "{A1,A3}");
    }

    #[test]
    fn subsets_enumerate_in_order() {
        let s = agents![1, 2, 3];
        assert_eq!(s.subsets_up_to(1), vec![agents![1], agents![2], agents![3]]);
        assert_eq!(s.subsets_up_to(3).len(), 7);
        assert_eq!(AgentSet::EMPTY.subsets_up_to(3), vec![]);
    }

    fn id() -> impl Strategy<Value = AgentId> {
        (1..=MAX_AGENTS).prop_map(a)
    }

    proptest! {
        #[test]
        fn priority_is_a_minimum(x in id(), y in id(), z in id()) {
            prop_assert_eq!(priority(x, x), x);
            prop_assert_eq!(priority(x, y), priority(y, x));
            prop_assert_eq!(priority(priority(x, y), z), priority(x, priority(y, z)));
            if x != y {
                prop_assert!((priority(x, y) == x) != (priority(x, y) == y));
            }
        }

        #[test]
        fn set_iteration_is_sorted(bits in 0u32..(1 << MAX_AGENTS)) {
            let s = AgentSet(bits);
            let v: Vec<_> = s.iter().collect();
            prop_assert_eq!(v.len(), s.len());
            prop_assert!(v.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(v.into_iter().collect::<AgentSet>(), s);
        }
    }
}
