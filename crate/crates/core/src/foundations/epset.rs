//! Eventually periodic subsets of ℕ.
//!
//! A set is stored as a finite prefix of membership bits followed by a
//! repeating period. Values are always canonical (shortest period, then
//! shortest prefix), so structural equality is extensional equality.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FoundationError, OrdinalCnf};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpSet {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

impl EpSet {
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self, FoundationError> {
        if period.is_empty() {
            return Err(FoundationError::EpSet("period must be non-empty".into()));
        }
        let mut set = Self { prefix, period };
        set.canonicalize();
        Ok(set)
    }

    /// Parses the `"0101"`-style bit strings used in the JSON form.
    pub fn from_bits(prefix: &str, period: &str) -> Result<Self, FoundationError> {
        Self::new(parse_bits(prefix)?, parse_bits(period)?)
    }

    pub fn empty() -> Self {
        Self { prefix: vec![], period: vec![false] }
    }

    pub fn all() -> Self {
        Self { prefix: vec![], period: vec![true] }
    }

    pub fn evens() -> Self {
        Self { prefix: vec![], period: vec![true, false] }
    }

    pub fn odds() -> Self {
        Self { prefix: vec![], period: vec![false, true] }
    }

    /// The finite set with exactly the given elements.
    pub fn from_elements<I: IntoIterator<Item = u64>>(elements: I) -> Self {
        let elements: BTreeSet<u64> = elements.into_iter().collect();
        let len = elements.last().map_or(0, |&m| m as usize + 1);
        let mut prefix = vec![false; len];
        for &e in &elements {
            prefix[e as usize] = true;
        }
        let mut set = Self { prefix, period: vec![false] };
        set.canonicalize();
        set
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn member(&self, n: u64) -> bool {
        let n = n as usize;
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.period[(n - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period == [false]
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.prefix.is_empty()
    }

    /// Largest element of a finite non-empty set.
    pub fn max_element(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.prefix.iter().rposition(|&b| b).map(|i| i as u64)
    }

    /// `sup{n+1 | n ∈ x}`: 0 for ∅, `max+1` when finite, ω otherwise.
    pub fn sup_succ(&self) -> OrdinalCnf {
        if !self.is_finite() {
            OrdinalCnf::omega()
        } else {
            self.max_element().map_or(OrdinalCnf::zero(), |m| OrdinalCnf::from_nat(m + 1))
        }
    }

    /// Whether some element is `≥ d`.
    pub fn has_element_at_least(&self, d: u64) -> bool {
        let end = (self.prefix.len() as u64).max(d) + self.period.len() as u64;
        (d..end).any(|n| self.member(n))
    }

    /// Least element `≥ d`, if any.
    pub fn first_element_at_least(&self, d: u64) -> Option<u64> {
        let end = (self.prefix.len() as u64).max(d) + self.period.len() as u64;
        (d..end).find(|&n| self.member(n))
    }

    /// Elements strictly below `bound`, ascending.
    pub fn elements_below(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        (0..bound).filter(move |&n| self.member(n))
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    /// `x △ mask` for a finite mask; the tail is untouched.
    pub fn xor_finite(&self, mask: &BTreeSet<u64>) -> Self {
        self.symmetric_difference(&Self::from_elements(mask.iter().copied()))
    }

    /// Eventual equality: compares the two sets on one common period past
    /// both prefixes.
    pub fn e0(&self, other: &Self) -> bool {
        let p = self.prefix.len().max(other.prefix.len()) as u64;
        let q = self.period.len().lcm(&other.period.len()) as u64;
        (p..p + q).all(|n| self.member(n) == other.member(n))
    }

    /// `{n+1 | n ∈ x}`.
    pub fn shift_up(&self) -> Self {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(false);
        prefix.extend_from_slice(&self.prefix);
        let mut set = Self { prefix, period: self.period.clone() };
        set.canonicalize();
        set
    }

    /// `x ∪ {n}`.
    pub fn with_element(&self, n: u64) -> Self {
        self.union(&Self::from_elements([n]))
    }

    fn zip_with(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let p = self.prefix.len().max(other.prefix.len());
        let q = self.period.len().lcm(&other.period.len());
        let bits: Vec<bool> =
            (0..p + q).map(|n| op(self.member(n as u64), other.member(n as u64))).collect();
        let mut set = Self { prefix: bits[..p].to_vec(), period: bits[p..].to_vec() };
        set.canonicalize();
        set
    }

    fn canonicalize(&mut self) {
        let q = self.period.len();
        let d = (1..=q)
            .find(|&d| q % d == 0 && (0..q).all(|i| self.period[i] == self.period[i % d]))
            .unwrap_or(q);
        self.period.truncate(d);
        while let Some(&last) = self.prefix.last() {
            if last != self.period[self.period.len() - 1] {
                break;
            }
            self.prefix.pop();
            self.period.rotate_right(1);
        }
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>, FoundationError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(FoundationError::EpSet(format!("invalid bit {other:?} in {s:?}"))),
        })
        .collect()
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for EpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", bits_to_string(&self.prefix), bits_to_string(&self.period))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EpSetRepr {
    prefix: String,
    period: String,
}

impl Serialize for EpSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        EpSetRepr { prefix: bits_to_string(&self.prefix), period: bits_to_string(&self.period) }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EpSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = EpSetRepr::deserialize(deserializer)?;
        EpSet::from_bits(&repr.prefix, &repr.period).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_equal(x: &EpSet, y: &EpSet, upto: u64) -> bool {
        (0..upto).all(|n| x.member(n) == y.member(n))
    }

    #[test]
    fn membership_and_finiteness() {
        assert!(EpSet::evens().member(4));
        assert!(!EpSet::evens().member(5));
        let s = EpSet::from_bits("101", "0").unwrap();
        assert!(s.is_finite());
        assert_eq!(s.max_element(), Some(2));
    }

    #[test]
    fn canonical_equality_matches_brute_force() {
        let a = EpSet::from_bits("10", "10").unwrap();
        let b = EpSet::from_bits("", "10").unwrap();
        // p + 2q for the longer representation
        assert!(brute_equal(&a, &b, 2 + 2 * 2));
        assert_eq!(a, b);
        let c = EpSet::from_bits("", "1010").unwrap();
        assert_eq!(c, EpSet::evens());
        assert_eq!(c.period().len(), 2);
    }

    #[test]
    fn sup_succ_examples() {
        assert_eq!(EpSet::empty().sup_succ(), OrdinalCnf::zero());
        assert_eq!(EpSet::from_elements([0, 2]).sup_succ(), OrdinalCnf::from_nat(3));
        assert_eq!(EpSet::evens().sup_succ(), OrdinalCnf::omega());
    }

    #[test]
    fn xor_finite_examples() {
        assert_eq!(EpSet::evens().xor_finite(&BTreeSet::new()), EpSet::evens());
        let m: BTreeSet<u64> = [1, 3].into();
        assert_eq!(EpSet::empty().xor_finite(&m), EpSet::from_elements([1, 3]));
        let z = EpSet::evens().xor_finite(&[0].into());
        let expected = [false, false, true, false, true, false];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(z.member(n as u64), e, "position {n}");
        }
    }

    #[test]
    fn e0_examples() {
        let x = EpSet::from_bits("0110", "100").unwrap();
        assert!(x.e0(&x));
        assert!(!EpSet::empty().e0(&EpSet::all()));
        let y = EpSet::evens().xor_finite(&[0].into());
        assert!(EpSet::evens().e0(&y));
    }

    #[test]
    fn json_round_trip_canonicalizes() {
        let s: EpSet = serde_json::from_str(r#"{"prefix":"0101","period":"01"}"#).unwrap();
        assert_eq!(s, EpSet::odds());
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"prefix":"","period":"01"}"#);
        assert!(serde_json::from_str::<EpSet>(r#"{"prefix":"","period":""}"#).is_err());
        assert!(serde_json::from_str::<EpSet>(r#"{"prefix":"2","period":"0"}"#).is_err());
    }

    #[test]
    fn element_queries() {
        assert!(EpSet::from_elements([7]).has_element_at_least(7));
        assert!(!EpSet::from_elements([7]).has_element_at_least(8));
        assert!(EpSet::evens().has_element_at_least(1001));
        assert_eq!(EpSet::from_elements([0, 3]).shift_up(), EpSet::from_elements([1, 4]));
    }
}
