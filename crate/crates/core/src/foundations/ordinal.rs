//! Ordinals below ω^ω in Cantor normal form, plus the `Rank` type that
//! extends them with ∞ for ill-founded states.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FoundationError;

/// An ordinal `ω^e1·c1 + ω^e2·c2 + …` with `e1 > e2 > …` and every `ci ≥ 1`.
///
/// The empty term list is `0`. JSON form: `[[1,1],[0,2]]` for `ω+2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OrdinalCnf {
    terms: Vec<(u32, u64)>,
}

impl OrdinalCnf {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Self { terms: vec![(0, n)] }
        }
    }

    pub fn omega() -> Self {
        Self { terms: vec![(1, 1)] }
    }

    /// `ω + n`.
    pub fn omega_plus(n: u64) -> Self {
        Self::omega().add_nat(n)
    }

    /// Builds an ordinal from `(exponent, coefficient)` terms, rejecting
    /// non-decreasing exponents and zero coefficients.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<Self, FoundationError> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(FoundationError::Ordinal(format!(
                    "exponents must be strictly decreasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(e, _)) = terms.iter().find(|t| t.1 == 0) {
            return Err(FoundationError::Ordinal(format!(
                "coefficient of ω^{e} must be positive"
            )));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|&(e, _)| e == 0)
    }

    /// The natural number this ordinal denotes, if it is finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    /// `self + n` for a natural `n`; only touches the finite tail.
    pub fn add_nat(&self, n: u64) -> Self {
        if n == 0 {
            return self.clone();
        }
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, c)) => *c += n,
            _ => terms.push((0, n)),
        }
        Self { terms }
    }

    pub fn succ(&self) -> Self {
        self.add_nat(1)
    }

    /// Least upper bound; `sup ∅ = 0`.
    pub fn sup<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a OrdinalCnf>,
    {
        items.into_iter().max().cloned().unwrap_or_default()
    }
}

impl Ord for OrdinalCnf {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            match a.0.cmp(&b.0).then(a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for OrdinalCnf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for OrdinalCnf {
    fn from(n: u64) -> Self {
        Self::from_nat(n)
    }
}

impl fmt::Display for OrdinalCnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "ω")?,
                (1, c) => write!(f, "ω·{c}")?,
                (e, 1) => write!(f, "ω^{e}")?,
                (e, c) => write!(f, "ω^{e}·{c}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for OrdinalCnf {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrdinalCnf {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<(u32, u64)>::deserialize(deserializer)?;
        Self::from_terms(terms).map_err(serde::de::Error::custom)
    }
}

/// Rank of a pointed process: an ordinal, or ∞ when an infinite path exists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rank {
    Ordinal(OrdinalCnf),
    Infinite,
}

impl Rank {
    pub fn nat(n: u64) -> Self {
        Rank::Ordinal(OrdinalCnf::from_nat(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Rank::Ordinal(_))
    }

    pub fn ordinal(&self) -> Option<&OrdinalCnf> {
        match self {
            Rank::Ordinal(o) => Some(o),
            Rank::Infinite => None,
        }
    }

    /// `rank ≥ α`, with ∞ above every ordinal.
    pub fn at_least(&self, alpha: &OrdinalCnf) -> bool {
        match self {
            Rank::Ordinal(o) => o >= alpha,
            Rank::Infinite => true,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Ordinal(o) => o.fmt(f),
            Rank::Infinite => write!(f, "∞"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Rank::Ordinal(o) => o.serialize(serializer),
            Rank::Infinite => serializer.serialize_str("infinite"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> OrdinalCnf {
        OrdinalCnf::omega()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(w().cmp(&w()), Ordering::Equal);
        assert_eq!(w().cmp(&OrdinalCnf::from_nat(5)), Ordering::Greater);
        let omega_times_two = OrdinalCnf::from_terms(vec![(1, 2)]).unwrap();
        assert_eq!(OrdinalCnf::omega_plus(2).cmp(&omega_times_two), Ordering::Less);
        let omega_sq = OrdinalCnf::from_terms(vec![(2, 1)]).unwrap();
        assert!(omega_sq > OrdinalCnf::from_terms(vec![(1, 1000), (0, 7)]).unwrap());
    }

    #[test]
    fn sup_examples() {
        assert_eq!(OrdinalCnf::sup([]), OrdinalCnf::zero());
        let items: Vec<_> = [1u64, 3, 2].into_iter().map(OrdinalCnf::from).collect();
        assert_eq!(OrdinalCnf::sup(&items), OrdinalCnf::from_nat(3));
        let items = [w(), w().succ()];
        assert_eq!(OrdinalCnf::sup(&items), OrdinalCnf::omega_plus(1));
    }

    #[test]
    fn rejects_malformed_terms() {
        assert!(OrdinalCnf::from_terms(vec![(0, 1), (1, 1)]).is_err());
        assert!(OrdinalCnf::from_terms(vec![(1, 1), (1, 1)]).is_err());
        assert!(OrdinalCnf::from_terms(vec![(1, 0)]).is_err());
    }

    #[test]
    fn json_form() {
        let o = OrdinalCnf::omega_plus(2);
        assert_eq!(serde_json::to_string(&o).unwrap(), "[[1,1],[0,2]]");
        let back: OrdinalCnf = serde_json::from_str("[[1,1],[0,2]]").unwrap();
        assert_eq!(back, o);
        assert!(serde_json::from_str::<OrdinalCnf>("[[0,1],[1,1]]").is_err());
        assert_eq!(o.to_string(), "ω+2");
    }

    #[test]
    fn rank_order() {
        assert!(Rank::Infinite > Rank::nat(1_000_000));
        assert!(Rank::Infinite.at_least(&w()));
        assert!(!Rank::nat(3).at_least(&w()));
    }
}
