use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FoundationError;

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// JSON form is the string `"3/4"`; a bare integer string such as `"1"` is
/// also accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self, FoundationError> {
        if denom == 0 {
            return Err(FoundationError::Rational(format!("zero denominator in {numer}/{denom}")));
        }
        Ok(Self(Ratio::new(numer, denom)))
    }

    pub fn zero() -> Self {
        Self(Ratio::from_integer(0))
    }

    pub fn one() -> Self {
        Self(Ratio::from_integer(1))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn is_positive(&self) -> bool {
        self.numer() > 0
    }

    /// Whether the value lies in `[0, 1]`.
    pub fn is_mass(&self) -> bool {
        *self >= Self::zero() && *self <= Self::one()
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.copied().sum()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = FoundationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FoundationError::Rational(format!("malformed rational {s:?}"));
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        Rational::new(n, d)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
