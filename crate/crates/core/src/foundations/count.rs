use std::fmt;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A multiplicity in ℕ ∪ {ω}. Addition saturates at ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Count {
    Finite(u64),
    Omega,
}

impl Count {
    pub fn is_omega(self) -> bool {
        self == Count::Omega
    }

    /// The count capped at `k`, as a natural.
    pub fn min_nat(self, k: u64) -> u64 {
        match self {
            Count::Finite(n) => n.min(k),
            Count::Omega => k,
        }
    }
}

impl Add for Count {
    type Output = Count;

    fn add(self, rhs: Count) -> Count {
        match (self, rhs) {
            (Count::Finite(a), Count::Finite(b)) => {
                a.checked_add(b).map_or(Count::Omega, Count::Finite)
            }
            _ => Count::Omega,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Omega => write!(f, "w"),
        }
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => serializer.serialize_u64(*n),
            Count::Omega => serializer.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CountVisitor;

        impl Visitor<'_> for CountVisitor {
            type Value = Count;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a positive integer or \"omega\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Count, E> {
                if v == 0 {
                    Err(E::custom("multiplicity must be positive"))
                } else {
                    Ok(Count::Finite(v))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Count, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom("multiplicity must be positive"))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Count, E> {
                match v {
                    "omega" | "ω" | "w" => Ok(Count::Omega),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        deserializer.deserialize_any(CountVisitor)
    }
}
