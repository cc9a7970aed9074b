//! Exact arithmetic substrate: ordinals below ω^ω, eventually periodic
//! subsets of ℕ, saturating counts and rationals.

mod count;
mod epset;
mod ordinal;
mod rational;

pub use count::Count;
pub use epset::EpSet;
pub use ordinal::{OrdinalCnf, Rank};
pub use rational::Rational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoundationError {
    #[error("invalid ordinal: {0}")]
    Ordinal(String),
    #[error("invalid eventually periodic set: {0}")]
    EpSet(String),
    #[error("invalid rational: {0}")]
    Rational(String),
}
