//! Finite binary relations between two indexed state spaces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("pair ({0}, {1}) lies outside a {2}x{3} relation")]
    OutOfBounds(usize, usize, usize, usize),
}

/// A relation `R ⊆ S × S'` with `S = 0..left`, `S' = 0..right`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rel {
    left: usize,
    right: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl Rel {
    pub fn empty(left: usize, right: usize) -> Self {
        Self { left, right, pairs: BTreeSet::new() }
    }

    pub fn total(left: usize, right: usize) -> Self {
        let pairs = (0..left).flat_map(|x| (0..right).map(move |y| (x, y))).collect();
        Self { left, right, pairs }
    }

    pub fn identity(n: usize) -> Self {
        Self { left: n, right: n, pairs: (0..n).map(|x| (x, x)).collect() }
    }

    pub fn from_pairs<I>(left: usize, right: usize, pairs: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rel = Self::empty(left, right);
        for (x, y) in pairs {
            if x >= left || y >= right {
                return Err(RelError::OutOfBounds(x, y, left, right));
            }
            rel.pairs.insert((x, y));
        }
        Ok(rel)
    }

    /// Identity on the listed points of an `n`-element space.
    pub fn diagonal_on(n: usize, points: &BTreeSet<usize>) -> Self {
        Self { left: n, right: n, pairs: points.iter().map(|&x| (x, x)).collect() }
    }

    pub fn left_size(&self) -> usize {
        self.left
    }

    pub fn right_size(&self) -> usize {
        self.right
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.contains(&(x, y))
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        assert!(x < self.left && y < self.right, "pair outside relation bounds");
        self.pairs.insert((x, y));
    }

    pub fn remove(&mut self, x: usize, y: usize) -> bool {
        self.pairs.remove(&(x, y))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    /// `R[x]`.
    pub fn image(&self, x: usize) -> BTreeSet<usize> {
        self.pairs.range((x, 0)..=(x, usize::MAX)).map(|&(_, y)| y).collect()
    }

    /// `R^{-1}[y]`.
    pub fn preimage(&self, y: usize) -> BTreeSet<usize> {
        self.pairs.iter().filter(|p| p.1 == y).map(|p| p.0).collect()
    }

    pub fn image_of_set(&self, xs: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.pairs.iter().filter(|p| xs.contains(&p.0)).map(|p| p.1).collect()
    }

    pub fn preimage_of_set(&self, ys: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.pairs.iter().filter(|p| ys.contains(&p.1)).map(|p| p.0).collect()
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn range(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn inverse(&self) -> Self {
        Self {
            left: self.right,
            right: self.left,
            pairs: self.pairs.iter().map(|&(x, y)| (y, x)).collect(),
        }
    }

    /// Union of two relations over the same spaces.
    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!((self.left, self.right), (other.left, other.right));
        Self {
            left: self.left,
            right: self.right,
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(x, y)| self.contains(y, x))
    }

    pub fn is_reflexive(&self) -> bool {
        self.left == self.right && (0..self.left).all(|x| self.contains(x, x))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs
            .iter()
            .all(|&(x, y)| self.image(y).into_iter().all(|z| self.contains(x, z)))
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// Difunctionality: `x R y`, `x' R y`, `x' R y'` imply `x R y'`.
    pub fn is_z_closed(&self) -> bool {
        self.pairs.iter().all(|&(x, y)| {
            self.preimage(y)
                .into_iter()
                .all(|x2| self.image(x2).into_iter().all(|y2| self.contains(x, y2)))
        })
    }

    /// `R ∩ (A × A')`.
    pub fn restrict(&self, a: &BTreeSet<usize>, a_prime: &BTreeSet<usize>) -> Self {
        Self {
            left: self.left,
            right: self.right,
            pairs: self
                .pairs
                .iter()
                .filter(|(x, y)| a.contains(x) && a_prime.contains(y))
                .copied()
                .collect(),
        }
    }

    /// Relabels both sides through the given maps into spaces of the given sizes.
    pub fn map(&self, left: usize, right: usize, f: impl Fn(usize) -> usize, g: impl Fn(usize) -> usize) -> Self {
        Self { left, right, pairs: self.pairs.iter().map(|&(x, y)| (f(x), g(y))).collect() }
    }
}
