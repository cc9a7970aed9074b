//! Trees in three representations: explicit finite node sets, finite trees
//! with child multiplicities in ℕ∪{ω}, and a small symbolic catalog of
//! infinitely branching trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::e0::mod_n;
use crate::foundations::{Count, EpSet, OrdinalCnf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node {0} is present but its parent is not")]
    NotPrefixClosed(String),
    #[error("tail of the empty sequence")]
    TailOfEmpty,
}

/// Rank data shared by every tree representation.
pub trait Ranked {
    /// `ρ_T(∅)`; 0 for the empty tree.
    fn root_rank(&self) -> OrdinalCnf;

    /// `ρ(T) = ρ_T(∅)+1`, or 0 for the empty tree.
    fn tree_rank(&self) -> OrdinalCnf;
}

/// A finite prefix-closed set of sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(
    serialize = "E: Ord + Clone + Serialize",
    deserialize = "E: Ord + Clone + fmt::Debug + Deserialize<'de>"
))]
#[serde(try_from = "ExplicitRepr<E>", into = "ExplicitRepr<E>")]
pub struct ExplicitTree<E: Ord = u64> {
    nodes: BTreeSet<Vec<E>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitRepr<E: Ord> {
    nodes: Vec<Vec<E>>,
}

impl<E: Ord + Clone + fmt::Debug> TryFrom<ExplicitRepr<E>> for ExplicitTree<E> {
    type Error = TreeError;
    fn try_from(r: ExplicitRepr<E>) -> Result<Self, TreeError> {
        ExplicitTree::new(r.nodes)
    }
}

impl<E: Ord + Clone> From<ExplicitTree<E>> for ExplicitRepr<E> {
    fn from(t: ExplicitTree<E>) -> Self {
        ExplicitRepr { nodes: t.nodes.into_iter().collect() }
    }
}

impl<E: Ord + Clone + fmt::Debug> ExplicitTree<E> {
    pub fn new<I: IntoIterator<Item = Vec<E>>>(nodes: I) -> Result<Self, TreeError> {
        let nodes: BTreeSet<Vec<E>> = nodes.into_iter().collect();
        for u in &nodes {
            if let Some((_, parent)) = u.split_last() {
                if !nodes.contains(parent) {
                    return Err(TreeError::NotPrefixClosed(format!("{u:?}")));
                }
            }
        }
        Ok(Self { nodes })
    }

    /// Builds from nodes already known to be prefix-closed.
    pub(crate) fn from_closed(nodes: BTreeSet<Vec<E>>) -> Self {
        debug_assert!(nodes.iter().all(|u| u.is_empty() || nodes.contains(&u[..u.len() - 1])));
        Self { nodes }
    }

    pub fn empty() -> Self {
        Self { nodes: BTreeSet::new() }
    }

    pub fn singleton() -> Self {
        Self { nodes: [Vec::new()].into() }
    }

    pub fn nodes(&self) -> &BTreeSet<Vec<E>> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, u: &[E]) -> bool {
        self.nodes.contains(u)
    }

    /// Last entries of the immediate extensions of `u`, in order.
    pub fn children(&self, u: &[E]) -> Vec<E> {
        self.nodes
            .range(u.to_vec()..)
            .take_while(|v| v.starts_with(u))
            .filter(|v| v.len() == u.len() + 1)
            .map(|v| v[u.len()].clone())
            .collect()
    }

    /// `ρ_T(u) = sup{ρ_T(u⌢e)+1}`, and 0 when `u ∉ T`.
    pub fn node_rank(&self, u: &[E]) -> u64 {
        if !self.contains(u) {
            return 0;
        }
        let mut v = u.to_vec();
        self.rank_below(&mut v)
    }

    fn rank_below(&self, v: &mut Vec<E>) -> u64 {
        let mut best = 0;
        for e in self.children(v) {
            v.push(e);
            best = best.max(self.rank_below(v) + 1);
            v.pop();
        }
        best
    }

    /// `T_s = {t | s⌢t ∈ T}`.
    pub fn section(&self, s: &[E]) -> Self {
        Self {
            nodes: self
                .nodes
                .range(s.to_vec()..)
                .take_while(|v| v.starts_with(s))
                .map(|v| v[s.len()..].to_vec())
                .collect(),
        }
    }

    /// Leaves in sorted order.
    pub fn leaves(&self) -> Vec<Vec<E>> {
        self.nodes.iter().filter(|u| self.children(u).is_empty()).cloned().collect()
    }
}

/// Drops the first entry of a non-empty sequence.
pub fn tail<E: Clone>(u: &[E]) -> Result<Vec<E>, TreeError> {
    match u.split_first() {
        Some((_, rest)) => Ok(rest.to_vec()),
        None => Err(TreeError::TailOfEmpty),
    }
}

impl<E: Ord + Clone + fmt::Debug> Ranked for ExplicitTree<E> {
    fn root_rank(&self) -> OrdinalCnf {
        OrdinalCnf::from_nat(self.node_rank(&[]))
    }

    fn tree_rank(&self) -> OrdinalCnf {
        if self.is_empty() {
            OrdinalCnf::zero()
        } else {
            self.root_rank().succ()
        }
    }
}

/// A finite tree whose children are grouped by label and carry a
/// multiplicity in ℕ∪{ω}. JSON: `{"a":[[subtree,"omega"],[subtree,3]]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiTree {
    pub children: BTreeMap<String, Vec<(MultiTree, Count)>>,
}

impl MultiTree {
    pub fn leaf() -> Self {
        Self::default()
    }

    pub fn with_child(mut self, label: &str, child: MultiTree, count: Count) -> Self {
        self.children.entry(label.to_string()).or_default().push((child, count));
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.values().all(Vec::is_empty)
    }

    pub fn root_rank_nat(&self) -> u64 {
        self.children
            .values()
            .flatten()
            .map(|(c, _)| c.root_rank_nat() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Number of distinct child entries, counted recursively with the root.
    pub fn entry_count(&self) -> usize {
        1 + self.children.values().flatten().map(|(c, _)| c.entry_count()).sum::<usize>()
    }

    /// Reads an explicit tree as a single-label tree, one child per node.
    pub fn from_explicit<E: Ord + Clone + fmt::Debug>(t: &ExplicitTree<E>, label: &str) -> Self {
        fn go<E: Ord + Clone + fmt::Debug>(t: &ExplicitTree<E>, u: &mut Vec<E>, label: &str) -> MultiTree {
            let mut out = MultiTree::leaf();
            for e in t.children(u) {
                u.push(e);
                let child = go(t, u, label);
                u.pop();
                out = out.with_child(label, child, Count::Finite(1));
            }
            out
        }
        go(t, &mut Vec::new(), label)
    }

    /// Sorts children, merges equal entries with saturating counts and drops
    /// empty label groups, recursively. Two trees are isomorphic iff their
    /// normal forms are equal.
    pub fn normalized(&self) -> Self {
        let mut children = BTreeMap::new();
        for (label, entries) in &self.children {
            let mut merged: BTreeMap<MultiTree, Count> = BTreeMap::new();
            for (c, n) in entries {
                let key = c.normalized();
                let slot = merged.entry(key).or_insert(Count::Finite(0));
                *slot = *slot + *n;
            }
            merged.retain(|_, n| *n != Count::Finite(0));
            if !merged.is_empty() {
                children.insert(label.clone(), merged.into_iter().collect());
            }
        }
        Self { children }
    }
}

impl Ranked for MultiTree {
    fn root_rank(&self) -> OrdinalCnf {
        OrdinalCnf::from_nat(self.root_rank_nat())
    }

    fn tree_rank(&self) -> OrdinalCnf {
        self.root_rank().succ()
    }
}

/// Finitely described single-label trees, possibly infinitely branching.
///
/// * `Chain { k }`: a path with `k` nodes below the root.
/// * `A { set }`: for each `k ∈ set` a branch `(k), (k,0), …, (k,0^k)`.
/// * `B { set }`: child `n` of the root carries `A(m_n(set))`.
/// * `Glue { children }`: a new root over the listed trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SymbolicTree {
    #[serde(rename = "chain")]
    Chain { k: u64 },
    #[serde(rename = "A")]
    A { set: EpSet },
    #[serde(rename = "B")]
    B { set: EpSet },
    #[serde(rename = "glue")]
    Glue { children: Vec<SymbolicTree> },
}

/// `(ρ_t(∅), ρ(t))` in closed form.
pub fn sym_rank(t: &SymbolicTree) -> (OrdinalCnf, OrdinalCnf) {
    let root = sym_root_rank(t);
    let tree = root.succ();
    (root, tree)
}

fn sym_root_rank(t: &SymbolicTree) -> OrdinalCnf {
    match t {
        SymbolicTree::Chain { k } => OrdinalCnf::from_nat(*k),
        SymbolicTree::A { set } => set.sup_succ(),
        SymbolicTree::B { set } => {
            if set.is_finite() {
                OrdinalCnf::omega()
            } else {
                OrdinalCnf::omega_plus(1)
            }
        }
        SymbolicTree::Glue { children } => {
            let ranks: Vec<_> = children.iter().map(|c| sym_root_rank(c).succ()).collect();
            OrdinalCnf::sup(&ranks)
        }
    }
}

impl Ranked for SymbolicTree {
    fn root_rank(&self) -> OrdinalCnf {
        sym_root_rank(self)
    }

    fn tree_rank(&self) -> OrdinalCnf {
        sym_rank(self).1
    }
}

/// The nodes of the denotation of `t` of length `≤ depth` whose every entry
/// is `< width`.
pub fn sym_truncate(t: &SymbolicTree, depth: usize, width: u64) -> ExplicitTree<u64> {
    let mut nodes = BTreeSet::new();
    truncate_into(t, &mut Vec::new(), depth, width, &mut nodes);
    ExplicitTree::from_closed(nodes)
}

fn truncate_into(t: &SymbolicTree, prefix: &mut Vec<u64>, depth: usize, width: u64, out: &mut BTreeSet<Vec<u64>>) {
    out.insert(prefix.clone());
    if depth == 0 {
        return;
    }
    let visit = |i: u64, child: &SymbolicTree, prefix: &mut Vec<u64>, out: &mut BTreeSet<Vec<u64>>| {
        prefix.push(i);
        truncate_into(child, prefix, depth - 1, width, out);
        prefix.pop();
    };
    match t {
        SymbolicTree::Chain { k } => {
            if *k > 0 && width > 0 {
                visit(0, &SymbolicTree::Chain { k: k - 1 }, prefix, out);
            }
        }
        SymbolicTree::A { set } => {
            for k in set.elements_below(width) {
                visit(k, &SymbolicTree::Chain { k }, prefix, out);
            }
        }
        SymbolicTree::B { set } => {
            for n in 0..width {
                visit(n, &SymbolicTree::A { set: mod_n(set, n) }, prefix, out);
            }
        }
        SymbolicTree::Glue { children } => {
            for (i, c) in children.iter().enumerate().take(width as usize) {
                visit(i as u64, c, prefix, out);
            }
        }
    }
}

/// `(T,∅) ⊨ ψ_α`, read as `ρ_T(∅) ≥ α`.
pub fn psi_sat<T: Ranked + ?Sized>(t: &T, alpha: &OrdinalCnf) -> bool {
    t.root_rank() >= *alpha
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl std::str::FromStr for Cmp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "<" | "lt" => Cmp::Lt,
            "<=" | "le" => Cmp::Le,
            "=" | "eq" => Cmp::Eq,
            ">=" | "ge" => Cmp::Ge,
            ">" | "gt" => Cmp::Gt,
            other => return Err(format!("unknown comparison {other:?}")),
        })
    }
}

/// Membership in `WF^{⋈α}`: compares the tree rank against `α`.
pub fn wf_class<T: Ranked + ?Sized>(t: &T, alpha: &OrdinalCnf, cmp: Cmp) -> bool {
    let r = t.tree_rank();
    match cmp {
        Cmp::Lt => r < *alpha,
        Cmp::Le => r <= *alpha,
        Cmp::Eq => r == *alpha,
        Cmp::Ge => r >= *alpha,
        Cmp::Gt => r > *alpha,
    }
}
