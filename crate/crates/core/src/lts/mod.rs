//! Finite pointed labelled transition systems and their ℕ-coded form.

mod bisim;
mod formula;

pub use bisim::{bisim_partition, d_bisim, greatest_bisim, is_bisimulation};
pub use formula::{
    build_phi, build_psi, eval_formula, sem_set, state_rank, state_ranks, wf_part, ModalFormula,
};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The single label used when a tree is read as a transition system.
pub const TREE_LABEL: &str = "*";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("duplicate state id {0:?}")]
    DuplicateState(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("root {0:?} is not a declared state")]
    UnknownRoot(String),
    #[error("edges[{index}] ({src:?}, {label:?}, {dst:?}): {reason}")]
    BadEdge { index: usize, src: String, label: String, dst: String, reason: String },
    #[error("no state named {0:?}")]
    UnknownState(String),
    #[error("reachable part has more than {0} states")]
    BoundExceeded(usize),
    #[error("numbering must assign distinct naturals to the {0} states")]
    BadNumbering(usize),
    #[error("CharSet formulas are only meaningful on symbolic A-trees")]
    CharSetOnLts,
    #[error("state {0:?} is not well-founded")]
    IllFounded(String),
}

/// A finite LTS with a distinguished root. States and labels are indexed by
/// position; names are kept for I/O.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedLts {
    labels: Vec<String>,
    states: Vec<String>,
    root: usize,
    edges: BTreeSet<(usize, usize, usize)>,
    succ: Vec<Vec<Vec<usize>>>,
}

impl PointedLts {
    /// Builds from names, validating every reference.
    pub fn new(
        labels: Vec<String>,
        states: Vec<String>,
        root: &str,
        edges: &[(String, String, String)],
    ) -> Result<Self, LtsError> {
        let state_ix = index_names(&states).map_err(LtsError::DuplicateState)?;
        let label_ix = index_names(&labels).map_err(LtsError::DuplicateLabel)?;
        let root = *state_ix.get(root).ok_or_else(|| LtsError::UnknownRoot(root.into()))?;
        let mut indexed = Vec::with_capacity(edges.len());
        for (index, (src, label, dst)) in edges.iter().enumerate() {
            let bad = |reason: String| LtsError::BadEdge {
                index,
                src: src.clone(),
                label: label.clone(),
                dst: dst.clone(),
                reason,
            };
            let s = *state_ix.get(src.as_str()).ok_or_else(|| bad(format!("source {src:?} is not declared")))?;
            let a = *label_ix.get(label.as_str()).ok_or_else(|| bad(format!("label {label:?} is not declared")))?;
            let t = *state_ix.get(dst.as_str()).ok_or_else(|| bad(format!("target {dst:?} is not declared")))?;
            indexed.push((s, a, t));
        }
        Ok(Self::build(labels, states, root, indexed))
    }

    /// Builds from indices with states named `s0, s1, …`.
    pub fn from_indexed(
        labels: Vec<String>,
        n_states: usize,
        root: usize,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Self {
        let states = (0..n_states).map(|i| format!("s{i}")).collect();
        Self::from_indexed_named(labels, states, root, edges)
    }

    pub fn from_indexed_named(
        labels: Vec<String>,
        states: Vec<String>,
        root: usize,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Self {
        let edges: Vec<_> = edges.into_iter().collect();
        assert!(root < states.len(), "root out of range");
        for &(s, a, t) in &edges {
            assert!(s < states.len() && t < states.len() && a < labels.len(), "edge out of range");
        }
        Self::build(labels, states, root, edges)
    }

    fn build(labels: Vec<String>, states: Vec<String>, root: usize, edges: Vec<(usize, usize, usize)>) -> Self {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        let mut succ = vec![vec![Vec::new(); labels.len()]; states.len()];
        for &(s, a, t) in &edges {
            succ[s][a].push(t);
        }
        Self { labels, states, root, edges, succ }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// The same system pointed at another state.
    pub fn with_root(&self, root: usize) -> Self {
        assert!(root < self.states.len(), "root out of range");
        Self { root, ..self.clone() }
    }

    /// `(source, label, target)` triples in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn state_index(&self, name: &str) -> Result<usize, LtsError> {
        self.states.iter().position(|s| s == name).ok_or_else(|| LtsError::UnknownState(name.into()))
    }

    /// Successors of `s` under label index `a`.
    pub fn successors(&self, s: usize, a: usize) -> &[usize] {
        &self.succ[s][a]
    }

    /// Successors of `s` under the named label; empty if the label is absent.
    pub fn successors_by_name(&self, s: usize, label: &str) -> &[usize] {
        match self.label_index(label) {
            Some(a) => &self.succ[s][a],
            None => &[],
        }
    }

    /// All successors of `s` regardless of label, deduplicated.
    pub fn all_successors(&self, s: usize) -> BTreeSet<usize> {
        self.succ[s].iter().flatten().copied().collect()
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.succ[s].iter().all(|v| v.is_empty())
    }

    /// States reachable from `s`, in breadth-first discovery order.
    pub fn reachable_from(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            i += 1;
            for a in 0..self.labels.len() {
                for &v in &self.succ[u][a] {
                    if !seen[v] {
                        seen[v] = true;
                        order.push(v);
                    }
                }
            }
        }
        order
    }
}

fn index_names(names: &[String]) -> Result<BTreeMap<&str, usize>, String> {
    let mut map = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.as_str(), i).is_some() {
            return Err(n.clone());
        }
    }
    Ok(map)
}

/// An element of the coded LTS space with finitely many edges per label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaLtsCode {
    pub root: u64,
    #[serde(default)]
    pub edges: BTreeMap<String, BTreeSet<(u64, u64)>>,
}

impl OmegaLtsCode {
    pub fn terminal(root: u64) -> Self {
        Self { root, edges: BTreeMap::new() }
    }
}

/// Reads the reachable part of a code as an LTS. States are named by their
/// numbers and listed in breadth-first order; the root comes first.
pub fn code_to_lts(code: &OmegaLtsCode, reachable_bound: usize) -> Result<PointedLts, LtsError> {
    let labels: Vec<String> = code.edges.keys().cloned().collect();
    let mut adjacency: BTreeMap<u64, Vec<(usize, u64)>> = BTreeMap::new();
    for (a, set) in code.edges.values().enumerate() {
        for &(u, v) in set {
            adjacency.entry(u).or_default().push((a, v));
        }
    }
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    let mut order = vec![code.root];
    index.insert(code.root, 0);
    let mut queue = VecDeque::from([code.root]);
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        for &(a, v) in adjacency.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            let next = index.len();
            let vi = *index.entry(v).or_insert_with(|| {
                order.push(v);
                queue.push_back(v);
                next
            });
            edges.push((index[&u], a, vi));
        }
        if order.len() > reachable_bound {
            return Err(LtsError::BoundExceeded(reachable_bound));
        }
    }
    let states = order.iter().map(u64::to_string).collect();
    Ok(PointedLts::build(labels, states, 0, edges))
}

/// Encodes an LTS as a code through an injective numbering of its states.
pub fn lts_to_code(lts: &PointedLts, numbering: &[u64]) -> Result<OmegaLtsCode, LtsError> {
    let distinct: BTreeSet<_> = numbering.iter().collect();
    if numbering.len() != lts.num_states() || distinct.len() != numbering.len() {
        return Err(LtsError::BadNumbering(lts.num_states()));
    }
    let mut edges: BTreeMap<String, BTreeSet<(u64, u64)>> =
        lts.labels.iter().map(|l| (l.clone(), BTreeSet::new())).collect();
    for (s, a, t) in lts.edges() {
        edges.get_mut(&lts.labels[a]).unwrap().insert((numbering[s], numbering[t]));
    }
    edges.retain(|_, set| !set.is_empty());
    Ok(OmegaLtsCode { root: numbering[lts.root], edges })
}
