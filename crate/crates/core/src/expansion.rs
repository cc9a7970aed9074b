//! ω-expansions of pointed LTS into multiplicity trees, their depth
//! truncations, and the Ω map on codes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::foundations::Count;
use crate::lts::{code_to_lts, state_ranks, LtsError, OmegaLtsCode, PointedLts};
use crate::trees::{ExplicitTree, MultiTree};

/// One entry `(t, a, n)` of an ω-indexed path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathStep {
    pub state: u64,
    pub label: String,
    pub index: u64,
}

/// The expansion of a well-founded state. Each successor contributes its
/// subtree with multiplicity ω; equal subtrees merge.
pub fn omega_expand(lts: &PointedLts, s: usize) -> Result<MultiTree, LtsError> {
    if !state_ranks(lts)[s].is_finite() {
        return Err(LtsError::IllFounded(lts.states()[s].clone()));
    }
    let mut memo = BTreeMap::new();
    Ok(expand(lts, s, usize::MAX, &mut memo))
}

/// The expansion cut at path length `d`. Total on cyclic systems.
pub fn omega_expand_truncated(lts: &PointedLts, s: usize, d: usize) -> MultiTree {
    let mut memo = BTreeMap::new();
    expand(lts, s, d, &mut memo)
}

fn expand(lts: &PointedLts, s: usize, d: usize, memo: &mut BTreeMap<(usize, usize), MultiTree>) -> MultiTree {
    if d == 0 {
        return MultiTree::leaf();
    }
    if let Some(t) = memo.get(&(s, d)) {
        return t.clone();
    }
    // usize::MAX marks the untruncated expansion
    let next = if d == usize::MAX { d } else { d - 1 };
    let mut children = BTreeMap::new();
    for (a, label) in lts.labels().iter().enumerate() {
        let mut merged: BTreeMap<MultiTree, Count> = BTreeMap::new();
        for &t in lts.successors(s, a) {
            let sub = expand(lts, t, next, memo);
            merged.insert(sub, Count::Omega);
        }
        if !merged.is_empty() {
            children.insert(label.clone(), merged.into_iter().collect());
        }
    }
    let tree = MultiTree { children };
    memo.insert((s, d), tree.clone());
    tree
}

/// `Ω` up to the multiplicity quotient: the expansion of the coded system at
/// its root. `reachable_bound` caps the decoded state count.
pub fn omega_code_expand(code: &OmegaLtsCode, reachable_bound: usize) -> Result<MultiTree, LtsError> {
    let lts = code_to_lts(code, reachable_bound)?;
    omega_expand(&lts, lts.root())
}

/// The ω-indexed paths of length `≤ depth` from the root with every index
/// `< width`, as an explicit tree over `(state, label, index)` steps.
pub fn omega_code_tree(code: &OmegaLtsCode, depth: usize, width: u64) -> ExplicitTree<PathStep> {
    let mut nodes = std::collections::BTreeSet::new();
    let mut path = Vec::new();
    walk(code, code.root, depth, width, &mut path, &mut nodes);
    ExplicitTree::from_closed(nodes)
}

fn walk(
    code: &OmegaLtsCode,
    at: u64,
    depth: usize,
    width: u64,
    path: &mut Vec<PathStep>,
    out: &mut std::collections::BTreeSet<Vec<PathStep>>,
) {
    out.insert(path.clone());
    if depth == 0 {
        return;
    }
    for (label, edges) in &code.edges {
        for &(_, t) in edges.range((at, 0)..=(at, u64::MAX)) {
            for index in 0..width {
                path.push(PathStep { state: t, label: label.clone(), index });
                walk(code, t, depth - 1, width, path, out);
                path.pop();
            }
        }
    }
}
