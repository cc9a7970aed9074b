//! The reduction of eventual equality to bisimilarity of B-trees: finite
//! modifications, the gadget trees, a symbolic modal evaluator for the tree
//! catalog, and the B-tree bisimilarity decision.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::foundations::{EpSet, OrdinalCnf};
use crate::lts::{ModalFormula, TREE_LABEL};
use crate::trees::{sym_rank, SymbolicTree};

/// Largest pattern width the evaluator enumerates under `◇` at a B-node.
pub const MAX_PATTERN_BITS: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum E0Error {
    #[error("sets are not eventually equal")]
    NotE0,
    #[error("symmetric difference reaches position {0}; masks are limited to 64 bits")]
    MaskTooWide(u64),
    #[error("formula needs {0} pattern bits below a B-node; the limit is {MAX_PATTERN_BITS}")]
    Unsupported(u64),
}

/// The positions of the set bits of `n`.
pub fn mask_of(n: u64) -> BTreeSet<u64> {
    (0..64).filter(|i| n >> i & 1 == 1).collect()
}

/// `m_n(x) = x △ {i | bit i of n is 1}`; `m_0` is the identity.
pub fn mod_n(x: &EpSet, n: u64) -> EpSet {
    x.xor_finite(&mask_of(n))
}

pub fn build_a(x: &EpSet) -> SymbolicTree {
    SymbolicTree::A { set: x.clone() }
}

pub fn build_b(x: &EpSet) -> SymbolicTree {
    SymbolicTree::B { set: x.clone() }
}

/// `{n | node ⊨ ◇^{n+1}¬◇⊤}`: the lengths minus one of paths to a leaf.
pub fn leaf_depths(t: &SymbolicTree) -> EpSet {
    match t {
        SymbolicTree::Chain { k: 0 } => EpSet::empty(),
        SymbolicTree::Chain { k } => EpSet::from_elements([k - 1]),
        SymbolicTree::A { set } => set.clone(),
        SymbolicTree::B { set } => {
            // children A(m_n(set)) range over the whole E₀-class; their
            // leaf depths cover ℕ, and some child is a leaf iff set is finite
            let shifted = EpSet::all().shift_up();
            if set.is_finite() {
                shifted.with_element(0)
            } else {
                shifted
            }
        }
        SymbolicTree::Glue { children } => {
            let mut acc = EpSet::empty();
            for c in children {
                if is_leaf(c) {
                    acc = acc.with_element(0);
                }
                acc = acc.union(&leaf_depths(c).shift_up());
            }
            acc
        }
    }
}

fn is_leaf(t: &SymbolicTree) -> bool {
    match t {
        SymbolicTree::Chain { k } => *k == 0,
        SymbolicTree::A { set } => set.is_empty(),
        SymbolicTree::B { .. } => false,
        SymbolicTree::Glue { children } => children.is_empty(),
    }
}

/// A bound `D` with: `Chain(k) ⊨ φ ⟺ Chain(k') ⊨ φ` for all `k, k' ≥ D`.
fn chain_stab(phi: &ModalFormula) -> u64 {
    match phi {
        ModalFormula::Top => 0,
        ModalFormula::Neg(p) => chain_stab(p),
        ModalFormula::And(ps) | ModalFormula::Or(ps) => ps.iter().map(chain_stab).max().unwrap_or(0),
        ModalFormula::Dia { label, body } if label == TREE_LABEL => chain_stab(body) + 1,
        ModalFormula::Dia { .. } => 0,
        ModalFormula::RankAtLeast(alpha) => alpha.as_nat().unwrap_or(0),
        ModalFormula::CharSet(z) => {
            if z.is_empty() {
                1
            } else if z.is_finite() && z.elements_below(z.max_element().unwrap() + 1).count() == 1 {
                z.max_element().unwrap() + 2
            } else {
                0
            }
        }
    }
}

/// Like `chain_stab`, for evaluation at an A-node, with top-level `CharSet`
/// conjuncts excluded (they are decided by pinning).
fn a_stab(phi: &ModalFormula) -> u64 {
    match phi {
        ModalFormula::Neg(p) => a_stab(p),
        ModalFormula::And(ps) | ModalFormula::Or(ps) => ps.iter().map(a_stab).max().unwrap_or(0),
        ModalFormula::CharSet(_) => 0,
        other => chain_stab(other),
    }
}

fn top_level_charsets<'a>(phi: &'a ModalFormula, out: &mut Vec<&'a EpSet>) {
    match phi {
        ModalFormula::Neg(p) => top_level_charsets(p, out),
        ModalFormula::And(ps) | ModalFormula::Or(ps) => ps.iter().for_each(|p| top_level_charsets(p, out)),
        ModalFormula::CharSet(z) => out.push(z),
        _ => {}
    }
}

/// Satisfaction of a modal formula at the root of a symbolic tree. Only the
/// tree label has edges. Infinite branching is discharged by stabilization:
/// long chains are interchangeable, and below a B-node the children are
/// grouped by their pattern on `[0, D)`.
pub fn eval_symbolic(t: &SymbolicTree, phi: &ModalFormula) -> Result<bool, E0Error> {
    Ok(match phi {
        ModalFormula::Top => true,
        ModalFormula::Neg(p) => !eval_symbolic(t, p)?,
        ModalFormula::And(ps) => {
            for p in ps {
                if !eval_symbolic(t, p)? {
                    return Ok(false);
                }
            }
            true
        }
        ModalFormula::Or(ps) => {
            for p in ps {
                if eval_symbolic(t, p)? {
                    return Ok(true);
                }
            }
            false
        }
        ModalFormula::RankAtLeast(alpha) => sym_rank(t).0 >= *alpha,
        ModalFormula::CharSet(z) => leaf_depths(t) == *z,
        ModalFormula::Dia { label, .. } if label != TREE_LABEL => false,
        ModalFormula::Dia { body, .. } => eval_diamond(t, body)?,
    })
}

fn eval_diamond(t: &SymbolicTree, body: &ModalFormula) -> Result<bool, E0Error> {
    match t {
        SymbolicTree::Chain { k: 0 } => Ok(false),
        SymbolicTree::Chain { k } => eval_symbolic(&SymbolicTree::Chain { k: k - 1 }, body),
        SymbolicTree::Glue { children } => {
            for c in children {
                if eval_symbolic(c, body)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        SymbolicTree::A { set } => {
            let d = chain_stab(body);
            let ks = set.elements_below(d).chain(set.first_element_at_least(d));
            for k in ks {
                if eval_symbolic(&SymbolicTree::Chain { k }, body)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        SymbolicTree::B { set } => {
            for z in b_child_candidates(set, body)? {
                if eval_symbolic(&SymbolicTree::A { set: z }, body)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Representatives of the children `A(z)`, `z E₀ y`, of `B(y)` that are
/// exhaustive for `body`: one per pattern on `[0, D)` and tail flag, kept
/// away from the pinned `CharSet` parameters, plus those parameters
/// themselves when they lie in the class.
fn b_child_candidates(y: &EpSet, body: &ModalFormula) -> Result<Vec<EpSet>, E0Error> {
    let d = a_stab(body);
    if d > MAX_PATTERN_BITS {
        return Err(E0Error::Unsupported(d));
    }
    let mut pinned = Vec::new();
    top_level_charsets(body, &mut pinned);
    let mut out: Vec<EpSet> = pinned.iter().filter(|w| w.e0(y)).map(|w| (*w).clone()).collect();
    let below: BTreeSet<u64> = y.elements_below(d).collect();
    let tail = y.xor_finite(&below);
    let avoid = |candidates: &mut dyn Iterator<Item = EpSet>| {
        for z in candidates {
            if !pinned.contains(&&z) {
                return z;
            }
        }
        unreachable!("more candidates than pinned sets")
    };
    for pattern in 0u64..(1 << d) {
        let p = mask_of(pattern);
        if y.is_finite() {
            out.push(EpSet::from_elements(p.iter().copied()));
            let mut flagged = (0..=pinned.len() as u64).map(|j| EpSet::from_elements(p.iter().copied().chain([d + j])));
            out.push(avoid(&mut flagged));
        } else {
            let base = tail.xor_finite(&p);
            let mut flipped = (0..=pinned.len() as u64).map(|j| {
                if j == 0 {
                    base.clone()
                } else {
                    base.xor_finite(&[d + j - 1].into())
                }
            });
            out.push(avoid(&mut flipped));
        }
    }
    Ok(out)
}

/// `(A(x), ∅) ⊨ ◇^{k+1}¬◇⊤`, evaluated symbolically.
pub fn diamond_k_sat(x: &EpSet, k: u64) -> bool {
    let phi = ModalFormula::dia_pow(k + 1, ModalFormula::leaf());
    eval_symbolic(&build_a(x), &phi).expect("A-nodes need no pattern enumeration")
}

/// `(A(w), ∅) ⊨ φ(z)`.
pub fn char_sat(w: &EpSet, z: &EpSet) -> bool {
    eval_symbolic(&build_a(w), &ModalFormula::CharSet(z.clone())).expect("no diamonds")
}

/// The first `k` conjuncts of `φ(z)` as an explicit finite formula.
pub fn char_formula_prefix(z: &EpSet, k: u64) -> ModalFormula {
    ModalFormula::And(
        (0..k)
            .map(|n| {
                let atom = ModalFormula::dia_pow(n + 1, ModalFormula::leaf());
                if z.member(n) {
                    atom
                } else {
                    ModalFormula::neg(atom)
                }
            })
            .collect(),
    )
}

/// `◇φ(x)`, which holds at `B(x)` and fails at `B(y)` unless `x E₀ y`.
pub fn distinguisher(x: &EpSet) -> ModalFormula {
    ModalFormula::dia(TREE_LABEL, ModalFormula::CharSet(x.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BBisimReport {
    pub bisimilar: bool,
    /// The first pairs `(n, n')` with `m_n(x) = m_{n'}(y)`, when bisimilar.
    pub matching: Vec<(u64, u64)>,
    /// A formula true at `B(x)` and false at `B(y)`, when not bisimilar.
    pub distinguisher: Option<ModalFormula>,
}

/// Bisimilarity of `B(x)` and `B(y)`. A finite `x △ y` yields the child
/// matching `n ↦ n XOR mask(x △ y)`; otherwise `◇φ(x)` is evaluated on both
/// trees and must separate them.
pub fn b_bisim_report(x: &EpSet, y: &EpSet, sample: u64) -> BBisimReport {
    let diff = x.symmetric_difference(y);
    if diff.is_finite() {
        let matching = matching_bijection(x, y, sample).unwrap_or_default();
        return BBisimReport { bisimilar: true, matching, distinguisher: None };
    }
    let phi = distinguisher(x);
    let holds_x = eval_symbolic(&build_b(x), &phi).expect("pinned evaluation");
    let holds_y = eval_symbolic(&build_b(y), &phi).expect("pinned evaluation");
    assert!(holds_x && !holds_y, "distinguisher failed to separate B-trees");
    BBisimReport { bisimilar: false, matching: Vec::new(), distinguisher: Some(phi) }
}

pub fn b_bisim(x: &EpSet, y: &EpSet) -> bool {
    b_bisim_report(x, y, 0).bisimilar
}

/// Pairs `(n, n')` for `n < limit` with `m_n(x) = m_{n'}(y)`.
pub fn matching_bijection(x: &EpSet, y: &EpSet, limit: u64) -> Result<Vec<(u64, u64)>, E0Error> {
    if !x.e0(y) {
        return Err(E0Error::NotE0);
    }
    let diff = x.symmetric_difference(y);
    let top = diff.max_element().unwrap_or(0);
    if top >= 64 {
        return Err(E0Error::MaskTooWide(top));
    }
    let mask: u64 = diff.elements_below(64).map(|i| 1u64 << i).sum();
    Ok((0..limit).map(|n| (n, n ^ mask)).collect())
}

/// Tree rank of `B(x)`: ω+2 if `x` is infinite, ω+1 otherwise.
pub fn b_tree_rank(x: &EpSet) -> OrdinalCnf {
    sym_rank(&build_b(x)).1
}
