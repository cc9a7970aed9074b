//! Isomorphism of finite multiplicity trees: canonical forms, the
//! forth/back predicates, and the rank-stratified relation ≡_α.
//!
//! Canonical form grammar (labels in lexicographic order, children sorted by
//! their own serialization, equal children merged):
//!
//! ```text
//! node  := "(" edge* ")"
//! edge  := len ":" label "[" child* "]"
//! child := node "^" count ","
//! count := digits | "w"
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::foundations::{Count, OrdinalCnf};
use crate::trees::{MultiTree, Ranked};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn canon(t: &MultiTree) -> CanonicalForm {
    CanonicalForm(serialize(t))
}

fn serialize(t: &MultiTree) -> String {
    let mut out = String::from("(");
    for (label, entries) in &t.children {
        let mut merged: BTreeMap<String, Count> = BTreeMap::new();
        for (child, n) in entries {
            if *n == Count::Finite(0) {
                continue;
            }
            let slot = merged.entry(serialize(child)).or_insert(Count::Finite(0));
            *slot = *slot + *n;
        }
        if merged.is_empty() {
            continue;
        }
        out.push_str(&format!("{}:{}[", label.len(), label));
        for (child, n) in merged {
            out.push_str(&format!("{child}^{n},"));
        }
        out.push(']');
    }
    out.push(')');
    out
}

pub fn iso(t: &MultiTree, u: &MultiTree) -> bool {
    canon(t) == canon(u)
}

fn tree_rank_nat(t: &MultiTree) -> u64 {
    t.root_rank_nat() + 1
}

/// `T ≡_α T'`: both tree ranks equal `α` and, label by label, every child
/// type occurs with the same multiplicity on both sides. Child types are
/// compared by recursion on rank.
pub fn cong_alpha(t: &MultiTree, u: &MultiTree, alpha: &OrdinalCnf) -> bool {
    let Some(a) = alpha.as_nat() else { return false };
    if tree_rank_nat(t) != a || tree_rank_nat(u) != a {
        return false;
    }
    let labels: std::collections::BTreeSet<&String> = t.children.keys().chain(u.children.keys()).collect();
    for label in labels {
        // (representative, count in t, count in u)
        let mut classes: Vec<(&MultiTree, Count, Count)> = Vec::new();
        let zero = Count::Finite(0);
        for (c, n) in t.children.get(label).into_iter().flatten() {
            if *n == zero {
                continue;
            }
            match classes.iter_mut().find(|(r, _, _)| same_type(r, c)) {
                Some(class) => class.1 = class.1 + *n,
                None => classes.push((c, *n, zero)),
            }
        }
        for (c, n) in u.children.get(label).into_iter().flatten() {
            if *n == zero {
                continue;
            }
            match classes.iter_mut().find(|(r, _, _)| same_type(r, c)) {
                Some(class) => class.2 = class.2 + *n,
                None => return false,
            }
        }
        if classes.iter().any(|(_, l, r)| l != r) {
            return false;
        }
    }
    true
}

fn same_type(c: &MultiTree, d: &MultiTree) -> bool {
    cong_alpha(c, d, &OrdinalCnf::from_nat(tree_rank_nat(c)))
}

/// First-level nodes of `t`, finite counts expanded and ω capped at `k`
/// copies (a `k`-tuple never uses more).
fn materialize(t: &MultiTree, k: usize) -> Vec<(&str, &MultiTree)> {
    let mut out = Vec::new();
    for (label, entries) in &t.children {
        for (c, n) in entries {
            let copies = n.min_nat(k as u64) as usize;
            out.extend(std::iter::repeat((label.as_str(), c)).take(copies));
        }
    }
    out
}

/// Every injective `k`-tuple of first-level nodes of `t` is imitated one by
/// one by an injective tuple of `u` with equal labels and `≡_β`-related
/// sections for some `β < α`.
fn forth(t: &MultiTree, u: &MultiTree, alpha: &OrdinalCnf, k: usize) -> bool {
    let left = materialize(t, k);
    let right = materialize(u, k);
    if left.len() < k {
        return true;
    }
    let compat: Vec<Vec<bool>> = left
        .iter()
        .map(|(la, c)| {
            right
                .iter()
                .map(|(lb, d)| {
                    let beta = OrdinalCnf::from_nat(tree_rank_nat(c));
                    la == lb && beta < *alpha && cong_alpha(c, d, &beta)
                })
                .collect()
        })
        .collect();
    let mut chosen = Vec::with_capacity(k);
    all_subsets(left.len(), k, 0, &mut chosen, &mut |subset| {
        let mut used = vec![false; right.len()];
        injective_match(subset, &compat, &mut used)
    })
}

fn all_subsets(n: usize, k: usize, start: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if chosen.len() == k {
        return f(chosen);
    }
    for i in start..n {
        chosen.push(i);
        let ok = all_subsets(n, k, i + 1, chosen, f);
        chosen.pop();
        if !ok {
            return false;
        }
    }
    true
}

fn injective_match(rows: &[usize], compat: &[Vec<bool>], used: &mut [bool]) -> bool {
    let Some((&first, rest)) = rows.split_first() else { return true };
    for j in 0..used.len() {
        if !used[j] && compat[first][j] {
            used[j] = true;
            let ok = injective_match(rest, compat, used);
            used[j] = false;
            if ok {
                return true;
            }
        }
    }
    false
}

/// `forth^α_k ∧ back^α_k` without the rank membership clauses.
pub fn matching_clauses(t: &MultiTree, u: &MultiTree, alpha: &OrdinalCnf, k: usize) -> bool {
    forth(t, u, alpha, k) && forth(u, t, alpha, k)
}

/// `forth^α_k(T,T') ∧ back^α_k(T,T')`, including `T, T' ∈ WF^{=α}`.
pub fn forth_back_k(t: &MultiTree, u: &MultiTree, alpha: &OrdinalCnf, k: usize) -> bool {
    t.tree_rank() == *alpha && u.tree_rank() == *alpha && matching_clauses(t, u, alpha, k)
}
