//! Uniform structures of finite pointmass NLMPs, the composition
//! enumeration `x_n`, the coding map `h`, the `G`/`K` quantities behind the
//! analytic definition of bisimilarity, and the tree-process generator.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::omega_code_expand;
use crate::foundations::{Rank, Rational, OrdinalCnf};
use crate::lts::{state_ranks, LtsError, OmegaLtsCode, PointedLts, TREE_LABEL};
use crate::nlmp::{greatest_ext_bisim, is_ext_state_bisim, NlmpError, PointmassNlmp, SubProbMeasure};
use crate::rel::Rel;
use crate::substructure::{rx_closure, substructure, Substructure};
use crate::treeiso::canon;
use crate::trees::ExplicitTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniformError {
    #[error("table for state {state:?}, label {label:?} does not reconstruct the transition set{}", row.map(|n| format!(" (row {n})")).unwrap_or_default())]
    Mismatch { state: String, label: String, row: Option<usize> },
    #[error("rank of {state:?} is {rank}, above the bound {alpha}")]
    RankExceeded { state: String, rank: Rank, alpha: OrdinalCnf },
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Nlmp(#[from] NlmpError),
}

/// One row: the list of `(r_{k,n,a}(s), t_{k,n,a}(s))`, `k` = position.
pub type Row = Vec<(Rational, usize)>;

/// Tables `(s, a) ↦ [row_0, row_1, …]` for every `(s, a)` with `T_a(s) ≠ ∅`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformStructure {
    pub num_labels: usize,
    pub tables: BTreeMap<(usize, usize), Vec<Row>>,
}

impl UniformStructure {
    pub fn rows(&self, s: usize, a: usize) -> &[Row] {
        self.tables.get(&(s, a)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn entry(&self, s: usize, a: usize, n: usize, k: usize) -> Option<(Rational, usize)> {
        self.rows(s, a).get(n).and_then(|row| row.get(k)).copied()
    }
}

/// The measure `Σ_k r_k δ_{t_k}` of a row.
pub fn row_measure(row: &Row) -> Result<SubProbMeasure, NlmpError> {
    let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
    for &(r, t) in row {
        *weights.entry(t).or_default() = weights.get(&t).copied().unwrap_or_default() + r;
    }
    weights.retain(|_, w| !w.is_zero());
    SubProbMeasure::new(weights)
}

/// One row per measure in sorted order, entries in state order.
pub fn derive_uniform(n: &PointmassNlmp) -> UniformStructure {
    let mut tables = BTreeMap::new();
    for s in 0..n.num_states() {
        for a in 0..n.labels().len() {
            let set = n.transitions(s, a);
            if !set.is_empty() {
                let rows = set.iter().map(|mu| mu.weights().iter().map(|(&t, &r)| (r, t)).collect()).collect();
                tables.insert((s, a), rows);
            }
        }
    }
    UniformStructure { num_labels: n.labels().len(), tables }
}

/// Checks `T_a(s) = {Σ_k r_{k,n,a}(s) δ_{t_{k,n,a}(s)} | n}` for every `(s, a)`.
pub fn validate_uniform(n: &PointmassNlmp, u: &UniformStructure) -> Result<(), UniformError> {
    let mismatch = |s: usize, a: usize, row: Option<usize>| UniformError::Mismatch {
        state: n.states().get(s).cloned().unwrap_or_else(|| s.to_string()),
        label: n.labels().get(a).cloned().unwrap_or_else(|| a.to_string()),
        row,
    };
    for &(s, a) in u.tables.keys() {
        if s >= n.num_states() || a >= n.labels().len() {
            return Err(mismatch(s, a, None));
        }
    }
    for s in 0..n.num_states() {
        for a in 0..n.labels().len() {
            let expected = n.transitions(s, a);
            let mut seen = BTreeSet::new();
            for (i, row) in u.rows(s, a).iter().enumerate() {
                if row.iter().any(|&(_, t)| t >= n.num_states()) {
                    return Err(mismatch(s, a, Some(i)));
                }
                let mu = row_measure(row).map_err(|_| mismatch(s, a, Some(i)))?;
                if !expected.contains(&mu) {
                    return Err(mismatch(s, a, Some(i)));
                }
                seen.insert(mu);
            }
            if seen.len() != expected.len() {
                return Err(mismatch(s, a, None));
            }
        }
    }
    Ok(())
}

pub fn is_valid_uniform(n: &PointmassNlmp, u: &UniformStructure) -> bool {
    validate_uniform(n, u).is_ok()
}

/// `X_s` in enumeration order: `x_0(s) = s`, then the values of longer
/// compositions breadth-first, each state's functions taken in table order
/// `(a, n, k)`. Stops after `bound` states.
pub fn x_enum(u: &UniformStructure, s: usize, bound: usize) -> Vec<usize> {
    let mut order = vec![s];
    let mut seen: BTreeSet<usize> = [s].into();
    let mut i = 0;
    while i < order.len() && order.len() < bound {
        let x = order[i];
        i += 1;
        for a in 0..u.num_labels {
            for row in u.rows(x, a) {
                for &(_, t) in row {
                    if order.len() < bound && seen.insert(t) {
                        order.push(t);
                    }
                }
            }
        }
    }
    order.truncate(bound.max(1));
    order
}

/// A δ-only process read as transition enumerations `t_{n,a}(s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UmltsStructure {
    pub lts: PointedLts,
}

impl UmltsStructure {
    pub fn from_lts(lts: &PointedLts) -> Self {
        Self { lts: lts.clone() }
    }

    /// `t_{n,a}(s)`: the sorted `a`-successors.
    pub fn enumeration(&self, s: usize, a: usize) -> &[usize] {
        self.lts.successors(s, a)
    }

    /// Row `n` is `[(1, t_{n,a}(s)), (0, s)]`.
    pub fn to_uniform(&self) -> UniformStructure {
        let mut tables = BTreeMap::new();
        for s in 0..self.lts.num_states() {
            for a in 0..self.lts.labels().len() {
                let succ = self.enumeration(s, a);
                if !succ.is_empty() {
                    let rows = succ.iter().map(|&t| vec![(Rational::one(), t), (Rational::zero(), s)]).collect();
                    tables.insert((s, a), rows);
                }
            }
        }
        UniformStructure { num_labels: self.lts.labels().len(), tables }
    }
}

/// `T_a(s) = {δ_t | s →a t}`.
pub fn lts_to_nlmp(lts: &PointedLts) -> PointmassNlmp {
    let trans = lts.edges().map(|(s, a, t)| (s, a, SubProbMeasure::dirac(t)));
    PointmassNlmp::new(lts.labels().to_vec(), lts.states().to_vec(), trans).expect("edges are in range")
}

/// The inverse converter for δ-only processes.
pub fn nlmp_to_lts(n: &PointmassNlmp, root: usize) -> Option<PointedLts> {
    if !n.is_dirac_only() {
        return None;
    }
    let mut edges = Vec::new();
    for s in 0..n.num_states() {
        for a in 0..n.labels().len() {
            for t in n.tilde_t(s, a) {
                edges.push((s, a, t));
            }
        }
    }
    Some(PointedLts::from_indexed_named(n.labels().to_vec(), n.states().to_vec(), root, edges))
}

/// `h(s)`: the reachable part renamed by `f(r) = min{n | x_n(s) = r}`.
pub fn h_map(lts: &PointedLts, s: usize) -> OmegaLtsCode {
    let uniform = UmltsStructure::from_lts(lts).to_uniform();
    let xs = x_enum(&uniform, s, usize::MAX);
    let f: BTreeMap<usize, u64> = xs.iter().enumerate().map(|(i, &r)| (r, i as u64)).collect();
    let mut edges: BTreeMap<String, BTreeSet<(u64, u64)>> = BTreeMap::new();
    for (u, a, v) in lts.edges() {
        if let (Some(&fu), Some(&fv)) = (f.get(&u), f.get(&v)) {
            edges.entry(lts.labels()[a].clone()).or_default().insert((fu, fv));
        }
    }
    OmegaLtsCode { root: 0, edges }
}

/// Enumerated `X_x` with no bound.
fn x_all(u: &UniformStructure, x: usize) -> Vec<usize> {
    x_enum(u, x, usize::MAX)
}

/// `J_{x,x',R,n,k} = {j | r_{j,n,a}(x) ≠ 0 ∧ ∃l t_{k,n,a}(x) R x_l(x') ∧ t_{j,n,a}(x) R x_l(x')}`.
pub fn j_set(u: &UniformStructure, x: usize, x2: usize, r: &Rel, n: usize, k: usize, a: usize) -> BTreeSet<usize> {
    let Some((_, tk)) = u.entry(x, a, n, k) else { return BTreeSet::new() };
    let witnesses: Vec<usize> = x_all(u, x2).into_iter().filter(|&z| r.contains(tk, z)).collect();
    u.rows(x, a)[n]
        .iter()
        .enumerate()
        .filter(|(_, (rj, tj))| !rj.is_zero() && witnesses.iter().any(|&z| r.contains(*tj, z)))
        .map(|(j, _)| j)
        .collect()
}

/// `G = Σ{r_{j,n,a}(x) | j ∈ J}`, i.e. `μ(R⁻¹[R[t_k]] ∩ supp μ)`.
pub fn g_value(u: &UniformStructure, x: usize, x2: usize, r: &Rel, n: usize, k: usize, a: usize) -> Rational {
    let row = &u.rows(x, a)[n];
    j_set(u, x, x2, r, n, k, a).into_iter().map(|j| row[j].0).sum()
}

/// `G' = μ'(R[t_{k,n,a}(x)] ∩ supp μ')` with `μ'` row `n2` of `x2`.
pub fn g_prime_value(u: &UniformStructure, x: usize, x2: usize, r: &Rel, n: usize, n2: usize, k: usize, a: usize) -> Rational {
    let Some((_, tk)) = u.entry(x, a, n, k) else { return Rational::zero() };
    u.rows(x2, a)[n2].iter().filter(|(rj, tj)| !rj.is_zero() && r.contains(tk, *tj)).map(|(rj, _)| *rj).sum()
}

/// `K = μ(R⁻¹[t_{k',n',a}(x')] ∩ supp μ)`.
pub fn k_value(u: &UniformStructure, x: usize, x2: usize, r: &Rel, n: usize, n2: usize, k2: usize, a: usize) -> Rational {
    let Some((_, tk)) = u.entry(x2, a, n2, k2) else { return Rational::zero() };
    u.rows(x, a)[n].iter().filter(|(rj, tj)| !rj.is_zero() && r.contains(*tj, tk)).map(|(rj, _)| *rj).sum()
}

/// `K' = μ'(R[R⁻¹[t_{k',n',a}(x')]] ∩ supp μ')`, the preimage ranging over `X_x`.
pub fn k_prime_value(u: &UniformStructure, x: usize, x2: usize, r: &Rel, n2: usize, k2: usize, a: usize) -> Rational {
    let Some((_, tk)) = u.entry(x2, a, n2, k2) else { return Rational::zero() };
    let witnesses: Vec<usize> = x_all(u, x).into_iter().filter(|&z| r.contains(z, tk)).collect();
    u.rows(x2, a)[n2]
        .iter()
        .filter(|(rj, tj)| !rj.is_zero() && witnesses.iter().any(|&z| r.contains(z, *tj)))
        .map(|(rj, _)| *rj)
        .sum()
}

/// The `G = G'` and `K = K'` equalities for rows `n` of `x` and `n2` of `x2`.
pub fn gk_block(u: &UniformStructure, x: usize, x2: usize, r: &Rel, n: usize, n2: usize, a: usize) -> bool {
    let first = u.rows(x, a)[n].iter().enumerate().filter(|(_, (rk, _))| !rk.is_zero()).all(|(k, _)| {
        g_value(u, x, x2, r, n, k, a) == g_prime_value(u, x, x2, r, n, n2, k, a)
    });
    let second = u.rows(x2, a)[n2].iter().enumerate().filter(|(_, (rk, _))| !rk.is_zero()).all(|(k2, _)| {
        k_value(u, x, x2, r, n, n2, k2, a) == k_prime_value(u, x, x2, r, n2, k2, a)
    });
    first && second
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformSearch {
    pub bisimilar: bool,
    /// On ambient state indices.
    pub witness: Rel,
    pub z_closed: bool,
    pub carriers: (Vec<usize>, Vec<usize>),
}

/// Decides `s ∼ s'` through the substructures on `X_s` and `X_{s'}`: the
/// greatest external bisimulation between them is the witness.
pub fn uniform_bisim_search(
    n: &PointmassNlmp,
    u: &UniformStructure,
    s: usize,
    s2: usize,
) -> Result<UniformSearch, UniformError> {
    let xs: BTreeSet<usize> = x_all(u, s).into_iter().collect();
    let xs2: BTreeSet<usize> = x_all(u, s2).into_iter().collect();
    let left: Substructure = substructure(n, &xs)?;
    let right: Substructure = substructure(n, &xs2)?;
    let mut local = greatest_ext_bisim(&left.induced, &right.induced);
    if !local.is_z_closed() {
        let closed = rx_closure(&local);
        if is_ext_state_bisim(&left.induced, &right.induced, &closed) {
            local = closed;
        }
    }
    let z_closed = local.is_z_closed();
    let bisimilar = local.contains(left.local(s).unwrap(), right.local(s2).unwrap());
    let witness = Substructure::globalize(&local, &left, &right, n.num_states(), n.num_states());
    Ok(UniformSearch { bisimilar, witness, z_closed, carriers: (left.carrier, right.carrier) })
}

/// Node label used for states of a tree process, e.g. `(0,2)`.
pub fn node_name(u: &[u64]) -> String {
    let parts: Vec<String> = u.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

/// The process on the nodes of `T` with an edge to each immediate
/// extension, rooted at the empty node. States are in sorted node order.
pub fn f_process(t: &ExplicitTree<u64>) -> PointedLts {
    let nodes: Vec<&Vec<u64>> = t.nodes().iter().collect();
    let index: BTreeMap<&Vec<u64>, usize> = nodes.iter().enumerate().map(|(i, u)| (*u, i)).collect();
    let edges = nodes.iter().filter(|u| !u.is_empty()).map(|u| (index[&u[..u.len() - 1].to_vec()], 0, index[*u]));
    let states = nodes.iter().map(|u| node_name(u)).collect();
    PointedLts::from_indexed_named(vec![TREE_LABEL.to_string()], states, 0, edges.collect::<Vec<_>>())
}

/// `canon(Ω(h(s))) = canon(Ω(h(t)))`, defined when both ranks are `≤ α`.
pub fn pipeline_rank_bounded_bisim(lts: &PointedLts, s: usize, t: usize, alpha: &OrdinalCnf) -> Result<bool, UniformError> {
    let ranks = state_ranks(lts);
    for x in [s, t] {
        if !ranks[x].ordinal().is_some_and(|r| r <= alpha) {
            return Err(UniformError::RankExceeded { state: lts.states()[x].clone(), rank: ranks[x].clone(), alpha: alpha.clone() });
        }
    }
    let bound = lts.num_states();
    let left = omega_code_expand(&h_map(lts, s), bound)?;
    let right = omega_code_expand(&h_map(lts, t), bound)?;
    Ok(canon(&left) == canon(&right))
}
