//! Substructures, reachable carriers, sums of processes, and the relation
//! transformations between them.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::nlmp::{closed_pair_atoms, NlmpError, PointmassNlmp, SubProbMeasure};
use crate::rel::Rel;

/// At finite scale `A` is thick for `μ` iff it contains the support.
pub fn is_thick(a: &BTreeSet<usize>, mu: &SubProbMeasure) -> bool {
    mu.weights().keys().all(|s| a.contains(s))
}

/// `μ_A`, kept on ambient indices.
pub fn restrict_measure(mu: &SubProbMeasure, a: &BTreeSet<usize>) -> Result<SubProbMeasure, NlmpError> {
    if is_thick(a, mu) {
        Ok(mu.clone())
    } else {
        Err(NlmpError::MeasureNotThick)
    }
}

/// The process induced on a carrier, with local indices `0..|A|` assigned in
/// ascending ambient order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Substructure {
    pub carrier: Vec<usize>,
    #[serde(skip)]
    pub induced: PointmassNlmp,
}

impl Substructure {
    pub fn local(&self, ambient: usize) -> Option<usize> {
        self.carrier.binary_search(&ambient).ok()
    }

    pub fn ambient(&self, local: usize) -> usize {
        self.carrier[local]
    }

    /// A relation on ambient indices, read on local indices of two
    /// substructures (pairs outside the carriers are dropped).
    pub fn localize(r: &Rel, left: &Substructure, right: &Substructure) -> Rel {
        let pairs = r.iter().filter_map(|(x, y)| Some((left.local(x)?, right.local(y)?)));
        Rel::from_pairs(left.carrier.len(), right.carrier.len(), pairs).expect("local indices in range")
    }

    /// The inverse of `localize`.
    pub fn globalize(r: &Rel, left: &Substructure, right: &Substructure, n: usize, m: usize) -> Rel {
        r.map(n, m, |x| left.carrier[x], |y| right.carrier[y])
    }
}

pub fn substructure(n: &PointmassNlmp, a: &BTreeSet<usize>) -> Result<Substructure, NlmpError> {
    let carrier: Vec<usize> = a.iter().copied().collect();
    let local = |s: usize| carrier.binary_search(&s).expect("checked thick");
    let mut trans = Vec::new();
    for (i, &s) in carrier.iter().enumerate() {
        for (ai, label) in n.labels().iter().enumerate() {
            for mu in n.transitions(s, ai) {
                if !is_thick(a, mu) {
                    return Err(NlmpError::NotThick {
                        state: n.states()[s].clone(),
                        label: label.clone(),
                        measure: mu.describe(n.states()),
                        carrier: carrier.iter().map(|&c| n.states()[c].clone()).collect(),
                    });
                }
                trans.push((i, ai, mu.map(local)));
            }
        }
    }
    let states = carrier.iter().map(|&c| n.states()[c].clone()).collect();
    let induced = PointmassNlmp::new(n.labels().to_vec(), states, trans)?;
    Ok(Substructure { carrier, induced })
}

/// `T̃_a(s)` by label name; empty for unknown labels.
pub fn tilde_t(n: &PointmassNlmp, s: usize, label: &str) -> BTreeSet<usize> {
    n.label_index(label).map(|a| n.tilde_t(s, a)).unwrap_or_default()
}

/// `A_s`: least fixpoint of `A_{n+1} = A_n ∪ ⋃ T̃_a[A_n]`.
pub fn reach_a_s(n: &PointmassNlmp, s: usize) -> BTreeSet<usize> {
    let mut acc: BTreeSet<usize> = [s].into();
    loop {
        let mut next = acc.clone();
        for &t in &acc {
            for a in 0..n.labels().len() {
                next.extend(n.tilde_t(t, a));
            }
        }
        if next.len() == acc.len() {
            return acc;
        }
        acc = next;
    }
}

/// `R↓ = R ∩ (A × A')`.
pub fn restrict_rel(r: &Rel, a: &BTreeSet<usize>, a_prime: &BTreeSet<usize>) -> Rel {
    r.restrict(a, a_prime)
}

/// `𝓡^×(Σ^×(R))`: pairs not separated by any closed pair, i.e. the union of
/// `Q_i × Q'_i` over the components.
pub fn rx_closure(r: &Rel) -> Rel {
    let atoms = closed_pair_atoms(r);
    let pairs = atoms.components.iter().flat_map(|(q, q2)| q.iter().flat_map(move |&x| q2.iter().map(move |&y| (x, y))));
    Rel::from_pairs(r.left_size(), r.right_size(), pairs).expect("components are in range")
}

/// `𝓡(Σ(R))` on one space: pairs lying in a common atom.
pub fn r_of_sigma(r: &Rel) -> Rel {
    let n = r.left_size();
    let pairs = crate::nlmp::rclosed_atoms(r)
        .into_iter()
        .flat_map(|atom| atom.iter().flat_map(|&x| atom.iter().map(move |&y| (x, y))).collect::<Vec<_>>());
    Rel::from_pairs(n, n, pairs).expect("atoms are in range")
}

/// The sum process on `S ⊕ S'`: `inl(s) = s`, `inr(s') = |S| + s'`; state
/// ids get `l:` / `r:` prefixes and labels are merged by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumNlmp {
    pub process: PointmassNlmp,
    pub left_size: usize,
    pub right_size: usize,
}

impl SumNlmp {
    pub fn inl(&self, s: usize) -> usize {
        s
    }

    pub fn inr(&self, s: usize) -> usize {
        self.left_size + s
    }
}

pub fn sum_nlmp(n: &PointmassNlmp, m: &PointmassNlmp) -> SumNlmp {
    let mut labels: Vec<String> = n.labels().to_vec();
    for l in m.labels() {
        if !labels.contains(l) {
            labels.push(l.clone());
        }
    }
    let offset = n.num_states();
    let states = n
        .states()
        .iter()
        .map(|s| format!("l:{s}"))
        .chain(m.states().iter().map(|s| format!("r:{s}")))
        .collect();
    let mut trans = Vec::new();
    for (proc_, shift) in [(n, 0), (m, offset)] {
        for s in 0..proc_.num_states() {
            for (a, label) in proc_.labels().iter().enumerate() {
                let la = labels.iter().position(|l| l == label).unwrap();
                for mu in proc_.transitions(s, a) {
                    trans.push((s + shift, la, mu.map(|t| t + shift)));
                }
            }
        }
    }
    let process = PointmassNlmp::new(labels, states, trans).expect("sum of valid processes");
    SumNlmp { process, left_size: offset, right_size: m.num_states() }
}

/// `⌜R⌝ = {(inl s, inr s') | s R s'}`.
pub fn rel_lift(r: &Rel) -> Rel {
    let (n, m) = (r.left_size(), r.right_size());
    r.map(n + m, n + m, |x| x, |y| n + y)
}

/// `R_× = {(s, s') | inl(s) R inr(s')}` for `R` on the sum.
pub fn rel_descent(r: &Rel, left_size: usize, right_size: usize) -> Rel {
    let pairs = r.iter().filter(|&(x, y)| x < left_size && y >= left_size).map(|(x, y)| (x, y - left_size));
    Rel::from_pairs(left_size, right_size, pairs).expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> PointmassNlmp {
        PointmassNlmp::from_indexed(vec!["a".into()], 3, [(0, 0, SubProbMeasure::dirac(1))]).unwrap()
    }

    #[test]
    fn reachability() {
        let n = chain();
        assert_eq!(reach_a_s(&n, 0), [0, 1].into());
        assert_eq!(reach_a_s(&n, 2), [2].into());
        assert_eq!(tilde_t(&n, 0, "a"), [1].into());
    }

    #[test]
    fn thickness() {
        let n = chain();
        let all: BTreeSet<usize> = (0..3).collect();
        assert_eq!(substructure(&n, &all).unwrap().induced, n);
        let err = substructure(&n, &[0, 2].into()).unwrap_err();
        assert!(matches!(err, NlmpError::NotThick { .. }));
        assert!(err.to_string().contains("s0"), "{err}");
        assert!(restrict_measure(&SubProbMeasure::dirac(1), &[0].into()).is_err());
    }

    #[test]
    fn three_point_counterexample() {
        let r = Rel::from_pairs(3, 3, [(0, 1), (1, 2)]).unwrap();
        let a: BTreeSet<usize> = [0, 1].into();
        let a2: BTreeSet<usize> = [2].into();
        let lhs = restrict_rel(&r_of_sigma(&r), &a, &a2);
        let rhs = rx_closure(&restrict_rel(&r, &a, &a2));
        assert!(lhs.contains(0, 2));
        assert!(!rhs.contains(0, 2));
    }

    #[test]
    fn closure_examples() {
        assert!(rx_closure(&Rel::empty(2, 2)).is_empty());
        let r = Rel::from_pairs(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap();
        let c = rx_closure(&r);
        assert_eq!(c, Rel::total(2, 2));
        assert_eq!(rx_closure(&c), c);
    }

    #[test]
    fn sums() {
        let n = chain();
        let s = sum_nlmp(&n, &n);
        assert_eq!(s.process.num_states(), 6);
        assert_eq!(s.process.states()[3], "r:s0");
        assert_eq!(s.process.transitions(3, 0).iter().next().unwrap(), &SubProbMeasure::dirac(4));
        let r = Rel::from_pairs(3, 3, [(0, 2), (1, 1)]).unwrap();
        assert_eq!(rel_descent(&rel_lift(&r), 3, 3), r);
    }
}
