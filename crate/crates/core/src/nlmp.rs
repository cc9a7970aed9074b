//! Finite pointmass NLMPs: measures, R-closed sets and pairs, liftings, and
//! the state, external, hit and event bisimulation checks.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foundations::Rational;
use crate::rel::Rel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NlmpError {
    #[error("measure weight for {state:?} must be positive, got {weight}")]
    NonPositiveWeight { state: String, weight: Rational },
    #[error("measure has total mass {0} > 1")]
    MassAboveOne(Rational),
    #[error("relation must be symmetric")]
    Asymmetric,
    #[error("relation is not z-closed")]
    NotZClosed,
    #[error("{0}")]
    Schema(String),
    #[error("{carrier:?} is not thick for the {label:?}-measure {measure} at state {state:?}")]
    NotThick { state: String, label: String, measure: String, carrier: Vec<String> },
    #[error("measure is not supported inside the carrier")]
    MeasureNotThick,
}

/// A finitely supported subprobability measure on state indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubProbMeasure {
    weights: BTreeMap<usize, Rational>,
}

impl SubProbMeasure {
    pub fn new(weights: BTreeMap<usize, Rational>) -> Result<Self, NlmpError> {
        if let Some((s, w)) = weights.iter().find(|(_, w)| !w.is_positive()) {
            return Err(NlmpError::NonPositiveWeight { state: s.to_string(), weight: *w });
        }
        let total: Rational = weights.values().sum();
        if total > Rational::one() {
            return Err(NlmpError::MassAboveOne(total));
        }
        Ok(Self { weights })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(s: usize) -> Self {
        Self { weights: [(s, Rational::one())].into() }
    }

    pub fn weights(&self) -> &BTreeMap<usize, Rational> {
        &self.weights
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn total(&self) -> Rational {
        self.weights.values().sum()
    }

    pub fn at(&self, s: usize) -> Rational {
        self.weights.get(&s).copied().unwrap_or_default()
    }

    pub fn mass<'a, I: IntoIterator<Item = &'a usize>>(&self, set: I) -> Rational {
        set.into_iter().map(|s| self.at(*s)).sum()
    }

    /// Relabels the support through an injective map.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Self {
        Self { weights: self.weights.iter().map(|(&s, &w)| (f(s), w)).collect() }
    }

    /// Formats with state names, e.g. `{u: 1/2, v: 1/2}`.
    pub fn describe(&self, names: &[String]) -> String {
        let parts: Vec<String> = self.weights.iter().map(|(&s, w)| format!("{}: {w}", names[s])).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// A finite NLMP whose transition sets are finite sets of finitely
/// supported measures. `trans[s][a]` is `T_a(s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointmassNlmp {
    labels: Vec<String>,
    states: Vec<String>,
    trans: Vec<Vec<BTreeSet<SubProbMeasure>>>,
}

impl PointmassNlmp {
    /// Builds from indexed `(state, label, measure)` triples.
    pub fn new(
        labels: Vec<String>,
        states: Vec<String>,
        transitions: impl IntoIterator<Item = (usize, usize, SubProbMeasure)>,
    ) -> Result<Self, NlmpError> {
        let mut trans = vec![vec![BTreeSet::new(); labels.len()]; states.len()];
        for (s, a, mu) in transitions {
            if s >= states.len() || a >= labels.len() {
                return Err(NlmpError::Schema(format!("transition ({s}, {a}) out of range")));
            }
            if let Some(&bad) = mu.weights.keys().find(|&&t| t >= states.len()) {
                return Err(NlmpError::Schema(format!("measure support point {bad} out of range")));
            }
            trans[s][a].insert(mu);
        }
        Ok(Self { labels, states, trans })
    }

    /// States named `s0, s1, …`.
    pub fn from_indexed(
        labels: Vec<String>,
        n_states: usize,
        transitions: impl IntoIterator<Item = (usize, usize, SubProbMeasure)>,
    ) -> Result<Self, NlmpError> {
        Self::new(labels, (0..n_states).map(|i| format!("s{i}")).collect(), transitions)
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

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn transitions(&self, s: usize, a: usize) -> &BTreeSet<SubProbMeasure> {
        &self.trans[s][a]
    }

    fn transitions_by_name(&self, s: usize, label: &str) -> Option<&BTreeSet<SubProbMeasure>> {
        self.label_index(label).map(|a| &self.trans[s][a])
    }

    /// Every measure occurring in some transition set, deduplicated.
    pub fn all_measures(&self) -> BTreeSet<&SubProbMeasure> {
        self.trans.iter().flatten().flatten().collect()
    }

    /// `T̃_a(s)`: union of the supports of `T_a(s)`.
    pub fn tilde_t(&self, s: usize, a: usize) -> BTreeSet<usize> {
        self.trans[s][a].iter().flat_map(|m| m.weights.keys().copied()).collect()
    }

    /// Whether every measure is a Dirac measure.
    pub fn is_dirac_only(&self) -> bool {
        self.all_measures().iter().all(|m| m.weights.len() == 1 && m.total() == Rational::one())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Atoms of `Σ(R)`: the weakly connected components of `R` on one space,
/// each sorted, listed by least element.
pub fn rclosed_atoms(r: &Rel) -> Vec<Vec<usize>> {
    let n = r.left_size();
    debug_assert_eq!(n, r.right_size());
    let mut uf = UnionFind::new(n);
    for (x, y) in r.iter() {
        uf.union(x, y);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        let root = uf.find(x);
        groups.entry(root).or_default().push(x);
    }
    groups.into_values().collect()
}

/// `R[Q] ⊆ Q` and `R^{-1}[Q] ⊆ Q`.
pub fn is_rclosed_set(r: &Rel, q: &BTreeSet<usize>) -> bool {
    r.iter().all(|(x, y)| q.contains(&x) == q.contains(&y))
}

/// `R ∩ (Q × S') = R ∩ (S × Q')`.
pub fn is_closed_pair(r: &Rel, q: &BTreeSet<usize>, q_prime: &BTreeSet<usize>) -> bool {
    r.iter().all(|(x, y)| q.contains(&x) == q_prime.contains(&y))
}

/// Atoms of `Σ^×(R)` for `R ⊆ S × S'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedPairAtoms {
    pub components: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
    pub isolated_left: BTreeSet<usize>,
    pub isolated_right: BTreeSet<usize>,
}

pub fn closed_pair_atoms(r: &Rel) -> ClosedPairAtoms {
    let (n, m) = (r.left_size(), r.right_size());
    let mut uf = UnionFind::new(n + m);
    for (x, y) in r.iter() {
        uf.union(x, n + y);
    }
    let dom = r.domain();
    let ran = r.range();
    let mut groups: BTreeMap<usize, (BTreeSet<usize>, BTreeSet<usize>)> = BTreeMap::new();
    for x in dom.iter().copied() {
        let root = uf.find(x);
        groups.entry(root).or_default().0.insert(x);
    }
    for y in ran.iter().copied() {
        let root = uf.find(n + y);
        groups.entry(root).or_default().1.insert(y);
    }
    ClosedPairAtoms {
        components: groups.into_values().collect(),
        isolated_left: (0..n).filter(|x| !dom.contains(x)).collect(),
        isolated_right: (0..m).filter(|y| !ran.contains(y)).collect(),
    }
}

/// `μ R̄ μ'` for `R` on one space: equal mass on every atom of `Σ(R)`.
pub fn lift_internal(mu: &SubProbMeasure, nu: &SubProbMeasure, r: &Rel) -> bool {
    rclosed_atoms(r).iter().all(|atom| mu.mass(atom) == nu.mass(atom))
}

/// `μ R̄ μ'` for `R ⊆ S × S'`: equal mass on each component, no mass on
/// unrelated points.
pub fn lift_external(mu: &SubProbMeasure, nu: &SubProbMeasure, r: &Rel) -> bool {
    lift_with_atoms(mu, nu, &closed_pair_atoms(r))
}

fn lift_with_atoms(mu: &SubProbMeasure, nu: &SubProbMeasure, atoms: &ClosedPairAtoms) -> bool {
    mu.mass(&atoms.isolated_left).is_zero()
        && nu.mass(&atoms.isolated_right).is_zero()
        && atoms.components.iter().all(|(q, q2)| mu.mass(q) == nu.mass(q2))
}

/// The two support conditions alone, for z-closed `R`:
/// `μ(R⁻¹[R[x]] ∩ supp μ) = μ'(R[x] ∩ supp μ')` for `x ∈ supp μ`, and
/// `μ(R⁻¹[y'] ∩ supp μ) = μ'(R[R⁻¹[y']] ∩ supp μ')` for `y' ∈ supp μ'`.
pub fn lift_support_conditions(mu: &SubProbMeasure, nu: &SubProbMeasure, r: &Rel) -> Result<bool, NlmpError> {
    if !r.is_z_closed() {
        return Err(NlmpError::NotZClosed);
    }
    let (supp, supp2) = (mu.support(), nu.support());
    let first = supp.iter().all(|&x| {
        let rx = r.image(x);
        let back = r.preimage_of_set(&rx);
        mu.mass(back.intersection(&supp)) == nu.mass(rx.intersection(&supp2))
    });
    let second = supp2.iter().all(|&y| {
        let ry = r.preimage(y);
        let fwd = r.image_of_set(&ry);
        mu.mass(ry.intersection(&supp)) == nu.mass(fwd.intersection(&supp2))
    });
    Ok(first && second)
}

/// Support-based lifting: the two support conditions, plus no mass on
/// support points with empty `R`-image (resp. preimage). The extra clause is
/// what the conditions leave implicit when `R` is not yet known to be a
/// bisimulation.
pub fn lift_support(mu: &SubProbMeasure, nu: &SubProbMeasure, r: &Rel) -> Result<bool, NlmpError> {
    if !lift_support_conditions(mu, nu, r)? {
        return Ok(false);
    }
    let dom = r.domain();
    let ran = r.range();
    Ok(mu.support().iter().all(|x| dom.contains(x)) && nu.support().iter().all(|y| ran.contains(y)))
}

/// Zig and zag for `(s, t)` on one process with lifting by `Σ(R)` atoms.
fn internal_transfer(n: &PointmassNlmp, s: usize, t: &usize, atoms: &[Vec<usize>]) -> bool {
    let lifted = |mu: &SubProbMeasure, nu: &SubProbMeasure| atoms.iter().all(|q| mu.mass(q) == nu.mass(q));
    (0..n.labels.len()).all(|a| {
        let (ts, tt) = (&n.trans[s][a], &n.trans[*t][a]);
        ts.iter().all(|mu| tt.iter().any(|nu| lifted(mu, nu))) && tt.iter().all(|nu| ts.iter().any(|mu| lifted(mu, nu)))
    })
}

pub fn is_state_bisim(n: &PointmassNlmp, r: &Rel) -> Result<bool, NlmpError> {
    if !r.is_symmetric() {
        return Err(NlmpError::Asymmetric);
    }
    let atoms = rclosed_atoms(r);
    Ok(r.iter().all(|(s, t)| internal_transfer(n, s, &t, &atoms)))
}

/// Label names of both processes, first-seen order.
fn label_union<'a>(n: &'a PointmassNlmp, m: &'a PointmassNlmp) -> Vec<&'a str> {
    let mut out: Vec<&str> = n.labels.iter().map(String::as_str).collect();
    for l in &m.labels {
        if !out.contains(&l.as_str()) {
            out.push(l);
        }
    }
    out
}

fn external_transfer(n: &PointmassNlmp, m: &PointmassNlmp, labels: &[&str], x: usize, y: usize, atoms: &ClosedPairAtoms) -> bool {
    let empty = BTreeSet::new();
    labels.iter().all(|label| {
        let tx = n.transitions_by_name(x, label).unwrap_or(&empty);
        let ty = m.transitions_by_name(y, label).unwrap_or(&empty);
        tx.iter().all(|mu| ty.iter().any(|nu| lift_with_atoms(mu, nu, atoms)))
            && ty.iter().all(|nu| tx.iter().any(|mu| lift_with_atoms(mu, nu, atoms)))
    })
}

/// External state bisimulation between two processes, labels matched by name.
pub fn is_ext_state_bisim(n: &PointmassNlmp, m: &PointmassNlmp, r: &Rel) -> bool {
    let atoms = closed_pair_atoms(r);
    let labels = label_union(n, m);
    r.iter().all(|(x, y)| external_transfer(n, m, &labels, x, y, &atoms))
}

/// Largest state bisimulation, by pair removal from the total relation.
pub fn greatest_state_bisim(n: &PointmassNlmp) -> Rel {
    let k = n.num_states();
    let mut r = Rel::total(k, k);
    loop {
        let atoms = rclosed_atoms(&r);
        let doomed: Vec<_> = r.iter().filter(|(s, t)| !internal_transfer(n, *s, t, &atoms)).collect();
        if doomed.is_empty() {
            return r;
        }
        for (s, t) in doomed {
            r.remove(s, t);
            r.remove(t, s);
        }
    }
}

/// Largest external state bisimulation between two processes.
pub fn greatest_ext_bisim(n: &PointmassNlmp, m: &PointmassNlmp) -> Rel {
    let labels = label_union(n, m);
    let mut r = Rel::total(n.num_states(), m.num_states());
    loop {
        let atoms = closed_pair_atoms(&r);
        let doomed: Vec<_> = r.iter().filter(|&(x, y)| !external_transfer(n, m, &labels, x, y, &atoms)).collect();
        if doomed.is_empty() {
            return r;
        }
        for (x, y) in doomed {
            r.remove(x, y);
        }
    }
}

fn atom_vectors(set: &BTreeSet<SubProbMeasure>, atoms: &[Vec<usize>]) -> BTreeSet<Vec<Rational>> {
    set.iter().map(|mu| atoms.iter().map(|q| mu.mass(q)).collect()).collect()
}

/// Hit bisimulation on a finite space: related states reach the same sets of
/// `Σ(R)`-atom mass vectors under every label.
pub fn is_hit_bisim(n: &PointmassNlmp, r: &Rel) -> Result<bool, NlmpError> {
    if !r.is_symmetric() {
        return Err(NlmpError::Asymmetric);
    }
    let atoms = rclosed_atoms(r);
    Ok(r.iter().all(|(s, t)| {
        (0..n.labels.len()).all(|a| atom_vectors(&n.trans[s][a], &atoms) == atom_vectors(&n.trans[t][a], &atoms))
    }))
}

/// Atoms of the σ-algebra generated by `lambda`: states grouped by their
/// membership pattern.
pub fn sigma_atoms(num_states: usize, lambda: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for s in 0..num_states {
        let key = lambda.iter().map(|q| q.contains(&s)).collect();
        groups.entry(key).or_default().push(s);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort();
    out
}

/// Event bisimulation: every hit preimage of a class of measures that
/// `σ(Λ)` cannot separate is `σ(Λ)`-measurable. Checking single classes
/// suffices since `σ(Λ)` is closed under unions.
pub fn is_event_bisim(n: &PointmassNlmp, lambda: &[BTreeSet<usize>]) -> bool {
    let atoms = sigma_atoms(n.num_states(), lambda);
    let mut atom_of = vec![0; n.num_states()];
    for (i, atom) in atoms.iter().enumerate() {
        for &s in atom {
            atom_of[s] = i;
        }
    }
    let vector = |mu: &SubProbMeasure| -> Vec<Rational> { atoms.iter().map(|q| mu.mass(q)).collect() };
    let classes: BTreeSet<Vec<Rational>> = n.all_measures().into_iter().map(vector).collect();
    classes.iter().all(|class| {
        (0..n.labels.len()).all(|a| {
            let hit: Vec<bool> = (0..n.num_states()).map(|s| n.trans[s][a].iter().any(|mu| vector(mu) == *class)).collect();
            // measurable iff constant on every atom
            (0..n.num_states()).all(|s| hit[s] == hit[atoms[atom_of[s]][0]])
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn measure(pairs: &[(usize, &str)]) -> SubProbMeasure {
        SubProbMeasure::new(pairs.iter().map(|&(s, w)| (s, q(w))).collect()).unwrap()
    }

    #[test]
    fn atoms_examples() {
        assert_eq!(rclosed_atoms(&Rel::empty(3, 3)), vec![vec![0], vec![1], vec![2]]);
        let r = Rel::from_pairs(3, 3, [(0, 1)]).unwrap();
        assert_eq!(rclosed_atoms(&r), vec![vec![0, 1], vec![2]]);
        let atoms = closed_pair_atoms(&Rel::from_pairs(2, 2, [(0, 1)]).unwrap());
        assert_eq!(atoms.components, vec![([0].into(), [1].into())]);
        assert_eq!(atoms.isolated_left, [1].into());
        assert_eq!(atoms.isolated_right, [0].into());
    }

    #[test]
    fn three_point_closed_pair() {
        // R restricted to {1,2} x {3}, written 0-based
        let r_down = Rel::from_pairs(3, 3, [(1, 2)]).unwrap();
        assert!(is_closed_pair(&r_down, &[0].into(), &BTreeSet::new()));
        assert!(closed_pair_atoms(&r_down).isolated_left.contains(&0));
    }

    #[test]
    fn internal_lift_examples() {
        let r = Rel::from_pairs(3, 3, [(0, 1), (1, 0)]).unwrap();
        assert!(lift_internal(&measure(&[(0, "1/2")]), &measure(&[(1, "1/2")]), &r));
        assert!(!lift_internal(&measure(&[(0, "1/2")]), &measure(&[(1, "1/2")]), &Rel::identity(3)));
        assert!(lift_internal(&measure(&[(0, "1/2")]), &measure(&[(2, "1/2")]), &Rel::total(3, 3)));
    }

    #[test]
    fn external_lift_examples() {
        let r = Rel::from_pairs(2, 2, [(0, 0)]).unwrap();
        assert!(lift_external(&SubProbMeasure::dirac(0), &SubProbMeasure::dirac(0), &r));
        assert!(!lift_external(&SubProbMeasure::dirac(1), &SubProbMeasure::zero(), &r));
        assert!(lift_external(&SubProbMeasure::zero(), &SubProbMeasure::zero(), &r));
    }

    #[test]
    fn support_lift_needs_z_closure() {
        let r = Rel::from_pairs(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap();
        let d = SubProbMeasure::dirac(0);
        assert_eq!(lift_support(&d, &d, &r), Err(NlmpError::NotZClosed));
        assert!(lift_support(&d, &d, &Rel::identity(2)).unwrap());
        let partial = Rel::from_pairs(2, 2, [(0, 0)]).unwrap();
        assert!(!lift_support(&SubProbMeasure::dirac(1), &SubProbMeasure::dirac(0), &partial).unwrap());
    }

    #[test]
    fn state_bisim_example() {
        let labels = vec!["a".to_string()];
        let n = PointmassNlmp::from_indexed(
            labels,
            3,
            [(0, 0, SubProbMeasure::dirac(2)), (1, 0, SubProbMeasure::dirac(2))],
        )
        .unwrap();
        let r = Rel::from_pairs(3, 3, [(0, 1), (1, 0), (0, 0), (1, 1), (2, 2)]).unwrap();
        assert!(is_state_bisim(&n, &r).unwrap());
        assert!(is_state_bisim(&n, &Rel::identity(3)).unwrap());
        assert_eq!(is_state_bisim(&n, &Rel::from_pairs(3, 3, [(0, 1)]).unwrap()), Err(NlmpError::Asymmetric));
        assert!(is_ext_state_bisim(&n, &n, &Rel::empty(3, 3)));
        assert!(greatest_state_bisim(&n).contains(0, 1));
    }

    #[test]
    fn masses_separate_states() {
        let n = PointmassNlmp::from_indexed(
            vec!["a".into()],
            3,
            [(0, 0, measure(&[(2, "1/2")])), (1, 0, measure(&[(2, "1/3")]))],
        )
        .unwrap();
        let g = greatest_state_bisim(&n);
        assert!(!g.contains(0, 1));
        assert!(g.contains(0, 0));
    }

    #[test]
    fn hit_and_event_examples() {
        let n = PointmassNlmp::from_indexed(
            vec!["a".into()],
            2,
            [(0, 0, SubProbMeasure::dirac(0)), (1, 0, measure(&[(0, "1/2")]))],
        )
        .unwrap();
        assert!(is_hit_bisim(&n, &Rel::identity(2)).unwrap());
        assert!(!is_hit_bisim(&n, &Rel::total(2, 2)).unwrap());
        let powerset: Vec<BTreeSet<usize>> = vec![[0].into(), [1].into()];
        assert!(is_event_bisim(&n, &powerset));
        let uneven = PointmassNlmp::from_indexed(vec!["a".into()], 2, [(0, 0, SubProbMeasure::dirac(1))]).unwrap();
        assert!(!is_event_bisim(&uneven, &[[0, 1].into()]));
        assert!(!is_event_bisim(&uneven, &[BTreeSet::new()]));
    }
}
