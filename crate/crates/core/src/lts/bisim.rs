use std::collections::{BTreeMap, BTreeSet};

use super::PointedLts;
use crate::rel::Rel;

/// Successor lists of both systems, aligned by label name.
struct Aligned<'a> {
    left: &'a PointedLts,
    right: &'a PointedLts,
    labels: Vec<(Option<usize>, Option<usize>)>,
}

impl<'a> Aligned<'a> {
    fn new(left: &'a PointedLts, right: &'a PointedLts) -> Self {
        let mut names: Vec<&String> = left.labels().iter().collect();
        for l in right.labels() {
            if !names.contains(&l) {
                names.push(l);
            }
        }
        let labels = names.iter().map(|n| (left.label_index(n), right.label_index(n))).collect();
        Self { left, right, labels }
    }

    fn succ_left(&self, s: usize, i: usize) -> &[usize] {
        self.labels[i].0.map_or(&[], |a| self.left.successors(s, a))
    }

    fn succ_right(&self, s: usize, i: usize) -> &[usize] {
        self.labels[i].1.map_or(&[], |a| self.right.successors(s, a))
    }

    /// Zig and zag for the pair `(s, t)` against `r`.
    fn transfer(&self, s: usize, t: usize, r: &Rel) -> bool {
        (0..self.labels.len()).all(|i| {
            let ls = self.succ_left(s, i);
            let rs = self.succ_right(t, i);
            ls.iter().all(|&u| rs.iter().any(|&v| r.contains(u, v)))
                && rs.iter().all(|&v| ls.iter().any(|&u| r.contains(u, v)))
        })
    }
}

/// Whether `r` satisfies zig and zag between the two systems.
pub fn is_bisimulation(left: &PointedLts, right: &PointedLts, r: &Rel) -> bool {
    let al = Aligned::new(left, right);
    r.iter().all(|(s, t)| al.transfer(s, t, r))
}

/// The largest bisimulation between the two systems, labels matched by name.
pub fn greatest_bisim(left: &PointedLts, right: &PointedLts) -> Rel {
    let al = Aligned::new(left, right);
    let mut r = Rel::total(left.num_states(), right.num_states());
    loop {
        let doomed: Vec<_> = r.iter().filter(|&(s, t)| !al.transfer(s, t, &r)).collect();
        if doomed.is_empty() {
            return r;
        }
        for (s, t) in doomed {
            r.remove(s, t);
        }
    }
}

/// The `d`-step approximant: `R_0` total, `R_{i+1}` the pairs of `R_i` whose
/// transitions are matched inside `R_i`.
pub fn d_bisim(left: &PointedLts, right: &PointedLts, d: usize) -> Rel {
    let al = Aligned::new(left, right);
    let mut r = Rel::total(left.num_states(), right.num_states());
    for _ in 0..d {
        let next: Vec<_> = r.iter().filter(|&(s, t)| al.transfer(s, t, &r)).collect();
        if next.len() == r.len() {
            break;
        }
        r = Rel::from_pairs(left.num_states(), right.num_states(), next).expect("subset of total");
    }
    r
}

/// Bisimilarity classes of a single system by signature refinement. Blocks
/// are sorted and listed by their least state.
pub fn bisim_partition(lts: &PointedLts) -> Vec<Vec<usize>> {
    let n = lts.num_states();
    let mut block = vec![0usize; n];
    let mut count = if n == 0 { 0 } else { 1 };
    loop {
        let mut ids: BTreeMap<(usize, BTreeSet<(usize, usize)>), usize> = BTreeMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let sig: BTreeSet<(usize, usize)> =
                lts.edges().filter(|e| e.0 == s).map(|(_, a, t)| (a, block[t])).collect();
            let fresh = ids.len();
            next[s] = *ids.entry((block[s], sig)).or_insert(fresh);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, b) in block.into_iter().enumerate() {
        blocks.entry(b).or_default().push(s);
    }
    let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lts(n: usize, edges: &[(usize, usize)]) -> PointedLts {
        PointedLts::from_indexed(vec!["a".into()], n, 0, edges.iter().map(|&(s, t)| (s, 0, t)))
    }

    #[test]
    fn loop_versus_cycle() {
        let one = lts(1, &[(0, 0)]);
        let two = lts(2, &[(0, 1), (1, 0)]);
        assert_eq!(greatest_bisim(&one, &two), Rel::total(1, 2));
    }

    #[test]
    fn terminal_versus_step() {
        let r = greatest_bisim(&lts(1, &[]), &lts(2, &[(0, 1)]));
        assert!(!r.contains(0, 0));
        assert!(r.contains(0, 1));
    }

    #[test]
    fn partition_examples() {
        assert_eq!(bisim_partition(&lts(3, &[])), vec![vec![0, 1, 2]]);
        assert_eq!(bisim_partition(&lts(2, &[(0, 1)])), vec![vec![0], vec![1]]);
        let twins = lts(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(bisim_partition(&twins), vec![vec![0], vec![1, 2], vec![3]]);
        let g = greatest_bisim(&twins, &twins);
        assert!(g.contains(1, 2) && g.contains(2, 1));
    }

    #[test]
    fn d_bisim_is_decreasing() {
        let l = lts(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(d_bisim(&l, &l, 0), Rel::total(4, 4));
        for d in 0..5 {
            assert!(d_bisim(&l, &l, d + 1).is_subset(&d_bisim(&l, &l, d)));
        }
        assert_eq!(d_bisim(&l, &l, 16), greatest_bisim(&l, &l));
    }
}
