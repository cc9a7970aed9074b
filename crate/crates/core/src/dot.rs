//! Graphviz output. Node ids are assigned in a fixed traversal order so the
//! text is byte-stable.

use std::fmt::Write;

use crate::nlmp::PointmassNlmp;
use crate::lts::PointedLts;
use crate::trees::{ExplicitTree, MultiTree};
use crate::uniform::node_name;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per state, one edge per transition labelled by its action.
pub fn lts_dot(lts: &PointedLts) -> String {
    let mut out = String::from("digraph lts {\n");
    for (i, name) in lts.states().iter().enumerate() {
        let shape = if i == lts.root() { "doublecircle" } else { "circle" };
        writeln!(out, "  s{i} [label={}, shape={shape}];", quote(name)).unwrap();
    }
    for (s, a, t) in lts.edges() {
        writeln!(out, "  s{s} -> s{t} [label={}];", quote(&lts.labels()[a])).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Nodes are named by their sequence; children hang below their parent.
pub fn explicit_tree_dot(t: &ExplicitTree<u64>) -> String {
    let mut out = String::from("digraph tree {\n");
    let ids: std::collections::BTreeMap<&Vec<u64>, usize> = t.nodes().iter().enumerate().map(|(i, u)| (u, i)).collect();
    for (u, i) in &ids {
        writeln!(out, "  n{i} [label={}];", quote(&node_name(u))).unwrap();
    }
    for (u, i) in &ids {
        if let Some((_, parent)) = u.split_last() {
            writeln!(out, "  n{} -> n{i};", ids[&parent.to_vec()]).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Each child class is drawn once; the edge carries `label ×count`.
pub fn multitree_dot(t: &MultiTree) -> String {
    fn walk(t: &MultiTree, id: usize, next: &mut usize, out: &mut String) {
        for (label, children) in &t.children {
            for (child, count) in children {
                let cid = *next;
                *next += 1;
                writeln!(out, "  n{cid} [label=\"\"];").unwrap();
                writeln!(out, "  n{id} -> n{cid} [label={}];", quote(&format!("{label} ×{count}"))).unwrap();
                walk(child, cid, next, out);
            }
        }
    }
    let mut out = String::from("digraph multitree {\n  n0 [label=\"\"];\n");
    let mut next = 1;
    walk(t, 0, &mut next, &mut out);
    out.push_str("}\n");
    out
}

/// States as circles, each transition measure as a point node with
/// weighted edges to its support.
pub fn nlmp_dot(n: &PointmassNlmp) -> String {
    let mut out = String::from("digraph nlmp {\n");
    for (i, name) in n.states().iter().enumerate() {
        writeln!(out, "  s{i} [label={}, shape=circle];", quote(name)).unwrap();
    }
    let mut m = 0;
    for s in 0..n.num_states() {
        for (a, label) in n.labels().iter().enumerate() {
            for mu in n.transitions(s, a) {
                writeln!(out, "  m{m} [shape=point];").unwrap();
                writeln!(out, "  s{s} -> m{m} [label={}];", quote(label)).unwrap();
                for (&t, w) in mu.weights() {
                    writeln!(out, "  m{m} -> s{t} [label={}, style=dashed];", quote(&w.to_string())).unwrap();
                }
                m += 1;
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::e0::build_a;
    use crate::foundations::EpSet;
    use crate::trees::sym_truncate;

    #[test]
    fn lts_counts() {
        let lts = PointedLts::from_indexed(vec!["a".into()], 3, 0, [(0, 0, 1), (1, 0, 2)]);
        let dot = lts_dot(&lts);
        assert_eq!(dot.matches("->").count(), 2);
        assert_eq!(dot.matches("shape=").count(), 3);
    }

    #[test]
    fn a_tree_portion() {
        // A({0,2,4,…}) cut at depth 5 and width 5: branches of lengths 1, 3 and 5.
        let t = sym_truncate(&build_a(&EpSet::evens()), 5, 5);
        let dot = explicit_tree_dot(&t);
        assert_eq!(t.len(), 1 + 1 + 3 + 5);
        assert_eq!(dot.matches("->").count(), t.len() - 1);
        assert_eq!(dot, explicit_tree_dot(&t));
    }
}
