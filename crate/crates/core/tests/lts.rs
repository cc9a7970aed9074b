use bisimkit_core::expansion::{omega_expand, omega_expand_truncated};
use bisimkit_core::lts::{
    bisim_partition, build_phi, code_to_lts, d_bisim, eval_formula, greatest_bisim, is_bisimulation, lts_to_code,
    state_rank, state_ranks, ModalFormula,
};
use bisimkit_core::treeiso::canon;
use bisimkit_core::verify::gen;
use bisimkit_core::{OrdinalCnf, PointedLts, Rank, Rel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn formula(rng: &mut ChaCha8Rng, depth: usize) -> ModalFormula {
    let pick = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..5) };
    match pick {
        0 => ModalFormula::Top,
        1 => ModalFormula::neg(formula(rng, depth)),
        2 => ModalFormula::And(vec![formula(rng, depth - 1), formula(rng, depth - 1)]),
        3 => ModalFormula::Or(vec![formula(rng, depth - 1), formula(rng, depth - 1)]),
        _ => ModalFormula::dia(if rng.gen_bool(0.5) { "a" } else { "b" }, formula(rng, depth - 1)),
    }
}

fn concat(l: &PointedLts, r: &PointedLts) -> PointedLts {
    let n = l.num_states();
    let edges: Vec<_> = l.edges().chain(r.edges().map(|(s, a, t)| (s + n, a, t + n))).collect();
    PointedLts::from_indexed(l.labels().to_vec(), n + r.num_states(), 0, edges)
}

proptest! {
    #[test]
    fn greatest_bisim_is_a_bisimulation_and_an_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let lts = gen::any_lts(&mut r, n, 2, 0.25);
        let g = greatest_bisim(&lts, &lts);
        prop_assert!(is_bisimulation(&lts, &lts, &g));
        prop_assert!(g.is_equivalence());
        // The partition and the relation agree.
        let blocks = bisim_partition(&lts);
        let from_blocks = Rel::from_pairs(n, n, blocks.iter().flat_map(|b| b.iter().flat_map(move |&x| b.iter().map(move |&y| (x, y))))).unwrap();
        prop_assert_eq!(from_blocks, g.clone());
        // d-bisimilarity decreases in d and reaches the greatest bisimulation.
        let mut prev = Rel::total(n, n);
        for d in 0..=n + 1 {
            let cur = d_bisim(&lts, &lts, d);
            prop_assert!(cur.is_subset(&prev));
            prev = cur;
        }
        prop_assert_eq!(prev, g);
    }

    #[test]
    fn bisimilar_states_agree_on_formulas(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = gen::any_lts(&mut r, 5, 2, 0.2);
        let (v, _) = gen::bisimilar_variant(&mut r, &l);
        let both = concat(&l, &v);
        let g = greatest_bisim(&both, &both);
        let phis: Vec<ModalFormula> = (0..24).map(|_| formula(&mut r, 3)).collect();
        for (s, t) in g.iter() {
            for phi in &phis {
                prop_assert_eq!(eval_formula(&both, s, phi).unwrap(), eval_formula(&both, t, phi).unwrap());
            }
        }
    }

    #[test]
    fn rank_is_bisimulation_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let lts = gen::any_lts(&mut r, n, 2, 0.2);
        let g = greatest_bisim(&lts, &lts);
        let ranks = state_ranks(&lts);
        for (s, t) in g.iter() {
            prop_assert_eq!(&ranks[s], &ranks[t]);
        }
        for s in 0..n {
            for m in 0..=n as u64 {
                let alpha = OrdinalCnf::from_nat(m);
                prop_assert_eq!(eval_formula(&lts, s, &build_phi(&alpha, lts.labels())).unwrap(), ranks[s].at_least(&alpha));
            }
        }
    }

    #[test]
    fn expansion_root_rank_is_state_rank(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let lts = gen::wf_lts(&mut r, n, 2, 0.4);
        for s in 0..n {
            use bisimkit_core::trees::Ranked;
            let tree = omega_expand(&lts, s).unwrap();
            prop_assert_eq!(state_rank(&lts, s), Rank::Ordinal(tree.root_rank()));
        }
    }

    #[test]
    fn truncated_expansions_track_d_bisim(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let lts = gen::any_lts(&mut r, n, 2, 0.3);
        for d in 0..=4 {
            let rel = d_bisim(&lts, &lts, d);
            let forms: Vec<_> = (0..n).map(|s| canon(&omega_expand_truncated(&lts, s, d))).collect();
            for s in 0..n {
                for t in 0..n {
                    prop_assert_eq!(rel.contains(s, t), forms[s] == forms[t], "d={} s={} t={}", d, s, t);
                }
            }
        }
    }

    #[test]
    fn code_round_trip_is_bisimilar(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let lts = gen::any_lts(&mut r, n, 2, 0.3);
        let numbering: Vec<u64> = (0..n as u64).map(|i| 3 * i + 1).collect();
        let code = lts_to_code(&lts, &numbering).unwrap();
        let back = code_to_lts(&code, n).unwrap();
        prop_assert!(greatest_bisim(&lts, &back).contains(lts.root(), back.root()));
    }
}

#[test]
fn exhaustive_small_systems_match_relation_union() {
    for n in 1..=3usize {
        for mask in 0u64..1 << (n * n) {
            let e = gen::rel_from_mask(n, n, mask);
            let lts = PointedLts::from_indexed(gen::labels(1), n, 0, e.iter().map(|(s, t)| (s, 0, t)));
            let mut union = Rel::empty(n, n);
            for rm in 0u64..1 << (n * n) {
                let r = gen::rel_from_mask(n, n, rm);
                if is_bisimulation(&lts, &lts, &r) {
                    union = union.union(&r);
                }
            }
            assert_eq!(greatest_bisim(&lts, &lts), union);
        }
    }
}

#[test]
fn cyclic_states_have_infinite_rank() {
    let lts = PointedLts::from_indexed(gen::labels(1), 3, 0, [(0, 0, 1), (1, 0, 1), (2, 0, 0)]);
    assert_eq!(state_rank(&lts, 0), Rank::Infinite);
    assert!(omega_expand(&lts, 2).is_err());
}
