use std::collections::BTreeSet;

use bisimkit_core::lts::{code_to_lts, greatest_bisim, state_rank};
use bisimkit_core::nlmp::greatest_state_bisim;
use bisimkit_core::substructure::{reach_a_s, substructure};
use bisimkit_core::uniform::{
    derive_uniform, f_process, h_map, is_valid_uniform, j_set, lts_to_nlmp, nlmp_to_lts, pipeline_rank_bounded_bisim,
    uniform_bisim_search, validate_uniform, x_enum, UmltsStructure, UniformError,
};
use bisimkit_core::verify::{gen, plane_trees};
use bisimkit_core::{OrdinalCnf, PointmassNlmp, Rank, Rational, Rel, SubProbMeasure};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #[test]
    fn scrambled_tables_validate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let proc_ = gen::nlmp(&mut r, n, 2, 2, 3);
        let mut u = gen::scrambled_uniform(&mut r, &proc_);
        prop_assert!(is_valid_uniform(&proc_, &derive_uniform(&proc_)));
        prop_assert!(is_valid_uniform(&proc_, &u));
        if let Some(rows) = u.tables.values_mut().find(|rows| !rows.is_empty()) {
            rows.pop();
            // Dropping a row loses a measure unless another row repeats it.
            let _ = validate_uniform(&proc_, &u);
        }
    }

    #[test]
    fn x_enum_covers_the_reachable_carrier(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let proc_ = gen::nlmp(&mut r, n, 2, 2, 3);
        let u = gen::scrambled_uniform(&mut r, &proc_);
        for s in 0..n {
            let xs = x_enum(&u, s, usize::MAX);
            prop_assert_eq!(xs[0], s);
            let set: BTreeSet<usize> = xs.iter().copied().collect();
            prop_assert_eq!(set.len(), xs.len());
            prop_assert!(reach_a_s(&proc_, s).is_subset(&set));
            prop_assert!(substructure(&proc_, &set).is_ok());
            prop_assert_eq!(x_enum(&u, s, 2).len(), xs.len().min(2));
        }
    }

    #[test]
    fn search_matches_greatest_state_bisim(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let proc_ = gen::nlmp(&mut r, n, 2, 2, 3);
        let u = gen::scrambled_uniform(&mut r, &proc_);
        let g = greatest_state_bisim(&proc_);
        for s in 0..n {
            for t in 0..n {
                let found = uniform_bisim_search(&proc_, &u, s, t).unwrap();
                prop_assert_eq!(found.bisimilar, g.contains(s, t));
                prop_assert!(found.z_closed && found.witness.is_z_closed());
            }
        }
    }

    #[test]
    fn umlts_edge_law(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let lts = gen::any_lts(&mut r, n, 2, 0.3);
        let u = UmltsStructure::from_lts(&lts).to_uniform();
        for s in 0..n {
            let xs = x_enum(&u, s, usize::MAX);
            for &p in &xs {
                for &q in &xs {
                    for a in 0..2 {
                        let edge = lts.successors(p, a).contains(&q);
                        let via_table = (0..u.rows(p, a).len()).any(|l| u.entry(p, a, l, 0).map(|e| e.1) == Some(q));
                        prop_assert_eq!(edge, via_table);
                    }
                }
            }
        }
    }

    #[test]
    fn h_code_is_bisimilar_to_its_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let lts = gen::any_lts(&mut r, n, 2, 0.3);
        for s in 0..n {
            let code = h_map(&lts, s);
            prop_assert_eq!(code.root, 0);
            let back = code_to_lts(&code, n).unwrap();
            prop_assert!(greatest_bisim(&back, &lts).contains(back.root(), s));
        }
    }

    #[test]
    fn tree_process_ranks(seed in any::<u64>()) {
        let t = gen::explicit_tree(&mut rng(seed), 15);
        let lts = f_process(&t);
        for (i, v) in t.nodes().iter().enumerate() {
            prop_assert_eq!(state_rank(&lts, i), Rank::nat(t.node_rank(v)));
        }
    }

    #[test]
    fn mlts_conversions_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lts = gen::any_lts(&mut r, 4, 2, 0.3);
        let back = nlmp_to_lts(&lts_to_nlmp(&lts), lts.root()).unwrap();
        prop_assert_eq!(back, lts);
    }
}

#[test]
fn singleton_supports_give_trivial_j() {
    let proc_ = PointmassNlmp::from_indexed(gen::labels(1), 2, [(0, 0, SubProbMeasure::dirac(1)), (1, 0, SubProbMeasure::dirac(1))]).unwrap();
    let u = derive_uniform(&proc_);
    let total = Rel::total(2, 2);
    assert_eq!(j_set(&u, 0, 1, &total, 0, 0, 0), [0].into());
    assert!(j_set(&u, 0, 1, &Rel::empty(2, 2), 0, 0, 0).is_empty());
}

#[test]
fn mass_mismatch_is_not_bisimilar() {
    let half = Rational::new(1, 2).unwrap();
    let proc_ = PointmassNlmp::from_indexed(
        gen::labels(1),
        3,
        [(0, 0, SubProbMeasure::dirac(2)), (1, 0, SubProbMeasure::new([(2, half)].into()).unwrap())],
    )
    .unwrap();
    let found = uniform_bisim_search(&proc_, &derive_uniform(&proc_), 0, 1).unwrap();
    assert!(!found.bisimilar);
    assert!(!found.witness.contains(0, 1));
    let same = uniform_bisim_search(&proc_, &derive_uniform(&proc_), 0, 0).unwrap();
    assert!(same.bisimilar && same.witness.contains(0, 0));
}

#[test]
fn pipeline_over_small_trees() {
    for size in 1..=5 {
        for t in plane_trees(size) {
            let lts = f_process(&t);
            let g = greatest_bisim(&lts, &lts);
            let alpha = OrdinalCnf::from_nat(size as u64);
            for s in 0..lts.num_states() {
                for u in 0..lts.num_states() {
                    assert_eq!(pipeline_rank_bounded_bisim(&lts, s, u, &alpha).unwrap(), g.contains(s, u));
                }
            }
        }
    }
    let t = plane_trees(3).pop().unwrap();
    let err = pipeline_rank_bounded_bisim(&f_process(&t), 0, 0, &OrdinalCnf::zero()).unwrap_err();
    assert!(matches!(err, UniformError::RankExceeded { .. }));
}
