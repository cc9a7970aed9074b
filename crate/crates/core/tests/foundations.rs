use std::collections::BTreeSet;

use bisimkit_core::{Count, EpSet, OrdinalCnf, Rational};
use proptest::prelude::*;

fn ordinal() -> impl Strategy<Value = OrdinalCnf> {
    prop::collection::btree_map(0u32..4, 1u64..4, 0..3).prop_map(|terms| {
        let terms: Vec<(u32, u64)> = terms.into_iter().rev().collect();
        OrdinalCnf::from_terms(terms).unwrap()
    })
}

fn epset() -> impl Strategy<Value = EpSet> {
    (prop::collection::vec(any::<bool>(), 0..7), prop::collection::vec(any::<bool>(), 1..5))
        .prop_map(|(pre, per)| EpSet::new(pre, per).unwrap())
}

fn finite_set() -> impl Strategy<Value = BTreeSet<u64>> {
    prop::collection::btree_set(0u64..20, 0..5)
}

/// Agreement on one full period window past both prefixes.
fn brute_e0(x: &EpSet, y: &EpSet) -> bool {
    let start = x.prefix().len().max(y.prefix().len()) as u64;
    let window = num_integer::lcm(x.period().len(), y.period().len()) as u64;
    (start..start + window).all(|n| x.member(n) == y.member(n))
}

proptest! {
    #[test]
    fn ordinal_order_is_total(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        prop_assert_eq!(a == b, a.cmp(&b).is_eq());
    }

    #[test]
    fn ordinal_sup_laws(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(OrdinalCnf::sup([&a, &a]), a.clone());
        prop_assert_eq!(OrdinalCnf::sup([&a, &b]), OrdinalCnf::sup([&b, &a]));
        let ab = OrdinalCnf::sup([&a, &b]);
        prop_assert!(ab >= a && ab >= b);
        if b <= c {
            prop_assert!(OrdinalCnf::sup([&a, &b]) <= OrdinalCnf::sup([&a, &c]));
        }
    }

    #[test]
    fn ordinal_json_round_trip(a in ordinal()) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<OrdinalCnf>(&text).unwrap(), a);
    }

    #[test]
    fn epset_is_canonical(pre in prop::collection::vec(any::<bool>(), 0..7), per in prop::collection::vec(any::<bool>(), 1..5),
                          pad in 0usize..4, rep in 1usize..3) {
        // Unrolling the period and growing the prefix changes nothing.
        let x = EpSet::new(pre.clone(), per.clone()).unwrap();
        let mut longer = pre.clone();
        for i in 0..pad {
            longer.push(per[i % per.len()]);
        }
        let rotated: Vec<bool> = (0..per.len() * rep).map(|i| per[(i + pad) % per.len()]).collect();
        let y = EpSet::new(longer, rotated).unwrap();
        prop_assert_eq!(&x, &y);
        for n in 0..40 {
            prop_assert_eq!(x.member(n), pre.get(n as usize).copied().unwrap_or_else(|| per[(n as usize - pre.len()) % per.len()]));
        }
    }

    #[test]
    fn xor_finite_is_an_involution(x in epset(), f in finite_set()) {
        prop_assert_eq!(x.xor_finite(&f).xor_finite(&f), x.clone());
        prop_assert!(x.e0(&x.xor_finite(&f)));
        for n in 0..30 {
            prop_assert_eq!(x.xor_finite(&f).member(n), x.member(n) != f.contains(&n));
        }
    }

    #[test]
    fn e0_is_an_equivalence(x in epset(), y in epset(), z in epset()) {
        prop_assert!(x.e0(&x));
        prop_assert_eq!(x.e0(&y), y.e0(&x));
        if x.e0(&y) && y.e0(&z) {
            prop_assert!(x.e0(&z));
        }
        prop_assert_eq!(x.e0(&y), brute_e0(&x, &y));
    }

    #[test]
    fn e0_close_pairs(x in epset(), f in finite_set(), g in finite_set()) {
        // Triples from one class, so transitivity is exercised non-vacuously.
        let (y, z) = (x.xor_finite(&f), x.xor_finite(&g));
        prop_assert!(y.e0(&z) && z.e0(&y));
        prop_assert_eq!(y.symmetric_difference(&z).is_finite(), true);
    }

    #[test]
    fn set_operations_pointwise(x in epset(), y in epset()) {
        let d = x.symmetric_difference(&y);
        let u = x.union(&y);
        for n in 0..40 {
            prop_assert_eq!(d.member(n), x.member(n) != y.member(n));
            prop_assert_eq!(u.member(n), x.member(n) || y.member(n));
        }
        prop_assert_eq!(serde_json::from_str::<EpSet>(&serde_json::to_string(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn rational_arithmetic(a in -20i64..20, b in 1i64..20, c in -20i64..20, d in 1i64..20) {
        let (p, q) = (Rational::new(a, b).unwrap(), Rational::new(c, d).unwrap());
        prop_assert_eq!(p + q - q, p);
        prop_assert_eq!((p + q).to_string().parse::<Rational>().unwrap(), p + q);
        prop_assert_eq!(p < q, a * d < c * b);
    }
}

#[test]
fn e0_triples_at_scale() {
    // 1000 triples mixing independent and finitely-modified sets.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut transitive_hits = 0;
    for _ in 0..1000 {
        let x = bisimkit_core::verify::gen::epset(&mut rng);
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
            if rng.gen_bool(0.5) {
                x.xor_finite(&[rng.gen_range(0..10)].into())
            } else {
                bisimkit_core::verify::gen::epset(rng)
            }
        };
        let (y, z) = (pick(&mut rng), pick(&mut rng));
        assert!(x.e0(&x));
        assert_eq!(x.e0(&y), y.e0(&x));
        if x.e0(&y) && y.e0(&z) {
            transitive_hits += 1;
            assert!(x.e0(&z));
        }
    }
    assert!(transitive_hits > 100);
}

#[test]
fn count_arithmetic_and_json() {
    assert_eq!(Count::Finite(2) + Count::Finite(3), Count::Finite(5));
    assert_eq!(Count::Finite(2) + Count::Omega, Count::Omega);
    assert_eq!(serde_json::to_string(&Count::Omega).unwrap(), "\"omega\"");
    assert_eq!(serde_json::from_str::<Count>("\"w\"").unwrap(), Count::Omega);
    assert!(serde_json::from_str::<Count>("0").is_err());
}

#[test]
fn rational_rejects_zero_denominator() {
    assert!("2/0".parse::<Rational>().is_err());
    assert!(Rational::new(1, 0).is_err());
    assert_eq!(serde_json::to_string(&Rational::new(6, 8).unwrap()).unwrap(), "\"3/4\"");
}
