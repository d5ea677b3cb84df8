use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use perron_core::lacunary::*;
use perron_core::slopes::SlopeSet;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn pow2(k: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << k)
}

fn sorted(mut v: Vec<BigRational>) -> Vec<BigRational> {
    v.sort();
    v.dedup();
    v
}

fn order(v: &[BigRational]) -> u32 {
    match order_of_points(v, &LacunaritySpec::default())
        .unwrap()
        .order
    {
        Order::Finite(o) => o,
        Order::Exceeds(m) => panic!("exceeds {m}"),
    }
}

fn two_level(kmax: u32) -> Vec<BigRational> {
    let mut v = Vec::new();
    for k in 0..=kmax {
        for l in 0..=k {
            v.push(pow2(k).recip() + pow2(2 * l).recip());
        }
    }
    sorted(v)
}

#[test]
fn reference_sequences() {
    let s = LacunaritySpec::default();
    let halves: Vec<_> = (2..=12).map(|k| pow2(k).recip()).collect();
    assert!(is_lacunary_sequence(&halves, &q(0, 1), &s));
    let mut fact = BigInt::from(6);
    let mut inv_fact = Vec::new();
    for k in 4..=9 {
        fact *= k;
        inv_fact.push(BigRational::new(1.into(), fact.clone()));
    }
    assert!(is_lacunary_sequence(&inv_fact, &q(0, 1), &s));
    let harmonic: Vec<_> = (1..=10).map(|k| q(1, k)).collect();
    assert!(!is_lacunary_sequence(&harmonic, &q(0, 1), &s));
}

#[test]
fn reference_orders() {
    assert_eq!(order(&[q(3, 1)]), 0);
    let dyadic = sorted((2..=10).map(|k| pow2(k).recip()).collect());
    assert_eq!(order(&dyadic), 1);
    let t = Instant::now();
    let r = order_of_points(&two_level(6), &LacunaritySpec::default()).unwrap();
    assert_eq!(r.order, Order::Finite(2));
    assert!(r.exact);
    assert!(t.elapsed().as_secs_f64() < 10.0);
    assert!(verify_witness(
        &two_level(6),
        r.witness_tree.as_ref().unwrap(),
        &q(1, 2)
    ));
}

#[test]
fn slope_set_entry_point() {
    let s = SlopeSet::from_rationals((2..=10).rev().map(|k| pow2(k).recip()).collect()).unwrap();
    let r = lacunary_order(&s, &LacunaritySpec::default()).unwrap();
    assert_eq!(r.order, Order::Finite(1));
    assert!(!r.normalization.is_empty());
}

#[test]
fn max_order_cap() {
    let spec = LacunaritySpec {
        max_order: 1,
        ..LacunaritySpec::default()
    };
    let r = order_of_points(&two_level(4), &spec).unwrap();
    assert_eq!(r.order, Order::Exceeds(1));
}

#[test]
fn budget_is_enforced() {
    let spec = LacunaritySpec {
        budget: 100,
        ..LacunaritySpec::default()
    };
    let err = order_of_points(&two_level(6), &spec).unwrap_err();
    assert_eq!(
        err,
        perron_core::Error::SearchBudgetExceeded { budget: 100 }
    );
}

#[test]
fn unsorted_points_are_rejected() {
    assert!(order_of_points(&[q(2, 1), q(1, 1)], &LacunaritySpec::default()).is_err());
}

#[test]
fn greedy_mode_beyond_the_exact_limit() {
    let v = sorted((1..=80).map(|k| q(k, 1)).collect());
    let r = order_of_points(&v, &LacunaritySpec::default()).unwrap();
    assert!(!r.exact);
    assert!(verify_witness(
        &v,
        r.witness_tree.as_ref().unwrap(),
        &q(1, 2)
    ));
}

#[test]
fn covers() {
    let v: Vec<_> = (1..=8).map(|k| q(k, 1)).collect();
    let s = SlopeSet::from_rationals(v).unwrap();
    let singletons = LacunaritySpec {
        max_order: 0,
        max_cover: 8,
        ..LacunaritySpec::default()
    };
    match finitely_lacunary_cover(&s, &singletons).unwrap() {
        CoverOutcome::Cover { parts, .. } => assert_eq!(parts.len(), 8),
        other => panic!("{other:?}"),
    }
    // limit 3 with cuts 7, 5, 2 leaves singletons
    let one = LacunaritySpec {
        max_order: 1,
        max_cover: 1,
        ..LacunaritySpec::default()
    };
    match finitely_lacunary_cover(&s, &one).unwrap() {
        CoverOutcome::Cover { parts, orders, .. } => {
            assert_eq!(parts, vec![(0..8).collect::<Vec<_>>()]);
            assert_eq!(orders, vec![1]);
        }
        other => panic!("{other:?}"),
    }
    let none = LacunaritySpec {
        max_order: 0,
        max_cover: 3,
        ..LacunaritySpec::default()
    };
    match finitely_lacunary_cover(&s, &none).unwrap() {
        CoverOutcome::Failure {
            attempts,
            budget,
            best_partial,
        } => {
            assert!(attempts <= budget);
            assert_eq!(best_partial.iter().map(Vec::len).sum::<usize>(), 3);
        }
        other => panic!("{other:?}"),
    }
    let s2 = SlopeSet::from_rationals(two_level(6)).unwrap();
    let two = LacunaritySpec {
        max_order: 2,
        max_cover: 1,
        ..LacunaritySpec::default()
    };
    match finitely_lacunary_cover(&s2, &two).unwrap() {
        CoverOutcome::Cover { parts, orders, .. } => {
            assert_eq!(parts.len(), 1);
            assert_eq!(orders, vec![2]);
        }
        other => panic!("{other:?}"),
    }
}

fn small_set() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-200i64..200, 1i64..9), 0..10)
        .prop_map(|v| sorted(v.into_iter().map(|(n, d)| q(n, d)).collect()))
}

/// Monotone lacunary sequence toward an integer limit, contraction ratios
/// `1/m` with `m` in `2..=8`.
fn lacunary_seq() -> impl Strategy<Value = Vec<BigRational>> {
    (
        -20i64..20,
        1i64..50,
        prop::collection::vec(2i64..=8, 1..12),
        any::<bool>(),
    )
        .prop_map(|(l, d0, ms, up)| {
            let mut d = q(d0, 1);
            let mut out = vec![];
            for m in ms {
                out.push(if up { q(l, 1) + &d } else { q(l, 1) - &d });
                d = d / q(m, 1);
            }
            sorted(out)
        })
}

/// Lacunary sequence whose terms may fall on either side of the limit.
fn two_sided_lacunary_seq() -> impl Strategy<Value = Vec<BigRational>> {
    (
        -20i64..20,
        1i64..50,
        prop::collection::vec((2i64..=8, any::<bool>()), 1..12),
    )
        .prop_map(|(l, d0, ms)| {
            let mut d = q(d0, 1);
            let mut out = vec![];
            for (m, up) in ms {
                out.push(if up { q(l, 1) + &d } else { q(l, 1) - &d });
                d = d / q(m, 1);
            }
            sorted(out)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_zero_iff_at_most_one_point(v in small_set()) {
        prop_assert_eq!(order(&v) == 0, v.len() <= 1);
    }

    #[test]
    fn monotone_under_subsets(v in small_set(), mask in any::<u16>()) {
        let sub: Vec<_> = v.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x.clone()).collect();
        prop_assert!(order(&sub) <= order(&v));
    }

    #[test]
    fn affine_invariance(v in small_set(), c in (-5i64..5).prop_filter("nonzero", |c| *c != 0), cd in 1i64..4, d in -10i64..10) {
        let scale = q(c, cd);
        let mapped = sorted(v.iter().map(|x| x * &scale + q(d, 3)).collect());
        prop_assert_eq!(order(&mapped), order(&v));
    }

    #[test]
    fn witnesses_check_against_the_definition(v in small_set()) {
        let r = order_of_points(&v, &LacunaritySpec::default()).unwrap();
        if let Some(t) = r.witness_tree {
            prop_assert!(verify_witness(&v, &t, &q(1, 2)));
        }
    }

    #[test]
    fn lacunary_sequences_have_order_at_most_one(v in lacunary_seq()) {
        prop_assert!(order(&v) <= 1);
    }

    #[test]
    fn two_sided_lacunary_sequences_have_order_at_most_one(v in two_sided_lacunary_seq()) {
        prop_assert!(order(&v) <= 1, "{:?}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    }
}
