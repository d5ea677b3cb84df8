use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use perron_core::slopes::*;
use perron_core::{Error, Real};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn set(v: &[i64]) -> SlopeSet {
    SlopeSet::from_ints(v).unwrap()
}

/// Straight from the definition: largest `x + 1/x` over the admissible pairs.
fn naive_g(u: &[BigRational], l_le_k: bool) -> BigRational {
    let n = u.len();
    let mut best = BigRational::zero();
    for k in 1..=n {
        for l in 1..=n {
            if k + 2 * l > n || (l_le_k && l > k) {
                continue;
            }
            let x = (&u[k + 2 * l - 1] - &u[k + l - 1]) / (&u[k + l - 1] - &u[k - 1]);
            let s = &x + x.recip();
            if s > best {
                best = s;
            }
        }
    }
    best
}

fn exact(r: &Real) -> BigRational {
    r.exact()
        .expect("exact input gives an exact factor")
        .clone()
}

#[test]
fn reference_factors() {
    assert_eq!(
        exact(
            &perron_factor(&set(&[1, 2, 3, 4]), IndexConvention::AllKl)
                .unwrap()
                .g
        ),
        q(2, 1)
    );
    assert_eq!(
        exact(
            &perron_factor(&set(&[0, 1, 2]), IndexConvention::AllKl)
                .unwrap()
                .g
        ),
        q(2, 1)
    );
    let r = perron_factor(&set(&[1, 2, 4]), IndexConvention::AllKl).unwrap();
    assert_eq!(exact(&r.g), q(5, 2));
    assert_eq!((r.argmax_k, r.argmax_l), (1, 1));
    assert_eq!(
        exact(
            &perron_factor(&set(&[0, 1, 3, 7, 8]), IndexConvention::AllKl)
                .unwrap()
                .g
        ),
        q(17, 4)
    );
    assert_eq!(
        perron_factor(&set(&[1, 2]), IndexConvention::AllKl).unwrap_err(),
        Error::CardinalityTooSmall {
            found: 2,
            required: 3
        }
    );
}

#[test]
fn irrational_inputs_give_enclosures() {
    let u = SlopeSet::from_decimal_strs(&["1", "2.000000000000000000001", "3"]).unwrap();
    let g = perron_factor(&u, IndexConvention::AllKl).unwrap().g;
    assert!(g.lower() > q(2, 1));
    let approx = SlopeSet::from_f64(&[0.1, 0.2, 0.4]).unwrap();
    let g = perron_factor(&approx, IndexConvention::AllKl).unwrap().g;
    assert!((g.to_f64() - 2.5).abs() < 1e-12);
}

#[test]
fn arithmetic_progression_checks() {
    let zero = BigRational::zero();
    assert!(is_arithmetic_progression(&set(&[44, 88, 132, 176]), &zero).unwrap());
    assert!(!is_arithmetic_progression(&set(&[1, 2, 4]), &zero).unwrap());
    let lac = SlopeSet::from_rationals((2..=6).rev().map(|k| q(1, 1 << k)).collect()).unwrap();
    assert!(!is_arithmetic_progression(&lac, &zero).unwrap());
    assert!(is_arithmetic_progression(&set(&[1]), &zero).is_err());
}

#[test]
fn reciprocals() {
    let r = reciprocal_set(&set(&[1, 2, 4])).unwrap();
    assert_eq!(r.rationals().unwrap(), vec![q(1, 4), q(1, 2), q(1, 1)]);
    assert_eq!(
        reciprocal_set(&set(&[3])).unwrap().rationals().unwrap(),
        vec![q(1, 3)]
    );
    assert_eq!(reciprocal_set(&set(&[0, 1])), Err(Error::ContainsZero));
    assert_eq!(reciprocal_set(&set(&[-1, 1])), Err(Error::MixedSigns));
}

#[test]
fn capacity_records() {
    let ap = |n: u32| {
        (
            n,
            SlopeSet::from_ints(&(1..=1i64 << n).collect::<Vec<_>>()).unwrap(),
        )
    };
    let est = capacity_upper_bound(&[ap(1), ap(2), ap(3)], IndexConvention::AllKl).unwrap();
    assert_eq!(est.upper_bounds[&1], CapacityRecord::Vacuous);
    assert_eq!(est.certified_bound, Some(q(2, 1)));
    assert_eq!(
        capacity_upper_bound(&[], IndexConvention::AllKl),
        Err(Error::EmptyWitnessList)
    );
    assert!(matches!(
        capacity_upper_bound(&[(2, set(&[1, 2, 3]))], IndexConvention::AllKl),
        Err(Error::CardinalityMismatch {
            n: 2,
            expected: 4,
            found: 3
        })
    ));
}

#[test]
fn brute_force_references() {
    let r = capacity_brute_force(&set(&[1, 2, 3, 4, 5]), 2, IndexConvention::AllKl).unwrap();
    assert_eq!(exact(&r.g), q(2, 1));
    assert_eq!(r.indices, [0, 1, 2, 3]);
    let r = capacity_brute_force(&set(&[0, 1, 3, 4, 7, 9, 12]), 2, IndexConvention::AllKl).unwrap();
    assert_eq!(exact(&r.g), q(25, 12));
    let ap8 = set(&[3, 10, 17, 24, 31, 38, 45, 52]);
    assert_eq!(
        exact(
            &capacity_brute_force(&ap8, 2, IndexConvention::AllKl)
                .unwrap()
                .g
        ),
        q(2, 1)
    );
    assert!(capacity_brute_force(&set(&[1, 2, 3]), 2, IndexConvention::AllKl).is_err());
    let big = SlopeSet::from_ints(&(0..25).collect::<Vec<_>>()).unwrap();
    assert!(matches!(
        capacity_brute_force(&big, 2, IndexConvention::AllKl),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn lp_bound_reference() {
    let query = LpBoundQuery {
        g: q(2, 1),
        n: 2,
        p: 2.0,
        alpha_grid: vec![q(1, 2)],
    };
    assert_eq!(lp_lower_bound(&query).unwrap(), (q(1, 2), q(4, 3)));
    // α^n is negligible: the bound approaches 1/(g(1-α)^2)
    let near_one = BigRational::one() - q(1, 1000);
    let query = LpBoundQuery {
        g: q(3, 1),
        n: 20_000,
        p: 2.0,
        alpha_grid: vec![q(1, 2), near_one.clone()],
    };
    let (alpha, bound) = lp_lower_bound(&query).unwrap();
    assert_eq!(alpha, near_one);
    let limit = q(1_000_000, 3);
    assert!(bound < limit && bound > &limit * q(999, 1000));
}

#[test]
fn coefficient_reference() {
    assert_eq!(hr_coefficient(&q(9, 10), 4, &q(2, 1)), q(6761, 10000));
}

fn sorted_distinct() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-1000i64..1000, 3..14)
        .prop_map(|s: BTreeSet<i64>| s.into_iter().collect())
}

proptest! {
    #[test]
    fn agrees_with_the_definition(v in sorted_distinct()) {
        let u = set(&v);
        let qs: Vec<BigRational> = v.iter().map(|&x| q(x, 1)).collect();
        for (conv, lk) in [(IndexConvention::AllKl, false), (IndexConvention::LLeK, true)] {
            let r = perron_factor_with_table(&u, conv).unwrap();
            prop_assert_eq!(exact(&r.g), naive_g(&qs, lk));
            prop_assert!(r.argmax_k + 2 * r.argmax_l <= v.len());
            let row = r.ratio_table.as_ref().unwrap().iter().find(|e| (e.k, e.l) == (r.argmax_k, r.argmax_l)).unwrap();
            prop_assert_eq!(exact(&row.forward) + exact(&row.backward), exact(&r.g));
        }
    }

    #[test]
    fn at_least_two_with_equality_exactly_for_progressions(v in sorted_distinct()) {
        let u = set(&v);
        let g = exact(&perron_factor(&u, IndexConvention::AllKl).unwrap().g);
        prop_assert!(g >= q(2, 1));
        prop_assert_eq!(g == q(2, 1), is_arithmetic_progression(&u, &BigRational::zero()).unwrap());
    }

    #[test]
    fn progressions_and_their_perturbations(
        a in -50i64..50, d in 1i64..40, den in 1i64..9, len in 3usize..65,
        pick in any::<prop::sample::Index>(), num in 1i64..100, sign in any::<bool>(),
    ) {
        let step = q(d, den);
        let base = q(a, den);
        let mut vals: Vec<BigRational> = (0..len).map(|i| &base + &step * BigRational::from_integer(i.into())).collect();
        let u = SlopeSet::from_rationals(vals.clone()).unwrap();
        prop_assert_eq!(exact(&perron_factor(&u, IndexConvention::AllKl).unwrap().g), q(2, 1));
        // a shift below half a step keeps the order
        let delta = &step * q(if sign { num } else { -num }, 201);
        let i = pick.index(len);
        vals[i] += delta;
        let p = SlopeSet::from_rationals(vals).unwrap();
        prop_assert!(exact(&perron_factor(&p, IndexConvention::AllKl).unwrap().g) > q(2, 1));
    }

    #[test]
    fn affine_invariance(v in sorted_distinct(), c in prop_oneof![-20i64..-1, 1i64..20], d in -100i64..100, den in 1i64..7) {
        let g = exact(&perron_factor(&set(&v), IndexConvention::AllKl).unwrap().g);
        let mut w: Vec<BigRational> = v.iter().map(|&x| q(c * x, den) + q(d, 1)).collect();
        w.sort();
        let h = exact(&perron_factor(&SlopeSet::from_rationals(w).unwrap(), IndexConvention::AllKl).unwrap().g);
        prop_assert_eq!(g, h);
    }

    #[test]
    fn restricted_convention_is_smaller(v in sorted_distinct()) {
        let u = set(&v);
        let all = exact(&perron_factor(&u, IndexConvention::AllKl).unwrap().g);
        let lk = exact(&perron_factor(&u, IndexConvention::LLeK).unwrap().g);
        prop_assert!(lk <= all);
    }

    #[test]
    fn brute_force_is_the_minimum(v in prop::collection::btree_set(-60i64..60, 4..11), picks in prop::collection::vec(any::<prop::sample::Index>(), 4)) {
        let v: Vec<i64> = v.into_iter().collect();
        let omega = set(&v);
        let best = capacity_brute_force(&omega, 2, IndexConvention::AllKl).unwrap();
        let best_g = exact(&best.g);
        prop_assert_eq!(exact(&perron_factor(&best.subset, IndexConvention::AllKl).unwrap().g), best_g.clone());
        let mut idx: Vec<usize> = picks.iter().map(|p| p.index(v.len())).collect();
        idx.sort();
        idx.dedup();
        if idx.len() == 4 {
            let sub = omega.subset(&idx).unwrap();
            prop_assert!(best_g <= exact(&perron_factor(&sub, IndexConvention::AllKl).unwrap().g));
        }
    }

    #[test]
    fn reciprocal_is_an_involution(v in prop::collection::btree_set(1i64..500, 1..10)) {
        let v: Vec<i64> = v.into_iter().collect();
        let u = set(&v);
        prop_assert_eq!(reciprocal_set(&reciprocal_set(&u).unwrap()).unwrap().rationals(), u.rationals());
    }

    #[test]
    fn lp_bound_monotonicity(g in 2i64..20, n in 1u32..60, m in 2u32..40) {
        let grid = LpBoundQuery::uniform_grid(m);
        let at = |g: i64, n: u32| lp_lower_bound(&LpBoundQuery { g: q(g, 1), n, p: 2.0, alpha_grid: grid.clone() }).unwrap().1;
        prop_assert!(at(g, n) <= at(g, n + 1));
        prop_assert!(at(g + 1, n) <= at(g, n));
    }
}
