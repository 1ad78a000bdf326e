use cubic_brauer::fpgeom::forms::*;
use cubic_brauer::fpgeom::*;
use cubic_brauer::weylact::{named, pic_traces, weyl, SubgroupTag};
use proptest::prelude::*;

#[test]
fn example1_mod_2_and_3() {
    let f = example1();
    assert!(is_smooth_reduction(&f, 2).unwrap());
    assert_eq!(count_points(&f, 2, 1).unwrap(), 1);
    assert_eq!(frobenius_trace(&f, 2).unwrap(), -2);
    assert_eq!(smooth_point_count(&f, 3).unwrap(), 9);
}

#[test]
fn example2_singular_points() {
    let f = example2();
    assert!(is_singular_point(&f, 3, [1, 0, 1, 1]).unwrap());
    assert!(is_singular_point(&f, 7, [1, 5, 1, 0]).unwrap());
    assert_eq!(bad_primes(&f, 200), vec![3, 7, 31]);
}

#[test]
fn example3_mod_7_and_13() {
    let f = example3();
    assert_eq!(count_points(&f, 7, 1).unwrap(), 57);
    let c = singular_census(&f, 7, 3).unwrap();
    assert_eq!(c.count_with_degree(1), 0);
    assert_eq!(c.count_with_degree(2), 0);
    assert_eq!(c.count_with_degree(3), 3);
    assert_eq!(c.orbits.len(), 1);
    let c13 = singular_census(&f, 13, 1).unwrap();
    assert_eq!(c13.count_with_degree(1), 3);
    assert_eq!(smooth_point_count(&f, 13).unwrap(), 180);
}

#[test]
fn example4_mod_19_is_three_planes() {
    match factor_into_planes(&example4(), 19).unwrap() {
        PlaneFactorization::Planes { factors, .. } => assert_eq!(factors.len(), 3),
        other => panic!("{other:?}"),
    }
    assert_eq!(factor_into_planes(&example1(), 2).unwrap(), PlaneFactorization::NoLinearFactor);
}

#[test]
fn two_counting_routes_agree() {
    for (_, f) in all_examples() {
        for (p, k) in [(2, 1), (2, 2), (3, 1), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1)] {
            assert_eq!(count_points(&f, p, k).unwrap(), count_points_direct(&f, p, k).unwrap(), "p={p} k={k}");
        }
    }
}

#[test]
fn groebner_smoothness_matches_census() {
    for (_, f) in all_examples() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let Ok(smooth) = is_smooth_reduction(&f, p) else { continue };
            let k_max = if p <= 7 { 3 } else { 2 };
            let census = singular_census(&f, p, k_max).unwrap();
            assert_eq!(smooth, census.is_empty(), "p={p}");
        }
    }
}

#[test]
fn traces_lie_in_weyl_trace_set() {
    let allowed = pic_traces(weyl().group());
    for (_, f) in all_examples() {
        for p in [2u64, 5, 11, 13, 17, 23, 29, 37] {
            if let Ok(t) = frobenius_trace(&f, p) {
                assert!(allowed.contains(&t), "t={t}");
            }
        }
    }
}

#[test]
fn weyl_trace_set() {
    let allowed = pic_traces(weyl().group());
    assert_eq!(allowed, vec![-2, -1, 0, 1, 2, 3, 4, 5, 7]);
}

#[test]
fn example2_traces_lie_in_order_27_image() {
    // the Galois image of Example 2 is the 3-Sylow subgroup of U_t up to conjugacy
    let sylow = named(SubgroupTag::Ut3Sylow);
    assert_eq!(sylow.group.order(), 27);
    let allowed = pic_traces(&sylow.group);
    let f = example2();
    let mut seen = 0;
    for p in (2u64..60).filter(|&p| is_prime(p)) {
        if let Ok(t) = frobenius_trace(&f, p) {
            assert!(allowed.contains(&t), "p={p} t={t} allowed={allowed:?}");
            seen += 1;
        }
    }
    assert!(seen > 10);
}

#[test]
fn cassels_guy_bad_primes() {
    assert_eq!(bad_primes(&cassels_guy(), 50), vec![2, 3, 5]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn census_is_frobenius_stable(coeffs in proptest::collection::vec(-3i64..=3, 20), p in prop::sample::select(vec![2u64, 3, 5])) {
        prop_assume!(coeffs.iter().any(|&c| c % p as i64 != 0));
        let f = CubicForm::from_i64(&coeffs).unwrap();
        let c = singular_census(&f, p, 2).unwrap();
        for orbit in &c.orbits {
            let d = c.points[orbit[0]].degree as usize;
            prop_assert_eq!(orbit.len(), d);
        }
        prop_assert_eq!(count_points(&f, p, 1).unwrap(), count_points_direct(&f, p, 1).unwrap());
    }
}
