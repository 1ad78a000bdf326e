use cubic_brauer::fpgeom::{bad_primes, CubicForm};
use cubic_brauer::locsym::*;
use cubic_brauer::ptsearch::{search, HeightBound};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn conductor7() -> LocalSymbols {
    LocalSymbols::new(CyclicCubicExtension::from_i64([-1, -2, 1]).unwrap(), 7).unwrap()
}

fn conductor9() -> LocalSymbols {
    LocalSymbols::new(CyclicCubicExtension::from_i64([1, -3, 0]).unwrap(), 9).unwrap()
}

fn conductor13() -> LocalSymbols {
    LocalSymbols::new(CyclicCubicExtension::from_i64([1, -4, 1]).unwrap(), 13).unwrap()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn splitting_types() {
    let s7 = conductor7();
    assert_eq!(s7.ramified_primes(), vec![7]);
    assert_eq!(s7.place(5).unwrap().splitting, Splitting::Inert);
    assert_eq!(s7.place(13).unwrap().splitting, Splitting::Split);
    let s9 = conductor9();
    assert_eq!(s9.ramified_primes(), vec![3]);
    assert_eq!(s9.place(13).unwrap().splitting, Splitting::Inert);
    assert_eq!(s9.place(5).unwrap().splitting, Splitting::Inert);
    assert_eq!(s9.place(19).unwrap().splitting, Splitting::Split);
    let s13 = conductor13();
    assert_eq!(s13.ramified_primes(), vec![13]);
    assert_eq!(s13.place(7).unwrap().splitting, Splitting::Inert);
}

#[test]
fn rejected_inputs() {
    assert!(matches!(CyclicCubicExtension::from_i64([-2, 0, 0]), Err(LocalError::NotCyclic(_))));
    assert!(matches!(CyclicCubicExtension::from_i64([-1, 0, 0]), Err(LocalError::Reducible)));
    let q = cubic_brauer::poly::QPoly::from_i64(&[1, -3, 0, 1]);
    assert!(matches!(CyclicCubicExtension::new(Base::Quadratic(5), &q), Err(LocalError::UnsupportedBase(5))));
    assert!(conductor7().place(15).is_err());
    assert!(PAdic::from_rational(&rat(0), 5, 3).is_err());
}

#[test]
fn unramified_units_and_uniformizers() {
    let s = conductor9();
    for p in [5u64, 13] {
        let frob = s.place(p).unwrap().frobenius.unwrap();
        assert_eq!(s.theta_rational(p, &rat(2)).unwrap(), Third::ZERO);
        assert_eq!(s.theta_rational(p, &rat(p as i64)).unwrap(), Third(frob));
    }
}

/// Unramified formula against the norm-group search oracle.
#[test]
fn unramified_formula_matches_norm_search() {
    for (s, p) in [(conductor7(), 5u64), (conductor13(), 7), (conductor9(), 13), (conductor9(), 5)] {
        let q = NormQuotient::search(&s.ext, p, 2, NORM_SAMPLES, 1);
        assert_eq!((q.a, q.d), (3, 1), "p={p}");
        for n in [1i64, 2, 3, p as i64, (p * p) as i64, (p * 2) as i64, (p * p * p) as i64] {
            let x = PAdic::from_rational(&rat(n), p, 2).unwrap();
            let class = q.class_of(&x).unwrap();
            assert_eq!(s.theta(p, &x).unwrap() == Third::ZERO, class == 0, "p={p} n={n}");
        }
    }
}

#[test]
fn theta_vanishes_on_norms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (s, places) in [(conductor7(), vec![5u64, 7, 13]), (conductor9(), vec![3, 5, 13]), (conductor13(), vec![7, 13])] {
        for &p in &places {
            let m = 2 * LocalPlace::precision_floor(p) + 3;
            let big = p.pow(m);
            for _ in 0..NORM_SAMPLES {
                let c = [rng.gen_range(0..big), rng.gen_range(0..big), rng.gen_range(0..big)];
                let n = s.ext.norm_mod(c, big);
                let Ok(x) = PAdic::from_residue(&BigInt::from(n), p, m) else { continue };
                if x.prec < 2 * LocalPlace::precision_floor(p) {
                    continue;
                }
                assert_eq!(s.theta(p, &x).unwrap(), Third::ZERO, "p={p} N={n}");
            }
        }
        // global norms vanish everywhere
        let k = s.ext.field();
        for _ in 0..50 {
            let e = cubic_brauer::numfield::Elem((0..3).map(|_| rat(rng.gen_range(-9..=9))).collect());
            if k.is_zero(&e) {
                continue;
            }
            let n = k.norm(&e);
            for &p in &places {
                assert_eq!(s.theta_rational(p, &n).unwrap(), Third::ZERO);
            }
        }
    }
}

#[test]
fn theta_is_surjective_at_nonsplit_places() {
    for (s, p) in [(conductor7(), 5u64), (conductor7(), 7), (conductor13(), 13), (conductor9(), 3), (conductor13(), 7)] {
        let mut seen = std::collections::BTreeSet::new();
        for n in 1..200i64 {
            seen.insert(s.theta_rational(p, &rat(n)).unwrap());
        }
        assert_eq!(seen.len(), 3, "p={p}");
    }
}

#[test]
fn reciprocity_for_rational_numbers() {
    for s in [conductor7(), conductor9(), conductor13()] {
        for n in [2i64, 3, 5, 7, 11, 13, 29, 31, 37, 41, 43, -17, 97 * 7, 2 * 3 * 5 * 13] {
            let x = rat(n);
            let total = s.support(&x).into_iter().fold(Third::ZERO, |acc, p| acc.add(s.theta_rational(p, &x).unwrap()));
            assert_eq!(total, Third::ZERO, "n={n}");
        }
    }
}

#[test]
fn ramified_symbol_is_stable_under_precision() {
    let s = conductor7();
    let q = s.place(7).unwrap();
    let q = q.quotient().unwrap();
    assert_eq!(q.order(), 3);
    let low = PAdic::from_rational(&rat(3), 7, 1).unwrap();
    assert!(matches!(s.theta(7, &low), Err(LocalError::InsufficientPrecision { .. })));
    for n in 1..50i64 {
        let a = s.theta(7, &PAdic::from_rational(&rat(n), 7, 2).unwrap()).unwrap();
        let b = s.theta(7, &PAdic::from_rational(&rat(n), 7, 6).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_is_a_homomorphism(x in 1i64..5000, y in 1i64..5000, which in 0usize..5) {
        let (s, p) = match which {
            0 => (conductor7(), 7u64),
            1 => (conductor7(), 5),
            2 => (conductor13(), 13),
            3 => (conductor9(), 3),
            _ => (conductor9(), 13),
        };
        let (a, b) = (rat(x), rat(y));
        let ab = &a * &b;
        prop_assert_eq!(s.theta_rational(p, &ab).unwrap(), s.theta_rational(p, &a).unwrap().add(s.theta_rational(p, &b).unwrap()));
    }
}

fn synthetic() -> (LocalSymbols, CubicForm, RepresentingFunction) {
    let s = conductor7();
    let (f, psi) = synthetic_instance(&s.ext, 2, 3);
    (s, f, psi)
}

#[test]
fn synthetic_surface_is_smooth_away_from_few_primes() {
    let (_, f, _) = synthetic();
    let bad = bad_primes(&f, 50);
    assert!(bad.len() <= 4, "{bad:?}");
}

#[test]
fn ev_vanishes_at_split_primes() {
    let (s, f, psi) = synthetic();
    let pts = search(&f, HeightBound::new(12).unwrap()).unwrap().points;
    assert!(pts.len() > 10);
    for x in &pts {
        for p in [13u64, 29, 41, 43] {
            assert_eq!(s.place(p).unwrap().splitting, Splitting::Split);
            assert_eq!(ev_p(&s, &psi, x, p), Ok(Third::ZERO));
        }
    }
}

#[test]
fn adelic_sums_vanish_on_rational_points() {
    let (s, f, psi) = synthetic();
    let pts = search(&f, HeightBound::new(12).unwrap()).unwrap().points;
    assert!(pts.len() > 50);
    let mut nonzero_local = 0;
    let mut checked = 0;
    for x in &pts {
        let Some(v) = psi.value(x) else { continue };
        let primes = s.support(&v);
        for &p in &primes {
            if ev_p(&s, &psi, x, p).unwrap() != Third::ZERO {
                nonzero_local += 1;
            }
        }
        assert_eq!(adelic_sum(&s, &psi, x, &primes), Ok(Third::ZERO), "{x:?}");
        checked += 1;
        if let Some(&q) = primes.iter().find(|&&q| q != 7) {
            let fewer: Vec<u64> = primes.iter().copied().filter(|&r| r != q).collect();
            assert_eq!(adelic_sum(&s, &psi, x, &fewer), Err(LocalError::MissingPrime(q)));
        }
    }
    assert!(checked > 10);
    assert!(nonzero_local > 0, "the check should involve nonzero local values");
}

#[test]
fn norm_multiples_of_psi_leave_values_unchanged() {
    let (s, f, psi) = synthetic();
    // Ψ · N(T0 + 2 T1 θ)/T0³ differs from Ψ by the norm of a rational function
    let k = s.ext.field();
    let pts = search(&f, HeightBound::new(10).unwrap()).unwrap().points;
    for x in &pts {
        let Some(v) = psi.value(x) else { continue };
        if x[0] == 0 {
            continue;
        }
        let e = cubic_brauer::numfield::Elem(vec![rat(1), rat(2 * x[1]) / rat(x[0]), rat(0)]);
        if k.is_zero(&e) {
            continue;
        }
        let w = &v * k.norm(&e);
        for p in [5u64, 7, 11] {
            let (a, b) = (s.theta_rational(p, &v), s.theta_rational(p, &w));
            if let (Ok(a), Ok(b)) = (a, b) {
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn ev_is_locally_constant() {
    let (s, f, psi) = synthetic();
    for p in [5u64, 7] {
        let fq = cubic_brauer::fpgeom::FqCubic::new(&f, p, 1).unwrap();
        for x in fq.points().into_iter().filter(|x| !fq.is_singular_at(x)).take(20) {
            let x = x.map(|v| fq.field.index(v));
            let mut values = std::collections::BTreeSet::new();
            for off in [[0, 0, 0, 0], [1, 2, 0, 3], [4, 1, 1, 1]] {
                let prec = 2 * LocalPlace::precision_floor(p);
                let y = hensel_lift(&f, x, p, prec, off).unwrap();
                let n = p.pow(prec) as i64;
                // the lift is a p-adic point; its value class only depends on it modulo p^prec
                let yi = y.map(|v| v as i64);
                let yi = [yi[0] % n, yi[1], yi[2], yi[3]];
                let Some(v) = psi.value(&yi) else { continue };
                let px = PAdic::from_rational(&v, p, prec).unwrap();
                if px.v != 0 {
                    continue;
                }
                values.insert(s.theta(p, &px).unwrap());
            }
            assert!(values.len() <= 1, "p={p} x={x:?} {values:?}");
        }
    }
}

#[test]
fn residue_distributions() {
    let (s, f, psi) = synthetic();
    for p in [5u64, 7, 11, 13] {
        let d = residue_distribution(&s, &psi, &f, p).unwrap();
        let smooth = cubic_brauer::fpgeom::smooth_point_count(&f, p).unwrap() as usize;
        assert_eq!(d.total(), smooth);
        if !bad_primes(&f, 50).contains(&p) {
            assert!(d.is_equal_or_concentrated(), "p={p} {d:?}");
        }
        if s.place(p).unwrap().splitting != Splitting::Ramified {
            // units at an unramified place have symbol 0
            assert_eq!(d.counts[1] + d.counts[2], 0);
        }
    }
    let constant = RepresentingFunction::new(vec![(rat(2), [1, 0, 0, 0])], vec![(rat(1), [1, 0, 0, 0])], false).unwrap();
    let d = residue_distribution(&s, &constant, &f, 7).unwrap();
    assert_eq!(d.counts.iter().filter(|&&c| c > 0).count(), 1);
}

#[test]
fn json_round_trip() {
    let (s, _, psi) = synthetic();
    let text = psi.to_json(&s.ext);
    let (ext, back) = RepresentingFunction::from_json(&text).unwrap();
    assert_eq!(back, psi);
    assert_eq!(ext.poly(), s.ext.poly());
}
