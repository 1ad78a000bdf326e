use cubic_brauer::fpgeom::forms::*;
use cubic_brauer::fpgeom::CubicForm;
use cubic_brauer::ptsearch::*;
use proptest::prelude::*;

fn hb(b: u64) -> HeightBound {
    HeightBound::new(b).unwrap()
}

#[test]
fn cassels_guy_has_no_points() {
    assert_eq!(search(&cassels_guy(), hb(200)).unwrap().count, 0);
}

#[test]
fn search_equals_oracle_on_examples() {
    for (name, f) in all_examples() {
        let fast = search(&f, hb(30)).unwrap();
        let slow = search_oracle(&f, 30).unwrap();
        assert_eq!(fast, slow, "{name}");
        for p in &fast.points {
            assert!(on_surface(&f, p));
        }
    }
}

#[test]
fn height_one_matches_sign_normalized_vectors() {
    let mut vs = Vec::new();
    for n in 0..81 {
        let x = [n % 3 - 1, n / 3 % 3 - 1, n / 9 % 3 - 1, n / 27 % 3 - 1];
        if is_canonical(&x) {
            vs.push(x);
        }
    }
    assert_eq!(vs.len(), 40);
    for (_, f) in all_examples() {
        let expect: Vec<_> = vs.iter().copied().filter(|x| on_surface(&f, x)).collect();
        let mut got = search(&f, hb(1)).unwrap().points;
        got.sort();
        let mut e = expect.clone();
        e.sort();
        assert_eq!(got, e);
    }
}

#[test]
fn bounds_are_validated() {
    assert!(HeightBound::new(0).is_err());
    assert_eq!(search_oracle(&example1(), 201), Err(SearchError::OracleHeight(201)));
}

#[test]
fn degenerate_slices() {
    // T0 divides the form: every point with T0 = 0 lies on it
    let f = CubicForm::from_terms(&[(1, [1, 2, 0, 0]), (-1, [1, 0, 0, 2])]).unwrap();
    assert_eq!(search(&f, hb(3)).unwrap(), search_oracle(&f, 3).unwrap());
    let g = CubicForm::from_terms(&[(1, [0, 1, 1, 1])]).unwrap();
    assert_eq!(search(&g, hb(4)).unwrap(), search_oracle(&g, 4).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_forms_agree_with_oracle(coeffs in proptest::collection::vec(-4i64..=4, 20), b in 1u64..6) {
        prop_assume!(coeffs.iter().any(|&c| c != 0));
        let f = CubicForm::from_i64(&coeffs).unwrap();
        let fast = search(&f, hb(b)).unwrap();
        prop_assert_eq!(&fast, &search_oracle(&f, b).unwrap());
        // monotone in B
        prop_assert!(search(&f, hb(b + 1)).unwrap().count >= fast.count);
    }
}
