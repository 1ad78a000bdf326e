use cubic_brauer::descent::examples::*;
use cubic_brauer::descent::*;
use cubic_brauer::numfield::FieldError;
use cubic_brauer::poly::{q, qi, QPoly};

fn split_everything() -> EtaleData {
    // f0 = (T+5)(T+3)(T-2), f1 = (T+2)(T-3)(T-5), Φ = 2T(T-1)(T+1)
    EtaleData::split(qi(1), qi(-1), QPoly::from_i64(&[-30, -1, 6, 1]), QPoly::from_i64(&[30, -1, -6, 1])).unwrap()
}

#[test]
fn auxiliary_polynomials_of_examples() {
    assert_eq!(auxiliary_polynomial(&example1()).poly, QPoly::from_i64(&[1, 0, -3, -1]));
    assert_eq!(auxiliary_polynomial(&example2()).poly, QPoly::from_i64(&[-2, 7, -3, -4]));
    let a4 = auxiliary_polynomial(&example4());
    assert_eq!(a4.sqrt_d, Some(7));
    assert_eq!(a4.poly, QPoly::new(vec![qi(4), qi(2), qi(4), qi(4)]));
    assert_eq!(auxiliary_polynomial(&split_everything()).poly, QPoly::from_i64(&[0, -2, 0, 2]));
}

#[test]
fn galois_types() {
    assert_eq!(cubic_galois_type(&auxiliary_polynomial(&example1()).poly), CubicGaloisType::A3);
    assert_eq!(cubic_galois_type(&auxiliary_polynomial(&example4()).poly), CubicGaloisType::S3);
    assert_eq!(cubic_galois_type(&QPoly::from_i64(&[-1, 0, 0, 1])), CubicGaloisType::Reducible);
    let e3 = example3();
    assert_eq!(cubic_galois_type(&e3.f[0]), CubicGaloisType::A3);
    assert_eq!(cubic_galois_type(&e3.f[1]), CubicGaloisType::A3);
    assert_eq!(cubic_galois_type(&auxiliary_polynomial(&e3).poly), CubicGaloisType::S3);
}

#[test]
fn swap_changes_only_the_sign() {
    for e in [example1(), example2(), example3(), example4()] {
        let a = auxiliary_polynomial(&e);
        let b = auxiliary_polynomial(&e.swapped());
        assert_eq!(a.sqrt_d, b.sqrt_d);
        assert_eq!(a.poly, b.poly.neg());
    }
}

#[test]
fn json_round_trips() {
    for e in [example1(), example2(), example3(), example4()] {
        let back = EtaleData::from_json(&e.to_json()).unwrap();
        assert_eq!(back, e);
    }
    let text = r#"{"D": {"d": 7}, "u": ["1/27", "2/27"], "f": [["-1", "1", "-2", "-1"], ["2", "2", "1", "2"]]}"#;
    assert_eq!(EtaleData::from_json(text).unwrap(), example4());
}

#[test]
fn invalid_data_is_rejected() {
    let cube = QPoly::from_i64(&[-1, 0, 0, 1]);
    assert!(matches!(EtaleData::split(qi(0), qi(1), cube.clone(), cube.clone()), Err(DescentError::ZeroUnit)));
    assert!(matches!(
        EtaleData::split(qi(1), qi(1), QPoly::from_i64(&[1, 2, 1, 0]), cube.clone()),
        Err(DescentError::NotCubic)
    ));
    assert!(EtaleData::from_json("{").is_err());
}

#[test]
fn split_data_gives_a_model_over_q() {
    let s = build_p5_model(&split_everything()).unwrap();
    assert_eq!(s.field.degree(), 1);
    assert!(s.tower.is_empty());
}

#[test]
fn phi_split_over_base_gives_base_as_double_six_field() {
    let s = build_p5_model(&split_everything()).unwrap();
    let ml = lines_of_model(&s).unwrap();
    assert!(check_configuration(&ml).ok());
    let d6 = splitting_field_of_double_sixes(&ml).unwrap();
    assert_eq!(d6.degree, 1);
    assert!(d6.equal);
}

#[test]
fn example1_lines_and_galois_action() {
    let s = build_p5_model(&example1()).unwrap();
    assert_eq!(s.field.degree(), 3);
    let r = check_rationality(&s);
    assert!(r.rational && r.matches_symbolic);

    let ml = lines_of_model(&s).unwrap();
    let c = check_configuration(&ml);
    assert_eq!(c.lines, 27);
    assert_eq!(c.triangles, 45);
    assert!(c.ok(), "{c:?}");
    // every model point on the spans satisfies the equations
    for line in &ml.lines {
        for p in &line.span {
            assert!(s.contains_point(p));
        }
    }

    let g = galois_summary(&ml).unwrap();
    assert_eq!(g.group_order, 3);
    assert_eq!(g.orbit_structure, vec![3; 9]);
    assert_eq!(g.h1_invariant_factors, vec![3, 3]);
    assert!(g.obvious_rule);

    let d6 = splitting_field_of_double_sixes(&ml).unwrap();
    assert_eq!(d6.degree, 3);
    assert_eq!(d6.phi_splitting_degree, 3);
    assert!(d6.equal);
}

#[test]
fn example2_model_is_rational() {
    let s = build_p5_model(&example2()).unwrap();
    assert_eq!(s.field.degree(), 9);
    let r = check_rationality(&s);
    assert!(r.rational && r.matches_symbolic);
}

#[test]
fn degree_bound_is_enforced() {
    let err = build_p5_model_bounded(&example2(), 3).unwrap_err();
    assert!(matches!(err, DescentError::Field(FieldError::DegreeBound { bound: 3, .. })), "{err}");
}

#[test]
fn example4_tower_over_q_sqrt7() {
    let e = example4();
    let k = e.base_field();
    let [(_, f0), (_, f1)] = e.components(&k);
    assert_eq!(splitting_degree_lower_bound(&k, &f0, &f1).unwrap(), 12);
    assert!(build_p5_model_bounded(&e, 12).is_err());

    let s = build_p5_model(&e).unwrap();
    let l = &s.field;
    assert_eq!(l.degree(), 36);
    assert_eq!(l.mul(&s.base_image, &s.base_image), l.from_int(7));
    // a_i are the negated roots of ι_j(f)
    for j in 0..2 {
        let f = if j == 0 { &f0 } else { &f1 };
        for a in &s.a[3 * j..3 * j + 3] {
            let root = l.neg(a);
            let val = f.c.iter().rev().fold(l.zero(), |acc, c| l.add(&l.mul(&acc, &root), &k.map_to(c, l, &s.base_image)));
            assert!(l.is_zero(&val));
        }
    }
    let r = check_rationality(&s);
    assert!(r.rational && r.matches_symbolic);
    assert_eq!(l.mul(&s.u[0], &l.from_rational(q(27, 1))), l.add(&l.one(), &l.scale(&s.base_image, &qi(2))));
}
