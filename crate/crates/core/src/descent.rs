//! Galois descent data `(D, u, f)`, the auxiliary polynomial, the model in
//! `P^5` cut out by
//!
//! ```text
//! u0 X0 X1 X2 + u1 X3 X4 X5 = 0,  sum a_i X_i = 0,  sum X_i = 0,
//! ```
//!
//! its 27 lines and their configuration.
//!
//! Root convention: `a_0, a_1, a_2` are the negatives of the roots of `f_0`
//! (and likewise for `f_1`), so `(a_0 + T)(a_1 + T)(a_2 + T) = f_0(T)/lc(f_0)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galcoh;
use crate::lines27::{Configuration, N_LINES};
use crate::numfield::{splitting_field, Elem, FieldError, KPoly, NumberField};
use crate::permgrp::{Perm, PermGroup};
use crate::poly::{parse_rational, qi, QPoly};

pub const DEGREE_BOUND: usize = 36;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error("u has a zero component")]
    ZeroUnit,
    #[error("f must be a cubic in each component")]
    NotCubic,
    #[error("f has a repeated root")]
    RepeatedRoot,
    #[error("d = {0} is not a squarefree integer other than 0 and 1")]
    BadDiscriminant(i64),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("field error: {0}")]
    Field(#[from] FieldError),
    #[error("found {0} lines instead of 27")]
    LineCount(usize),
    #[error("a computed line does not lie on the surface")]
    LineNotOnSurface,
    #[error("incidence graph is not isomorphic to the 27-line configuration")]
    NotIsomorphic,
}

/// `D = Q ⊕ Q` or `D = Q(√d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    Split,
    Quadratic(i64),
}

/// Input data. In the split case `u = [u0, u1]` and `f = [f0, f1]`; in the
/// quadratic case the two entries are the rational and `√d` parts.
/// Polynomials are stored constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaleData {
    pub base: Base,
    pub u: [BigRational; 2],
    pub f: [QPoly; 2],
}

#[derive(Serialize, Deserialize)]
struct EtaleJson {
    #[serde(rename = "D")]
    d: serde_json::Value,
    u: Vec<String>,
    /// leading coefficient first
    f: Vec<Vec<String>>,
}

impl EtaleData {
    pub fn split(u0: BigRational, u1: BigRational, f0: QPoly, f1: QPoly) -> Result<EtaleData, DescentError> {
        let e = EtaleData { base: Base::Split, u: [u0, u1], f: [f0, f1] };
        e.validate()?;
        Ok(e)
    }

    /// `u = u[0] + u[1]√d`, `f = f[0] + f[1]√d`.
    pub fn quadratic(d: i64, u: [BigRational; 2], f: [QPoly; 2]) -> Result<EtaleData, DescentError> {
        let e = EtaleData { base: Base::Quadratic(d), u, f };
        e.validate()?;
        Ok(e)
    }

    fn validate(&self) -> Result<(), DescentError> {
        if let Base::Quadratic(d) = self.base {
            let sq_free = d != 0 && d != 1 && (2..=d.unsigned_abs().isqrt() as i64).all(|k| d % (k * k) != 0);
            if !sq_free {
                return Err(DescentError::BadDiscriminant(d));
            }
        }
        let k = self.base_field();
        let [w0, w1] = self.components(&k);
        for (u, f) in [w0, w1] {
            if k.is_zero(&u) {
                return Err(DescentError::ZeroUnit);
            }
            if f.c.len() != 4 {
                return Err(DescentError::NotCubic);
            }
            if !k.pis_squarefree(&f) {
                return Err(DescentError::RepeatedRoot);
            }
        }
        Ok(())
    }

    /// `Q` in the split case, `Q(√d)` with generator `√d` otherwise.
    pub fn base_field(&self) -> NumberField {
        match self.base {
            Base::Split => NumberField::rationals(),
            Base::Quadratic(d) => NumberField::new_unchecked(&QPoly::from_i64(&[-d, 0, 1])),
        }
    }

    /// `(ι_j(u), ι_j(f))` for the two embeddings, as data over the base field.
    pub fn components(&self, k: &NumberField) -> [(Elem, KPoly); 2] {
        match self.base {
            Base::Split => [0, 1].map(|j| (k.from_rational(self.u[j].clone()), k.poly_from_q(&self.f[j]))),
            Base::Quadratic(_) => [BigRational::one(), -BigRational::one()].map(|sign| {
                let conj = |a: &BigRational, b: &BigRational| Elem(vec![a.clone(), b * &sign]);
                let u = conj(&self.u[0], &self.u[1]);
                let n = self.f[0].coeffs().len().max(self.f[1].coeffs().len());
                let f = KPoly::new(k, (0..n).map(|i| conj(&self.f[0].coeff(i), &self.f[1].coeff(i))).collect());
                (u, f)
            }),
        }
    }

    pub fn from_json(s: &str) -> Result<EtaleData, DescentError> {
        let j: EtaleJson = serde_json::from_str(s).map_err(|e| DescentError::Parse(e.to_string()))?;
        let base = if j.d.get("split").and_then(|v| v.as_bool()) == Some(true) {
            Base::Split
        } else if let Some(d) = j.d.get("d").and_then(|v| v.as_i64()) {
            Base::Quadratic(d)
        } else {
            return Err(DescentError::Parse("D must be {\"split\": true} or {\"d\": n}".into()));
        };
        let rat = |s: &String| parse_rational(s).ok_or_else(|| DescentError::Parse(format!("bad rational {s}")));
        if j.u.len() != 2 || j.f.len() != 2 {
            return Err(DescentError::Parse("u and f need two components".into()));
        }
        let u = [rat(&j.u[0])?, rat(&j.u[1])?];
        let poly = |v: &Vec<String>| -> Result<QPoly, DescentError> {
            let mut c = v.iter().map(rat).collect::<Result<Vec<_>, _>>()?;
            c.reverse();
            Ok(QPoly::new(c))
        };
        let f = [poly(&j.f[0])?, poly(&j.f[1])?];
        let e = EtaleData { base, u, f };
        e.validate()?;
        Ok(e)
    }

    pub fn to_json(&self) -> String {
        let d = match self.base {
            Base::Split => serde_json::json!({"split": true}),
            Base::Quadratic(d) => serde_json::json!({ "d": d }),
        };
        let poly = |p: &QPoly| -> Vec<String> {
            let n = p.coeffs().len().max(4);
            (0..n).rev().map(|i| p.coeff(i).to_string()).collect()
        };
        let j = EtaleJson {
            d,
            u: self.u.iter().map(ToString::to_string).collect(),
            f: self.f.iter().map(poly).collect(),
        };
        serde_json::to_string(&j).expect("serializable")
    }

    /// Exchanges the two components of `D` (conjugation in the quadratic case).
    pub fn swapped(&self) -> EtaleData {
        match self.base {
            Base::Split => EtaleData {
                base: Base::Split,
                u: [self.u[1].clone(), self.u[0].clone()],
                f: [self.f[1].clone(), self.f[0].clone()],
            },
            Base::Quadratic(d) => EtaleData {
                base: Base::Quadratic(d),
                u: [self.u[0].clone(), -self.u[1].clone()],
                f: [self.f[0].clone(), self.f[1].neg()],
            },
        }
    }
}

/// `Φ = sqrt_d^k · poly` with `k = 0` (split) or `k = 1` (quadratic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxiliaryPolynomial {
    pub sqrt_d: Option<i64>,
    pub poly: QPoly,
}

impl AuxiliaryPolynomial {
    pub fn rational_part(&self) -> &QPoly {
        &self.poly
    }

    pub fn to_string_var(&self, var: &str) -> String {
        match self.sqrt_d {
            None => self.poly.to_string_var(var),
            Some(d) => format!("sqrt({d})*({})", self.poly.to_string_var(var)),
        }
    }
}

/// `Φ(T) = ι0(f)/(ι0(u) ι0(lc f)) - ι1(f)/(ι1(u) ι1(lc f))`, computed from
/// the coefficients.
pub fn auxiliary_polynomial(e: &EtaleData) -> AuxiliaryPolynomial {
    match e.base {
        Base::Split => {
            let w = |j: usize| e.f[j].scale(&(&e.u[j] * e.f[j].lc()).recip());
            AuxiliaryPolynomial { sqrt_d: None, poly: w(0).sub(&w(1)) }
        }
        Base::Quadratic(d) => {
            let k = e.base_field();
            let (u, f) = e.components(&k)[0].clone();
            let scale = k.inv(&k.mul(&u, f.c.last().expect("cubic")));
            let w = k.pscale(&f, &scale);
            // ι0(w) - ι1(w) = 2√d · (√d-part of w)
            let poly = QPoly::new(w.c.iter().map(|c| &c.0[1] * qi(2)).collect());
            AuxiliaryPolynomial { sqrt_d: Some(d), poly }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubicGaloisType {
    A3,
    S3,
    Reducible,
}

pub fn cubic_galois_type(p: &QPoly) -> CubicGaloisType {
    assert_eq!(p.deg(), 3, "cubic expected");
    if !p.rational_roots().is_empty() {
        return CubicGaloisType::Reducible;
    }
    let disc = p.discriminant();
    let is_square = |x: &BigInt| !x.is_negative() && &(x.sqrt() * x.sqrt()) == x;
    if disc.is_positive() && is_square(disc.numer()) && is_square(disc.denom()) {
        CubicGaloisType::A3
    } else {
        CubicGaloisType::S3
    }
}

/// The model over a field containing `u0, u1, a0..a5`.
#[derive(Clone, Debug)]
pub struct P5Surface {
    pub field: NumberField,
    /// defining polynomials adjoined over the base
    pub tower: Vec<String>,
    /// image of the generator of the base field (`√d` or `0`)
    pub base_image: Elem,
    pub u: [Elem; 2],
    pub a: [Elem; 6],
    pub data: EtaleData,
}

impl P5Surface {
    fn cubic(&self, x: &[Elem]) -> Elem {
        let k = &self.field;
        let p0 = k.mul(&k.mul(&x[0], &x[1]), &x[2]);
        let p1 = k.mul(&k.mul(&x[3], &x[4]), &x[5]);
        k.add(&k.mul(&self.u[0], &p0), &k.mul(&self.u[1], &p1))
    }

    fn hyperplanes(&self) -> [Vec<Elem>; 2] {
        [self.a.to_vec(), vec![self.field.one(); 6]]
    }

    pub fn contains_point(&self, x: &[Elem]) -> bool {
        let k = &self.field;
        let lin = |c: &[Elem]| c.iter().zip(x).fold(k.zero(), |acc, (a, b)| k.add(&acc, &k.mul(a, b)));
        k.is_zero(&self.cubic(x)) && self.hyperplanes().iter().all(|h| k.is_zero(&lin(h)))
    }

    /// `Φ` from the roots: `(1/u0) ∏(a_i + T) - (1/u1) ∏(a_{3+i} + T)` over the field.
    pub fn auxiliary_from_roots(&self) -> KPoly {
        let k = &self.field;
        let prod = |r: &[Elem]| r.iter().fold(k.poly_from_q(&QPoly::one()), |acc, a| k.pmul(&acc, &KPoly::new(k, vec![a.clone(), k.one()])));
        let p0 = k.pscale(&prod(&self.a[..3]), &k.inv(&self.u[0]));
        let p1 = k.pscale(&prod(&self.a[3..]), &k.inv(&self.u[1]));
        k.psub(&p0, &p1)
    }
}

fn cubic_discriminant(k: &NumberField, f: &KPoly) -> Elem {
    let f = k.pmonic(f);
    let (b, c, d) = (&f.c[2], &f.c[1], &f.c[0]);
    let m = |xs: &[&Elem]| xs.iter().fold(k.one(), |acc, x| k.mul(&acc, x));
    let terms = [
        (1, m(&[b, b, c, c])),
        (-4, m(&[c, c, c])),
        (-4, m(&[b, b, b, d])),
        (-27, m(&[d, d])),
        (18, m(&[b, c, d])),
    ];
    terms.iter().fold(k.zero(), |acc, (n, t)| k.add(&acc, &k.scale(t, &qi(*n))))
}

fn is_square_in(k: &NumberField, x: &Elem) -> Result<bool, FieldError> {
    if k.is_zero(x) {
        return Ok(true);
    }
    Ok(!k.roots(&KPoly::new(k, vec![k.neg(x), k.zero(), k.one()]))?.is_empty())
}

/// Certified lower bound on the absolute degree of the splitting field of
/// two cubics over `k`. Exact when both are S3 over `k` with distinct
/// quadratic resolvents, the case where the bound usually bites.
pub fn splitting_degree_lower_bound(k: &NumberField, f0: &KPoly, f1: &KPoly) -> Result<usize, FieldError> {
    let one = |f: &KPoly| -> Result<(usize, Option<Elem>), FieldError> {
        let parts = k.factor(f)?;
        let max_deg = parts.iter().map(|p| p.deg()).max().unwrap_or(1);
        if max_deg < 3 {
            return Ok((max_deg, None));
        }
        let disc = cubic_discriminant(k, f);
        Ok(if is_square_in(k, &disc)? { (3, None) } else { (6, Some(disc)) })
    };
    let (d0, disc0) = one(f0)?;
    let (d1, disc1) = one(f1)?;
    let rel = match (disc0, disc1) {
        (Some(a), Some(b)) if !is_square_in(k, &k.mul(&a, &b))? => 36,
        _ => d0.max(d1),
    };
    Ok(rel * k.degree())
}

/// Builds the model over the splitting field of `f` (both components).
pub fn build_p5_model(e: &EtaleData) -> Result<P5Surface, DescentError> {
    build_p5_model_bounded(e, DEGREE_BOUND)
}

pub fn build_p5_model_bounded(e: &EtaleData, bound: usize) -> Result<P5Surface, DescentError> {
    let k = e.base_field();
    let [(u0, f0), (u1, f1)] = e.components(&k);
    let needed = splitting_degree_lower_bound(&k, &f0, &f1)?;
    if needed > bound {
        return Err(FieldError::DegreeBound { needed, bound }.into());
    }
    let s = splitting_field(&k, &[f0, f1], bound)?;
    let l = &s.field;
    let img = |x: &Elem| k.map_to(x, l, &s.base_image);
    let neg_roots = |j: usize| -> Vec<Elem> { s.roots[j].iter().map(|r| l.neg(r)).collect() };
    let a: Vec<Elem> = neg_roots(0).into_iter().chain(neg_roots(1)).collect();
    Ok(P5Surface {
        field: l.clone(),
        tower: s.tower.clone(),
        base_image: s.base_image.clone(),
        u: [img(&u0), img(&u1)],
        a: a.try_into().expect("three roots each"),
        data: e.clone(),
    })
}

/// Rationality of `Φ` checked from the roots in the splitting field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalityCheck {
    pub rational: bool,
    pub matches_symbolic: bool,
}

pub fn check_rationality(s: &P5Surface) -> RationalityCheck {
    let k = &s.field;
    let phi = s.auxiliary_from_roots();
    let aux = auxiliary_polynomial(&s.data);
    // multiply by √d in the quadratic case
    let scaled = match s.data.base {
        Base::Split => phi,
        Base::Quadratic(_) => k.pscale(&phi, &s.base_image),
    };
    let coeffs: Option<Vec<BigRational>> = scaled.c.iter().map(|c| k.as_rational(c)).collect();
    let rational = coeffs.is_some();
    let matches_symbolic = coeffs.is_some_and(|c| {
        let expected = match s.data.base {
            Base::Split => aux.poly.clone(),
            Base::Quadratic(d) => aux.poly.scale(&qi(d)),
        };
        QPoly::new(c) == expected
    });
    RationalityCheck { rational, matches_symbolic }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineKind {
    /// `X_i = X_j = 0`
    Obvious { i: usize, j: usize },
    /// `Z_0 + Z_ρ(0) = Z_1 + Z_ρ(1) = 0` for the zero `λ = lambdas[lambda]`
    NonObvious { lambda: usize, rho: [usize; 3] },
}

#[derive(Clone, Debug)]
pub struct ModelLine {
    pub kind: LineKind,
    pub span: [Vec<Elem>; 2],
}

/// The 27 lines with incidence and a label isomorphism to the abstract configuration.
#[derive(Clone, Debug)]
pub struct ModelLines {
    pub surface: P5Surface,
    pub lambdas: Vec<Elem>,
    pub lines: Vec<ModelLine>,
    pub incidence: Vec<Vec<bool>>,
    /// `labels[m]` is the abstract line index of model line `m`
    pub labels: Vec<usize>,
}

fn rho_list() -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for a in 3..6 {
        for b in 3..6 {
            for c in 3..6 {
                if a != b && b != c && a != c {
                    v.push([a, b, c]);
                }
            }
        }
    }
    v
}

fn line_from_equations(s: &P5Surface, eqs: Vec<Vec<Elem>>) -> Result<[Vec<Elem>; 2], DescentError> {
    let k = &s.field;
    let mut m = eqs;
    m.extend(s.hyperplanes());
    let ker = k.kernel(&m, 6);
    if ker.len() != 2 {
        return Err(DescentError::LineNotOnSurface);
    }
    Ok([ker[0].clone(), ker[1].clone()])
}

fn line_on_surface(s: &P5Surface, span: &[Vec<Elem>; 2]) -> bool {
    let k = &s.field;
    let comb = |x: i64, y: i64| -> Vec<Elem> {
        (0..6).map(|i| k.add(&k.scale(&span[0][i], &qi(x)), &k.scale(&span[1][i], &qi(y)))).collect()
    };
    [(1, 0), (0, 1), (1, 1), (1, -1)].iter().all(|&(x, y)| s.contains_point(&comb(x, y)))
}

fn spans_meet(k: &NumberField, a: &[Vec<Elem>; 2], b: &[Vec<Elem>; 2]) -> bool {
    k.rank(&[a[0].clone(), a[1].clone(), b[0].clone(), b[1].clone()]) < 4
}

fn same_line(k: &NumberField, a: &[Vec<Elem>; 2], b: &[Vec<Elem>; 2]) -> bool {
    k.rank(&[a[0].clone(), a[1].clone(), b[0].clone(), b[1].clone()]) == 2
}

/// Computes the 27 lines; extends the field by the zeros of `Φ` if needed.
pub fn lines_of_model(s: &P5Surface) -> Result<ModelLines, DescentError> {
    lines_of_model_bounded(s, DEGREE_BOUND)
}

pub fn lines_of_model_bounded(s: &P5Surface, bound: usize) -> Result<ModelLines, DescentError> {
    let phi = s.auxiliary_from_roots();
    let sf = splitting_field(&s.field, &[phi], bound)?;
    let l = sf.field.clone();
    let m = |x: &Elem| s.field.map_to(x, &l, &sf.base_image);
    let mut tower = s.tower.clone();
    tower.extend(sf.tower.iter().cloned());
    let surface = P5Surface {
        field: l.clone(),
        tower,
        base_image: m(&s.base_image),
        u: [m(&s.u[0]), m(&s.u[1])],
        a: s.a.clone().map(|x| m(&x)),
        data: s.data.clone(),
    };
    let lambdas = sf.roots[0].clone();
    let k = &surface.field;
    let unit = |i: usize| -> Vec<Elem> { (0..6).map(|j| if i == j { k.one() } else { k.zero() }).collect() };
    let mut lines = Vec::new();
    for i in 0..3 {
        for j in 3..6 {
            let span = line_from_equations(&surface, vec![unit(i), unit(j)])?;
            lines.push(ModelLine { kind: LineKind::Obvious { i, j }, span });
        }
    }
    // Z_i as linear forms in X
    let signs: [[i64; 3]; 3] = [[-1, 1, 1], [1, -1, 1], [1, 1, -1]];
    for (li, lam) in lambdas.iter().enumerate() {
        let y: Vec<Elem> = surface.a.iter().map(|a| k.add(a, lam)).collect();
        let z = |idx: usize| -> Vec<Elem> {
            let block = if idx < 3 { 0 } else { 3 };
            let row = signs[idx - block];
            (0..6)
                .map(|c| if c >= block && c < block + 3 { k.scale(&y[c], &qi(row[c - block])) } else { k.zero() })
                .collect()
        };
        let add = |a: &[Elem], b: &[Elem]| -> Vec<Elem> { a.iter().zip(b).map(|(x, y)| k.add(x, y)).collect() };
        for rho in rho_list() {
            let e1 = add(&z(0), &z(rho[0]));
            let e2 = add(&z(1), &z(rho[1]));
            let span = line_from_equations(&surface, vec![e1, e2])?;
            lines.push(ModelLine { kind: LineKind::NonObvious { lambda: li, rho }, span });
        }
    }
    if lines.len() != N_LINES {
        return Err(DescentError::LineCount(lines.len()));
    }
    for line in &lines {
        if !line_on_surface(&surface, &line.span) {
            return Err(DescentError::LineNotOnSurface);
        }
    }
    for a in 0..N_LINES {
        for b in a + 1..N_LINES {
            if same_line(k, &lines[a].span, &lines[b].span) {
                return Err(DescentError::LineCount(N_LINES - 1));
            }
        }
    }
    let mut incidence = vec![vec![false; N_LINES]; N_LINES];
    for a in 0..N_LINES {
        for b in a + 1..N_LINES {
            let meet = spans_meet(k, &lines[a].span, &lines[b].span);
            incidence[a][b] = meet;
            incidence[b][a] = meet;
        }
    }
    let labels = label_isomorphism(&incidence).ok_or(DescentError::NotIsomorphic)?;
    Ok(ModelLines { surface, lambdas, lines, incidence, labels })
}

/// Graph isomorphism from an incidence graph on 27 vertices onto the abstract
/// intersection graph, by backtracking.
pub fn label_isomorphism(incidence: &[Vec<bool>]) -> Option<Vec<usize>> {
    let cfg = Configuration::get();
    let n = incidence.len();
    if n != N_LINES || incidence.iter().any(|r| r.iter().filter(|&&b| b).count() != 10) {
        return None;
    }
    let abs = |x: usize, y: usize| x != y && cfg.meet(x, y) == 1;
    // order: BFS from vertex 0 so each vertex has an assigned neighbour early
    let mut order = vec![0usize];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for w in 0..n {
            if incidence[v][w] && !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
        i += 1;
    }
    if order.len() != n {
        return None;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        depth: usize,
        order: &[usize],
        inc: &[Vec<bool>],
        abs: &dyn Fn(usize, usize) -> bool,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for cand in 0..inc.len() {
            if used[cand] {
                continue;
            }
            let ok = order[..depth].iter().all(|&w| inc[v][w] == abs(cand, map[w]));
            if !ok {
                continue;
            }
            map[v] = cand;
            used[cand] = true;
            if rec(depth + 1, order, inc, abs, map, used) {
                return true;
            }
            used[cand] = false;
            map[v] = usize::MAX;
        }
        false
    }
    rec(0, &order, incidence, &abs, &mut map, &mut used).then_some(map)
}

/// Structural facts about the model's lines.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigurationCheck {
    pub lines: usize,
    pub each_meets_ten: bool,
    pub self_intersection_minus_one: bool,
    pub triangles: usize,
    pub triangles_are_planes: bool,
    pub obvious_form_steiner_pair: bool,
    /// for each pair of zeros of Φ, whether its 12 lines form a double-six
    pub non_obvious_double_sixes: Vec<bool>,
}

impl ConfigurationCheck {
    pub fn ok(&self) -> bool {
        self.lines == 27
            && self.each_meets_ten
            && self.self_intersection_minus_one
            && self.triangles == 45
            && self.triangles_are_planes
            && self.obvious_form_steiner_pair
            && self.non_obvious_double_sixes.iter().all(|&b| b)
    }
}

pub fn check_configuration(ml: &ModelLines) -> ConfigurationCheck {
    let cfg = Configuration::get();
    let inc = &ml.incidence;
    let each_meets_ten = inc.iter().all(|r| r.iter().filter(|&&b| b).count() == 10);
    let self_intersection_minus_one = ml.labels.iter().all(|&x| {
        let c = crate::lines27::LineLabel::from_index(x).pic_class();
        crate::lines27::pairing(&c, &c) == -1
    });
    let mut triangles = 0;
    let mut planes_ok = true;
    for a in 0..N_LINES {
        for b in a + 1..N_LINES {
            for c in b + 1..N_LINES {
                if inc[a][b] && inc[b][c] && inc[a][c] {
                    triangles += 1;
                    let p = [ml.labels[a], ml.labels[b], ml.labels[c]].map(|x| x as u8);
                    planes_ok &= cfg.is_plane(&p);
                }
            }
        }
    }
    let obvious: Vec<u8> = ml
        .lines
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l.kind, LineKind::Obvious { .. }))
        .map(|(i, _)| ml.labels[i] as u8)
        .collect();
    let obvious_form_steiner_pair = cfg.pair_by_lines(&obvious).is_some();
    let double_six_sets: BTreeSet<Vec<u8>> = cfg
        .double_sixes()
        .iter()
        .map(|d| {
            let mut v = d.lines().to_vec();
            v.sort_unstable();
            v
        })
        .collect();
    let mut non_obvious_double_sixes = Vec::new();
    let nl = ml.lambdas.len();
    for x in 0..nl {
        for y in x + 1..nl {
            let mut v: Vec<u8> = ml
                .lines
                .iter()
                .enumerate()
                .filter(|(_, l)| matches!(l.kind, LineKind::NonObvious { lambda, .. } if lambda == x || lambda == y))
                .map(|(i, _)| ml.labels[i] as u8)
                .collect();
            v.sort_unstable();
            non_obvious_double_sixes.push(double_six_sets.contains(&v));
        }
    }
    ConfigurationCheck {
        lines: ml.lines.len(),
        each_meets_ten,
        self_intersection_minus_one,
        triangles,
        triangles_are_planes: planes_ok,
        obvious_form_steiner_pair,
        non_obvious_double_sixes,
    }
}

/// Action of one field automorphism on the model lines.
#[derive(Clone, Debug)]
pub struct LineAction {
    /// image of the field generator
    pub sigma: Elem,
    /// `a_{π(i)} = σ(a_i)`
    pub pi: [usize; 6],
    /// permutation of the model lines
    pub on_model: Vec<usize>,
    /// the same permutation on abstract labels
    pub on_labels: Perm,
    /// `σ(L_{i,j}) = L_{π(i),π(j)}` holds for the obvious lines
    pub obvious_rule: bool,
}

/// Galois action of the automorphisms of the line field, via `π_σ ∘ t_σ`.
pub fn galois_action(ml: &ModelLines) -> Result<Vec<LineAction>, DescentError> {
    let s = &ml.surface;
    let k = &s.field;
    let mut out = Vec::new();
    for sigma in k.automorphisms()? {
        let ap = |x: &Elem| k.map_to(x, k, &sigma);
        let pi: Vec<usize> = (0..6)
            .map(|i| {
                let img = ap(&s.a[i]);
                (0..6).find(|&j| s.a[j] == img).ok_or(DescentError::LineNotOnSurface)
            })
            .collect::<Result<_, _>>()?;
        let pi: [usize; 6] = pi.try_into().expect("six");
        let transform = |v: &Vec<Elem>| -> Vec<Elem> {
            let mut y = vec![k.zero(); 6];
            for i in 0..6 {
                y[pi[i]] = ap(&v[i]);
            }
            y
        };
        let mut on_model = Vec::with_capacity(N_LINES);
        for line in &ml.lines {
            let img = [transform(&line.span[0]), transform(&line.span[1])];
            let idx = ml
                .lines
                .iter()
                .position(|l| same_line(k, &l.span, &img))
                .ok_or(DescentError::LineNotOnSurface)?;
            on_model.push(idx);
        }
        let mut labels = vec![0usize; N_LINES];
        for (m, &img) in on_model.iter().enumerate() {
            labels[ml.labels[m]] = ml.labels[img];
        }
        let on_labels = Perm::from_images(labels).map_err(|_| DescentError::NotIsomorphic)?;
        let obvious_rule = ml.lines.iter().enumerate().all(|(m, l)| match l.kind {
            LineKind::Obvious { i, j } => {
                let (pi_i, pi_j) = (pi[i].min(pi[j]), pi[i].max(pi[j]));
                matches!(ml.lines[on_model[m]].kind, LineKind::Obvious { i: a, j: b } if a == pi_i && b == pi_j)
            }
            _ => true,
        });
        out.push(LineAction { sigma, pi, on_model, on_labels, obvious_rule });
    }
    Ok(out)
}

/// Summary of the Galois action when the line field is Galois over Q.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaloisSummary {
    pub field_degree: usize,
    pub automorphisms: usize,
    pub is_galois: bool,
    pub group_order: u64,
    pub orbit_structure: Vec<usize>,
    pub h1_invariant_factors: Vec<u64>,
    pub obvious_rule: bool,
}

pub fn galois_summary(ml: &ModelLines) -> Result<GaloisSummary, DescentError> {
    let acts = galois_action(ml)?;
    let gens: Vec<Perm> = acts.iter().map(|a| a.on_labels.clone()).collect();
    let g = PermGroup::new(N_LINES, gens).map_err(|_| DescentError::NotIsomorphic)?;
    let h1 = galcoh::h1(&g).map_err(|_| DescentError::NotIsomorphic)?;
    Ok(GaloisSummary {
        field_degree: ml.surface.field.degree(),
        automorphisms: acts.len(),
        is_galois: acts.len() == ml.surface.field.degree(),
        group_order: g.order(),
        orbit_structure: g.orbit_structure(),
        h1_invariant_factors: h1.invariant_factors(),
        obvious_rule: acts.iter().all(|a| a.obvious_rule),
    })
}

/// Field over which the three double-sixes of the non-obvious lines are
/// each Galois invariant, compared with the splitting field of `Φ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DoubleSixField {
    /// order of the subgroup of `Aut(L)` fixing each double-six
    pub fixing_subgroup_order: usize,
    /// degree over Q of its fixed field (valid when `L/Q` is Galois)
    pub degree: usize,
    /// degree over Q of the splitting field of `Φ` (of `√d Φ` in the quadratic case)
    pub phi_splitting_degree: usize,
    /// image of the Galois group in the permutations of the zeros of `Φ`
    pub galois_on_zeros: usize,
    pub equal: bool,
}

pub fn splitting_field_of_double_sixes(ml: &ModelLines) -> Result<DoubleSixField, DescentError> {
    let acts = galois_action(ml)?;
    let nl = ml.lambdas.len();
    let six_sets: Vec<BTreeSet<usize>> = (0..nl)
        .flat_map(|x| (x + 1..nl).map(move |y| (x, y)))
        .map(|(x, y)| {
            ml.lines
                .iter()
                .enumerate()
                .filter(|(_, l)| matches!(l.kind, LineKind::NonObvious { lambda, .. } if lambda == x || lambda == y))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let fixing = acts
        .iter()
        .filter(|a| six_sets.iter().all(|s| s.iter().map(|&i| a.on_model[i]).collect::<BTreeSet<_>>() == *s))
        .count();
    let k = &ml.surface.field;
    let mut zero_perms = BTreeSet::new();
    for a in &acts {
        let p: Vec<usize> = ml
            .lambdas
            .iter()
            .map(|l| {
                let img = k.map_to(l, k, &a.sigma);
                ml.lambdas.iter().position(|m| *m == img).expect("zeros permuted")
            })
            .collect();
        zero_perms.insert(p);
    }
    let aux = auxiliary_polynomial(&ml.surface.data);
    let q = NumberField::rationals();
    let phi_split = splitting_field(&q, &[q.poly_from_q(&aux.poly)], DEGREE_BOUND)?;
    let degree = acts.len() / fixing;
    Ok(DoubleSixField {
        fixing_subgroup_order: fixing,
        degree,
        phi_splitting_degree: phi_split.field.degree(),
        galois_on_zeros: zero_perms.len(),
        equal: degree == phi_split.field.degree(),
    })
}

/// The example data sets.
pub mod examples {
    use super::*;
    use crate::poly::q;

    pub fn example1() -> EtaleData {
        EtaleData::split(qi(1), q(1, 2), QPoly::from_i64(&[1, 9, 6, 1]), QPoly::new(vec![qi(0), q(9, 2), q(9, 2), qi(1)]))
            .expect("valid")
    }

    pub fn example2() -> EtaleData {
        EtaleData::split(q(-1, 3), qi(1), QPoly::new(vec![q(1, 3), qi(-1), qi(0), qi(1)]), QPoly::from_i64(&[1, -4, 3, 1]))
            .expect("valid")
    }

    pub fn example3() -> EtaleData {
        EtaleData::split(
            q(13, 7),
            q(-31, 169),
            QPoly::new(vec![q(-1049, 7), qi(85), qi(-16), qi(1)]),
            QPoly::new(vec![qi(-47), q(1216, 31), q(-337, 31), qi(1)]),
        )
        .expect("valid")
    }

    /// `D = Q(√7)`, `u = 1/(-1 + 2√7) = (1 + 2√7)/27`.
    pub fn example4() -> EtaleData {
        EtaleData::quadratic(
            7,
            [q(1, 27), q(2, 27)],
            [QPoly::from_i64(&[-1, -2, 1, -1]), QPoly::from_i64(&[2, 1, 2, 2])],
        )
        .expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::poly::q;

    #[test]
    fn example_aux_polynomials() {
        assert_eq!(auxiliary_polynomial(&example1()).poly, QPoly::from_i64(&[1, 0, -3, -1]));
        assert_eq!(auxiliary_polynomial(&example2()).poly, QPoly::from_i64(&[-2, 7, -3, -4]));
        let a4 = auxiliary_polynomial(&example4());
        assert_eq!(a4.sqrt_d, Some(7));
        assert_eq!(a4.poly, QPoly::new(vec![qi(1), q(1, 2), qi(1), qi(1)]).scale(&qi(4)));
    }

    #[test]
    fn example3_aux() {
        let e = example3();
        let p = auxiliary_polynomial(&e).poly;
        assert_eq!(p.coeff(3), q(2414, 403));
        assert_eq!(p.coeff(2), q(-848021, 12493));
        let oracle = e.f[0].scale(&q(7, 13)).add(&e.f[1].scale(&q(169, 31)));
        assert_eq!(p, oracle);
    }

    #[test]
    fn galois_types() {
        assert_eq!(cubic_galois_type(&QPoly::from_i64(&[1, 0, -3, -1])), CubicGaloisType::A3);
        assert_eq!(cubic_galois_type(&QPoly::from_i64(&[-1, 0, 0, 1])), CubicGaloisType::Reducible);
        assert_eq!(cubic_galois_type(&QPoly::from_i64(&[-2, 0, 0, 1])), CubicGaloisType::S3);
    }

    #[test]
    fn json_round_trip() {
        for e in [example1(), example4()] {
            assert_eq!(EtaleData::from_json(&e.to_json()).unwrap(), e);
        }
        assert!(EtaleData::from_json(r#"{"D":{"split":true},"u":["0","1"],"f":[["1","0","0","1"],["1","0","0","2"]]}"#).is_err());
    }

    #[test]
    fn rejects_repeated_roots() {
        let f = QPoly::from_i64(&[0, 0, 1, 1]);
        assert_eq!(EtaleData::split(qi(1), qi(1), f.clone(), QPoly::from_i64(&[1, 0, 0, 1])), Err(DescentError::RepeatedRoot));
    }

    #[test]
    fn example1_model_field() {
        let s = build_p5_model(&example1()).unwrap();
        assert_eq!(s.field.degree(), 3);
        let r = check_rationality(&s);
        assert!(r.rational && r.matches_symbolic);
    }
}
