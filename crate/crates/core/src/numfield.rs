//! Absolute number fields `Q(θ)`, polynomials over them, Trager
//! factorization, simple extensions flattened to a primitive element, and
//! splitting fields under a degree bound.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{self, is_squarefree_fast, qi, FpPoly, QPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("defining polynomial {0} is not irreducible over Q")]
    Reducible(String),
    #[error("field degree {needed} exceeds the bound {bound}")]
    DegreeBound { needed: usize, bound: usize },
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial is not irreducible over the field")]
    NotIrreducible,
}

/// Element of a number field: coordinates in the power basis `1, θ, …, θ^(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub Vec<BigRational>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    modulus: QPoly,
}

impl NumberField {
    /// `Q` as the field defined by `x`.
    pub fn rationals() -> NumberField {
        NumberField { modulus: QPoly::x() }
    }

    /// `Q[x]/(m)`; `m` is made monic and certified irreducible.
    pub fn new(m: &QPoly) -> Result<NumberField, FieldError> {
        if !poly::is_irreducible(m) {
            return Err(FieldError::Reducible(m.to_string()));
        }
        Ok(NumberField { modulus: m.monic() })
    }

    pub fn new_unchecked(m: &QPoly) -> NumberField {
        NumberField { modulus: m.monic() }
    }

    pub fn modulus(&self) -> &QPoly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    fn reduce(&self, p: &QPoly) -> Elem {
        let r = if p.degree().is_some_and(|d| d >= self.degree()) { p.rem(&self.modulus) } else { p.clone() };
        let mut v: Vec<BigRational> = r.coeffs().to_vec();
        v.resize(self.degree(), BigRational::zero());
        Elem(v)
    }

    fn as_poly(&self, a: &Elem) -> QPoly {
        QPoly::new(a.0.clone())
    }

    pub fn zero(&self) -> Elem {
        Elem(vec![BigRational::zero(); self.degree()])
    }

    pub fn one(&self) -> Elem {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, a: BigRational) -> Elem {
        let mut v = vec![BigRational::zero(); self.degree()];
        v[0] = a;
        Elem(v)
    }

    pub fn from_int(&self, a: i64) -> Elem {
        self.from_rational(qi(a))
    }

    /// The generator `θ`.
    pub fn gen(&self) -> Elem {
        self.reduce(&QPoly::x())
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.0.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self, a: &Elem) -> Option<BigRational> {
        a.0[1..].iter().all(Zero::is_zero).then(|| a.0[0].clone())
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        Elem(a.0.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &Elem, c: &BigRational) -> Elem {
        Elem(a.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let n = self.degree();
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        // integer arithmetic with a single denominator, fraction-free reduction
        let (az, da) = integral(&a.0);
        let (bz, db) = integral(&b.0);
        let mut p = vec![BigInt::zero(); 2 * n - 1];
        for (i, x) in az.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in bz.iter().enumerate() {
                p[i + j] += x * y;
            }
        }
        let (mz, _) = integral(self.modulus.coeffs());
        let c = &mz[n];
        let mut den = da * db;
        for k in (n..2 * n - 1).rev() {
            if p[k].is_zero() {
                continue;
            }
            let f = std::mem::take(&mut p[k]);
            if !c.is_one() {
                for x in p[..k].iter_mut() {
                    *x *= c;
                }
                den *= c;
            }
            for (j, mj) in mz[..n].iter().enumerate() {
                p[k - n + j] -= &f * mj;
            }
        }
        Elem(p[..n].iter().map(|x| BigRational::new(x.clone(), den.clone())).collect())
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        assert!(!self.is_zero(a), "inverse of zero");
        if self.degree() == 1 {
            return self.from_rational(a.0[0].recip());
        }
        self.inv_modular(a)
    }

    /// Inverse by modular images, Chinese remaindering and rational
    /// reconstruction, confirmed by one exact multiplication.
    fn inv_modular(&self, a: &Elem) -> Elem {
        let n = self.degree();
        let mut modulus = BigInt::one();
        let mut acc = vec![BigInt::zero(); n];
        let mut next_check = 2usize;
        let mut used = 0usize;
        for p in poly::big_primes() {
            let mp: Option<Vec<u64>> = self.modulus.coeffs().iter().map(|c| poly::rational_mod(c, p)).collect();
            let ap: Option<Vec<u64>> = a.0.iter().map(|c| poly::rational_mod(c, p)).collect();
            let (Some(mp), Some(ap)) = (mp, ap) else { continue };
            let (g, s, _) = FpPoly::new(p, ap).ext_gcd(&FpPoly::new(p, mp));
            if g.deg() != 0 {
                continue;
            }
            let pb = BigInt::from(p);
            let inv = BigInt::from(poly::mod_inv(poly::reduce_mod(&modulus, p), p));
            for (k, slot) in acc.iter_mut().enumerate() {
                let ck = s.c.get(k).copied().unwrap_or(0);
                let cur = poly::reduce_mod(slot, p);
                let t = ((BigInt::from(ck) - BigInt::from(cur)) * &inv).mod_floor(&pb);
                *slot += &modulus * t;
            }
            modulus *= pb;
            used += 1;
            if used == next_check {
                next_check *= 2;
                let cand: Option<Vec<BigRational>> = acc.iter().map(|c| poly::rational_reconstruct(c, &modulus)).collect();
                if let Some(c) = cand {
                    let b = Elem(c);
                    if self.mul(a, &b) == self.one() {
                        return b;
                    }
                }
            }
        }
        unreachable!("word primes are unbounded")
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Elem {
        self.mul(a, &self.inv(b))
    }

    pub fn pow(&self, a: &Elem, e: u32) -> Elem {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// `Norm_{K/Q}(a) = Res(m, a(y))` for monic `m`.
    pub fn norm(&self, a: &Elem) -> BigRational {
        if self.degree() == 1 {
            return a.0[0].clone();
        }
        poly::norm_poly(&self.modulus, std::slice::from_ref(&a.0)).coeff(0)
    }

    /// Evaluates a rational polynomial at an element.
    pub fn eval_q(&self, p: &QPoly, a: &Elem) -> Elem {
        p.coeffs().iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, a), &self.from_rational(c.clone())))
    }

    /// Image of `a` under `θ -> t` into another field.
    pub fn map_to(&self, a: &Elem, target: &NumberField, t: &Elem) -> Elem {
        target.eval_q(&self.as_poly(a), t)
    }

    pub fn fmt_elem(&self, a: &Elem, var: &str) -> String {
        QPoly::new(a.0.clone()).to_string_var(var)
    }

    // -----------------------------------------------------------------------
    // polynomials over the field

    pub fn fmt_kpoly(&self, a: &KPoly, var: &str, gen: &str) -> String {
        let mut terms = Vec::new();
        for (i, c) in a.c.iter().enumerate().rev() {
            if self.is_zero(c) {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let coef = self.fmt_elem(c, gen);
            terms.push(match (coef.as_str(), i) {
                ("1", i) if i > 0 => mono,
                (_, 0) => format!("({coef})"),
                _ => format!("({coef})*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn poly_from_q(&self, p: &QPoly) -> KPoly {
        KPoly::new(self, p.coeffs().iter().map(|c| self.from_rational(c.clone())).collect())
    }

    pub fn padd(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let n = a.c.len().max(b.c.len());
        let z = self.zero();
        KPoly::new(self, (0..n).map(|i| self.add(a.c.get(i).unwrap_or(&z), b.c.get(i).unwrap_or(&z))).collect())
    }

    pub fn psub(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let n = a.c.len().max(b.c.len());
        let z = self.zero();
        KPoly::new(self, (0..n).map(|i| self.sub(a.c.get(i).unwrap_or(&z), b.c.get(i).unwrap_or(&z))).collect())
    }

    pub fn pmul(&self, a: &KPoly, b: &KPoly) -> KPoly {
        if a.c.is_empty() || b.c.is_empty() {
            return KPoly { c: vec![] };
        }
        let mut r = vec![self.zero(); a.c.len() + b.c.len() - 1];
        for (i, x) in a.c.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                r[i + j] = self.add(&r[i + j], &self.mul(x, y));
            }
        }
        KPoly::new(self, r)
    }

    pub fn pscale(&self, a: &KPoly, c: &Elem) -> KPoly {
        KPoly::new(self, a.c.iter().map(|x| self.mul(x, c)).collect())
    }

    pub fn pdivrem(&self, a: &KPoly, d: &KPoly) -> (KPoly, KPoly) {
        let dd = d.deg();
        if a.c.len() <= dd {
            return (KPoly { c: vec![] }, a.clone());
        }
        let inv = self.inv(d.c.last().expect("non-zero"));
        let mut r = a.c.clone();
        let mut qc = vec![self.zero(); a.c.len() - dd];
        for k in (0..qc.len()).rev() {
            let coef = self.mul(&r[k + dd], &inv);
            if !self.is_zero(&coef) {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] = self.sub(&r[k + j], &self.mul(&coef, dj));
                }
            }
            qc[k] = coef;
        }
        r.truncate(dd);
        (KPoly::new(self, qc), KPoly::new(self, r))
    }

    pub fn pmonic(&self, a: &KPoly) -> KPoly {
        let inv = self.inv(a.c.last().expect("non-zero"));
        self.pscale(a, &inv)
    }

    pub fn pgcd(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.c.is_empty() {
            let r = self.pdivrem(&a, &b).1;
            a = b;
            b = if r.c.is_empty() { r } else { self.pmonic(&r) };
        }
        if a.c.is_empty() {
            a
        } else {
            self.pmonic(&a)
        }
    }

    pub fn pderivative(&self, a: &KPoly) -> KPoly {
        KPoly::new(self, a.c.iter().enumerate().skip(1).map(|(i, x)| self.scale(x, &qi(i as i64))).collect())
    }

    pub fn peval(&self, a: &KPoly, x: &Elem) -> Elem {
        a.c.iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    /// `a(x + c)`
    pub fn pshift(&self, a: &KPoly, c: &Elem) -> KPoly {
        let lin = KPoly::new(self, vec![c.clone(), self.one()]);
        a.c.iter().rev().fold(KPoly { c: vec![] }, |acc, x| self.padd(&self.pmul(&acc, &lin), &KPoly::new(self, vec![x.clone()])))
    }

    pub fn pis_squarefree(&self, a: &KPoly) -> bool {
        self.pgcd(a, &self.pderivative(a)).deg() == 0
    }

    /// Maps a polynomial into another field along `θ -> t`.
    pub fn pmap_to(&self, a: &KPoly, target: &NumberField, t: &Elem) -> KPoly {
        KPoly::new(target, a.c.iter().map(|x| self.map_to(x, target, t)).collect())
    }

    /// `Norm_{K/Q}` of a polynomial over `K`, by evaluation and interpolation.
    pub fn pnorm(&self, a: &KPoly) -> QPoly {
        if self.degree() == 1 {
            return QPoly::new(a.c.iter().map(|x| x.0[0].clone()).collect());
        }
        let cols: Vec<Vec<BigRational>> = a.c.iter().map(|x| x.0.clone()).collect();
        poly::norm_poly(&self.modulus, &cols)
    }

    /// Trager factorization of a squarefree polynomial into monic irreducible
    /// factors, sorted deterministically.
    pub fn factor(&self, a: &KPoly) -> Result<Vec<KPoly>, FieldError> {
        if a.deg() == 0 {
            return Ok(vec![]);
        }
        if a.deg() == 1 {
            return Ok(vec![self.pmonic(a)]);
        }
        if !self.pis_squarefree(a) {
            return Err(FieldError::NotSquarefree);
        }
        let theta = self.gen();
        for s in shifts() {
            // g(x) = a(x - sθ)
            let shift = self.scale(&theta, &qi(-s));
            let g = self.pshift(a, &shift);
            let nrm = self.pnorm(&g);
            if !is_squarefree_fast(&nrm) {
                continue;
            }
            let mut out = Vec::new();
            for (ni, _) in poly::factor(&nrm) {
                let h = self.pgcd(&self.poly_from_q(&ni), &g);
                if h.deg() > 0 {
                    out.push(self.pshift(&h, &self.neg(&shift)));
                }
            }
            out.sort_by(|x, y| (x.deg(), &x.c).cmp(&(y.deg(), &y.c)));
            return Ok(out);
        }
        unreachable!("some shift gives a squarefree norm")
    }

    /// Roots in the field of a squarefree polynomial.
    pub fn roots(&self, a: &KPoly) -> Result<Vec<Elem>, FieldError> {
        Ok(self
            .factor(a)?
            .into_iter()
            .filter(|f| f.deg() == 1)
            .map(|f| self.neg(&f.c[0]))
            .collect())
    }

    /// Adjoins a root of `h`, irreducible over this field. Returns the new
    /// field `L = Q(γ)`, `γ = β + sθ`, with the images of `θ` and of the root `β`.
    pub fn extend(&self, h: &KPoly, bound: usize) -> Result<Extension, FieldError> {
        let h = self.pmonic(h);
        let n = self.degree();
        let d = h.deg();
        if n * d > bound {
            return Err(FieldError::DegreeBound { needed: n * d, bound });
        }
        let theta = self.gen();
        for s in shifts() {
            let shift = self.scale(&theta, &qi(-s));
            let g = self.pshift(&h, &shift);
            let nrm = self.pnorm(&g);
            if !is_squarefree_fast(&nrm) {
                continue;
            }
            if !poly::is_irreducible(&nrm) {
                return Err(FieldError::NotIrreducible);
            }
            let field = NumberField { modulus: nrm.monic() };
            // tower arithmetic in K[β]/(h): elements are vectors of d field elements
            let tower_mul = |a: &KPoly, b: &KPoly| self.pdivrem(&self.pmul(a, b), &h).1;
            let gamma = KPoly::new(self, vec![self.scale(&theta, &qi(s)), self.one()]);
            let mut powers = vec![KPoly::new(self, vec![self.one()])];
            for _ in 1..n * d {
                let next = tower_mul(powers.last().expect("non-empty"), &gamma);
                powers.push(next);
            }
            let coords = |t: &KPoly| -> Vec<BigRational> {
                let mut v = Vec::with_capacity(n * d);
                for j in 0..d {
                    let e = t.c.get(j).cloned().unwrap_or_else(|| self.zero());
                    v.extend(e.0);
                }
                v
            };
            let cols: Vec<Vec<BigRational>> = powers.iter().map(coords).collect();
            let theta_t = coords(&KPoly::new(self, vec![theta.clone()]));
            let beta_t = coords(&KPoly::new(self, vec![self.zero(), self.one()]));
            let mut rhs: Vec<Vec<BigRational>> = (0..n)
                .map(|k| (0..n * d).map(|i| if i == k { BigRational::one() } else { BigRational::zero() }).collect())
                .collect();
            rhs.push(theta_t);
            rhs.push(beta_t);
            let mut sol: Vec<Elem> = solve_columns(&cols, &rhs).into_iter().map(Elem).collect();
            let root = sol.pop().expect("beta");
            let theta_image = sol.pop().expect("theta");
            return Ok(Extension { field, theta_image, root, power_images: sol });
        }
        unreachable!("some shift gives a squarefree norm")
    }

    /// Embeddings of this field into `target`: images of `θ`.
    pub fn embeddings_into(&self, target: &NumberField) -> Result<Vec<Elem>, FieldError> {
        target.roots(&target.poly_from_q(&self.modulus))
    }

    /// Automorphisms as images of the generator.
    pub fn automorphisms(&self) -> Result<Vec<Elem>, FieldError> {
        self.embeddings_into(self)
    }

    // -----------------------------------------------------------------------
    // linear algebra

    /// Row echelon form in place; returns pivot columns.
    pub fn row_reduce(&self, m: &mut [Vec<Elem>]) -> Vec<usize> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !self.is_zero(&m[i][c])) else { continue };
            m.swap(r, p);
            let inv = self.inv(&m[r][c]);
            for j in c..cols {
                m[r][j] = self.mul(&m[r][j], &inv);
            }
            for i in 0..rows {
                if i != r && !self.is_zero(&m[i][c]) {
                    let f = m[i][c].clone();
                    for j in c..cols {
                        let t = self.mul(&f, &m[r][j]);
                        m[i][j] = self.sub(&m[i][j], &t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self, m: &[Vec<Elem>]) -> usize {
        let mut m = m.to_vec();
        self.row_reduce(&mut m).len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self, m: &[Vec<Elem>], cols: usize) -> Vec<Vec<Elem>> {
        let mut a = m.to_vec();
        let pivots = self.row_reduce(&mut a);
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.zero(); cols];
                v[f] = self.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = self.neg(&a[r][f]);
                }
                v
            })
            .collect()
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[t]/({})", self.modulus.to_string_var("t"))
    }
}

fn shifts() -> impl Iterator<Item = i64> {
    (0..64).map(|k| if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 })
}

/// Integer numerators over a common denominator.
fn integral(v: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = v.iter().fold(BigInt::one(), |acc, x| if x.denom().is_one() { acc } else { acc.lcm(x.denom()) });
    (v.iter().map(|x| x.numer() * (&den / x.denom())).collect(), den)
}

/// Result of a simple extension.
#[derive(Clone, Debug)]
pub struct Extension {
    pub field: NumberField,
    pub theta_image: Elem,
    pub root: Elem,
    /// images of `1, θ, …, θ^(n-1)`
    pub power_images: Vec<Elem>,
}

impl Extension {
    /// Image of an element of the smaller field.
    pub fn map(&self, a: &Elem) -> Elem {
        let k = &self.field;
        a.0.iter().zip(&self.power_images).fold(k.zero(), |acc, (c, img)| if c.is_zero() { acc } else { k.add(&acc, &k.scale(img, c)) })
    }

    pub fn map_poly(&self, a: &KPoly) -> KPoly {
        KPoly::new(&self.field, a.c.iter().map(|x| self.map(x)).collect())
    }
}

/// Polynomial over a number field, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KPoly {
    pub c: Vec<Elem>,
}

impl KPoly {
    pub fn new(k: &NumberField, mut c: Vec<Elem>) -> KPoly {
        while c.last().is_some_and(|x| k.is_zero(x)) {
            c.pop();
        }
        KPoly { c }
    }

    pub fn deg(&self) -> usize {
        self.c.len().checked_sub(1).expect("non-zero polynomial")
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
}

/// Newton interpolation over Q.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> QPoly {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = QPoly::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        p = p.mul(&QPoly::linear_root(xs[i].clone())).add(&QPoly::constant(coef[i].clone()));
    }
    p
}

/// Solves `sum_k c_k cols[k] = b` over Q for a square invertible system.
fn solve_columns(cols: &[Vec<BigRational>], rhs: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = cols.len();
    let w = n + rhs.len();
    let mut m: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|k| cols[k][i].clone()).chain(rhs.iter().map(|b| b[i].clone())).collect()).collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).expect("invertible system");
        m.swap(c, p);
        let inv = m[c][c].recip();
        for j in c..w {
            m[c][j] = &m[c][j] * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..w {
                    if !m[c][j].is_zero() {
                        let t = &f * &m[c][j];
                        m[i][j] -= t;
                    }
                }
            }
        }
    }
    (n..w).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// A field in which a list of polynomials splits, with their roots.
#[derive(Clone, Debug)]
pub struct SplittingField {
    pub field: NumberField,
    /// image of the base generator
    pub base_image: Elem,
    /// roots of each input polynomial, in factor order
    pub roots: Vec<Vec<Elem>>,
    /// defining polynomial of each adjoined root, over the field before it
    pub tower: Vec<String>,
}

/// Smallest tower (adjoining a root of a lowest-degree non-linear factor at
/// each step) over which all `polys` split.
pub fn splitting_field(base: &NumberField, polys: &[KPoly], bound: usize) -> Result<SplittingField, FieldError> {
    let mut field = base.clone();
    let mut base_image = base.gen();
    let mut cur: Vec<KPoly> = polys.to_vec();
    let mut tower = Vec::new();
    loop {
        let mut factored = Vec::with_capacity(cur.len());
        for p in &cur {
            factored.push(field.factor(p)?);
        }
        let nonlinear = factored.iter().flatten().filter(|f| f.deg() > 1).min_by_key(|f| f.deg()).cloned();
        match nonlinear {
            None => {
                let roots = factored.iter().map(|fs| fs.iter().map(|f| field.neg(&f.c[0])).collect()).collect();
                return Ok(SplittingField { field, base_image, roots, tower });
            }
            Some(h) => {
                let ext = field.extend(&h, bound)?;
                tower.push(field.fmt_kpoly(&h, "x", "t"));
                cur = cur.iter().map(|p| ext.map_poly(p)).collect();
                base_image = ext.map(&base_image);
                field = ext.field;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    #[test]
    fn modular_norm_matches_resultant() {
        let m = QPoly::new(vec![q(3, 2), qi(-1), q(1, 3), qi(0), qi(1)]);
        let k = NumberField::new_unchecked(&m);
        let a = Elem(vec![q(1, 5), qi(-7), qi(0), q(22, 3)]);
        assert_eq!(k.norm(&a), poly::resultant(k.modulus(), &k.as_poly(&a)));
        // pnorm at integer points agrees with the pointwise norm
        let g = KPoly::new(&k, vec![a.clone(), k.gen(), k.from_int(2)]);
        let nrm = k.pnorm(&g);
        assert_eq!(nrm.deg(), 8);
        for x in -3..4 {
            let v = k.peval(&g, &k.from_int(x));
            assert_eq!(nrm.eval(&qi(x)), poly::resultant(k.modulus(), &k.as_poly(&v)));
        }
    }

    #[test]
    fn sqrt2_arith() {
        let k = NumberField::new(&QPoly::from_i64(&[-2, 0, 1])).unwrap();
        let t = k.gen();
        assert_eq!(k.mul(&t, &t), k.from_int(2));
        let a = k.add(&k.one(), &t);
        assert_eq!(k.mul(&a, &k.inv(&a)), k.one());
        assert_eq!(k.norm(&a), qi(-1));
    }

    #[test]
    fn trager_cyclic_cubic() {
        // x^3 - 3x + 1 splits over its own field
        let m = QPoly::from_i64(&[1, -3, 0, 1]);
        let k = NumberField::new(&m).unwrap();
        let f = k.factor(&k.poly_from_q(&m)).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(k.automorphisms().unwrap().len(), 3);
    }

    #[test]
    fn trager_pure_cubic() {
        // x^3 - 2 over Q(2^(1/3)) has one root and a quadratic factor
        let m = QPoly::from_i64(&[-2, 0, 0, 1]);
        let k = NumberField::new(&m).unwrap();
        let f = k.factor(&k.poly_from_q(&m)).unwrap();
        let degs: Vec<usize> = f.iter().map(KPoly::deg).collect();
        assert_eq!(degs, vec![1, 2]);
    }

    #[test]
    fn splitting_field_of_x3_minus_2() {
        let m = QPoly::from_i64(&[-2, 0, 0, 1]);
        let q = NumberField::rationals();
        let s = splitting_field(&q, &[q.poly_from_q(&m)], 36).unwrap();
        assert_eq!(s.field.degree(), 6);
        assert_eq!(s.roots[0].len(), 3);
        for r in &s.roots[0] {
            assert!(s.field.is_zero(&s.field.sub(&s.field.pow(r, 3), &s.field.from_int(2))));
        }
        assert!(matches!(splitting_field(&q, &[q.poly_from_q(&m)], 3), Err(FieldError::DegreeBound { .. })));
    }

    #[test]
    fn extension_maps_generator() {
        let k = NumberField::new(&QPoly::from_i64(&[-7, 0, 1])).unwrap();
        // adjoin a root of x^2 - θ - 1 ... any irreducible quadratic over Q(√7)
        let h = KPoly::new(&k, vec![k.neg(&k.add(&k.gen(), &k.one())), k.zero(), k.one()]);
        let e = k.extend(&h, 36).unwrap();
        let l = &e.field;
        assert_eq!(l.degree(), 4);
        let th = &e.theta_image;
        assert_eq!(l.mul(th, th), l.from_int(7));
        let b2 = l.mul(&e.root, &e.root);
        assert_eq!(b2, l.add(th, &l.one()));
        let x = Elem(vec![q(3, 5), qi(-2)]);
        assert_eq!(e.map(&x), k.map_to(&x, l, th));
    }

    #[test]
    fn interpolation() {
        let xs: Vec<BigRational> = (0..4).map(qi).collect();
        let p = QPoly::new(vec![q(1, 2), qi(0), qi(-3), qi(2)]);
        let ys: Vec<BigRational> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }

    #[test]
    fn kernel_over_field() {
        let k = NumberField::new(&QPoly::from_i64(&[-2, 0, 1])).unwrap();
        let t = k.gen();
        let m = vec![vec![k.one(), t.clone()], vec![t.clone(), k.from_int(2)]];
        assert_eq!(k.rank(&m), 1);
        let ker = k.kernel(&m, 2);
        assert_eq!(ker.len(), 1);
    }
}
