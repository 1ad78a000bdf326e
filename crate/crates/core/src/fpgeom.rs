//! Quaternary cubic forms and their reductions modulo p: finite fields
//! `F_{p^k}`, point counts, singular points, plane factorizations and
//! Frobenius traces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{mod_inv, parse_rational, FpPoly};

/// Exponent vectors of the 20 cubic monomials in `T0..T3`, in the fixed order.
pub const MONOMIALS: [[u8; 4]; 20] = [
    [3, 0, 0, 0],
    [2, 1, 0, 0],
    [2, 0, 1, 0],
    [2, 0, 0, 1],
    [1, 2, 0, 0],
    [1, 1, 1, 0],
    [1, 1, 0, 1],
    [1, 0, 2, 0],
    [1, 0, 1, 1],
    [1, 0, 0, 2],
    [0, 3, 0, 0],
    [0, 2, 1, 0],
    [0, 2, 0, 1],
    [0, 1, 2, 0],
    [0, 1, 1, 1],
    [0, 1, 0, 2],
    [0, 0, 3, 0],
    [0, 0, 2, 1],
    [0, 0, 1, 2],
    [0, 0, 0, 3],
];

/// Largest field size accepted for enumeration.
pub const MAX_FIELD_SIZE: u64 = 10_000_000;
/// Largest number of projective points enumerated in one count.
pub const MAX_ENUMERATION: u64 = 2_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("the cubic form is identically zero")]
    ZeroForm,
    #[error("expected 20 coefficients, got {0}")]
    CoefficientCount(usize),
    #[error("cannot parse coefficient {0:?}")]
    Parse(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("p = {0} divides a denominator of the form")]
    DenominatorDivisible(u64),
    #[error("the reduction mod {0} vanishes identically")]
    ReductionVanishes(u64),
    #[error("field of size {p}^{k} is too large")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("the reduction mod {0} is singular")]
    SingularReduction(u64),
    #[error("non-integral trace ({count} - {p}^2 - 1)/{p}")]
    NonIntegralTrace { count: u64, p: u64 },
    #[error("trace {t} outside [-7, 7] at p = {p}")]
    TraceOutOfRange { t: i64, p: u64 },
}

// ---------------------------------------------------------------------------
// Cubic forms over Q

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicForm {
    coeffs: Vec<BigRational>,
}

impl CubicForm {
    pub fn new(coeffs: Vec<BigRational>) -> Result<CubicForm, FpError> {
        if coeffs.len() != 20 {
            return Err(FpError::CoefficientCount(coeffs.len()));
        }
        if coeffs.iter().all(Zero::is_zero) {
            return Err(FpError::ZeroForm);
        }
        Ok(CubicForm { coeffs })
    }

    pub fn from_i64(c: &[i64]) -> Result<CubicForm, FpError> {
        CubicForm::new(c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    /// Builds a form from `(coefficient, exponents)` terms.
    pub fn from_terms(terms: &[(i64, [u8; 4])]) -> Result<CubicForm, FpError> {
        let mut c = [0i64; 20];
        for (a, e) in terms {
            let i = MONOMIALS.iter().position(|m| m == e).expect("cubic monomial");
            c[i] += a;
        }
        CubicForm::from_i64(&c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn from_json(s: &str) -> Result<CubicForm, FpError> {
        let v: Vec<serde_json::Value> = serde_json::from_str(s).map_err(|e| FpError::Parse(e.to_string()))?;
        let c = v
            .iter()
            .map(|x| {
                let s = match x {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(FpError::Parse(other.to_string())),
                };
                parse_rational(&s).ok_or(FpError::Parse(s))
            })
            .collect::<Result<Vec<_>, _>>()?;
        CubicForm::new(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>()).expect("serializable")
    }

    /// Primitive integer multiple with positive first nonzero coefficient.
    pub fn primitive_integral(&self) -> Vec<BigInt> {
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut z: Vec<BigInt> = self.coeffs.iter().map(|x| (x * &den).to_integer()).collect();
        let g = z.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = z.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
        for x in z.iter_mut() {
            *x /= &g;
            if sign {
                *x = -&*x;
            }
        }
        z
    }

    /// Value at an integer point, exactly.
    pub fn eval_int(&self, x: &[i64; 4]) -> BigRational {
        let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        MONOMIALS.iter().zip(&self.coeffs).fold(BigRational::zero(), |acc, (m, c)| {
            let mut t = BigInt::one();
            for (v, &e) in xs.iter().zip(m) {
                t *= v.pow(e as u32);
            }
            acc + c * BigRational::from_integer(t)
        })
    }

    /// Reduction modulo a prime, as 20 residues.
    pub fn reduce(&self, p: u64) -> Result<[u64; 20], FpError> {
        if !is_prime(p) {
            return Err(FpError::NotPrime(p));
        }
        let pb = BigInt::from(p);
        let mut out = [0u64; 20];
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            let d = c.denom().mod_floor(&pb).to_u64().expect("small");
            if d == 0 {
                return Err(FpError::DenominatorDivisible(p));
            }
            let n = c.numer().mod_floor(&pb).to_u64().expect("small");
            *o = ((n as u128 * mod_inv(d, p) as u128) % p as u128) as u64;
        }
        if out.iter().all(|&c| c == 0) {
            return Err(FpError::ReductionVanishes(p));
        }
        Ok(out)
    }
}

impl fmt::Display for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in MONOMIALS.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("T{i}") } else { format!("T{i}^{e}") })
                .collect();
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}

/// The forms of the worked examples and the Cassels–Guy surface.
pub mod forms {
    use super::CubicForm;

    pub fn example1() -> CubicForm {
        CubicForm::from_terms(&[
            (1, [3, 0, 0, 0]),
            (-1, [2, 0, 1, 0]),
            (-1, [2, 0, 0, 1]),
            (-2, [1, 0, 2, 0]),
            (1, [1, 0, 1, 1]),
            (-1, [0, 3, 0, 0]),
            (3, [0, 2, 1, 0]),
            (-3, [0, 1, 1, 1]),
            (3, [0, 1, 0, 2]),
            (-1, [0, 0, 3, 0]),
            (-1, [0, 0, 2, 1]),
            (1, [0, 0, 0, 3]),
        ])
        .expect("nonzero")
    }

    pub fn example2() -> CubicForm {
        CubicForm::from_i64(&[-3, -6, -3, 3, -3, 0, 3, 3, 0, 6, 2, -4, -1, 10, -4, -9, 6, -8, -8, 4]).expect("nonzero")
    }

    pub fn example3() -> CubicForm {
        CubicForm::from_i64(&[13, -8, 9, 44, -9, -5, 1, 4, -19, -61, 0, -1, -24, 3, 42, -16, 2, 10, -60, 6])
            .expect("nonzero")
    }

    pub fn example4() -> CubicForm {
        CubicForm::from_i64(&[11, 32, 31, 52, -33, -93, -36, 37, 46, -34, 22, -10, -21, 75, -4, 30, 133, 34, -8, 2])
            .expect("nonzero")
    }

    /// `5x³ + 12y³ + 9z³ + 10w³`.
    pub fn cassels_guy() -> CubicForm {
        CubicForm::from_terms(&[(5, [3, 0, 0, 0]), (12, [0, 3, 0, 0]), (9, [0, 0, 3, 0]), (10, [0, 0, 0, 3])])
            .expect("nonzero")
    }

    pub fn all_examples() -> [(&'static str, CubicForm); 4] {
        [("example1", example1()), ("example2", example2()), ("example3", example3()), ("example4", example4())]
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

// ---------------------------------------------------------------------------
// Finite fields

/// `F_{p^k} = F_p[x]/(m)` with `m` the least monic irreducible of degree `k`
/// (coefficients compared from the constant term as base-p digits).
/// Elements are stored as `0` (zero) or `1 + e` for `g^e`, `g` the least
/// primitive element; addition uses Zech logarithms.
#[derive(Clone, Debug)]
pub struct GaloisField {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    /// `exp[e]` = index (base-p digits of the coordinates) of `g^e`
    exp: Vec<u32>,
    /// `log[index]` = `e` with `g^e` = element; unused at index 0
    log: Vec<u32>,
    /// `zech[e]` = encoded `1 + g^e`
    zech: Vec<u32>,
}

pub type Gf = u32;

fn index_to_coords(mut idx: u64, p: u64, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

fn coords_to_index(c: &[u64], p: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

impl GaloisField {
    pub fn new(p: u64, k: u32) -> Result<GaloisField, FpError> {
        if !is_prime(p) {
            return Err(FpError::NotPrime(p));
        }
        let q = p.checked_pow(k).filter(|&q| q <= MAX_FIELD_SIZE).ok_or(FpError::FieldTooLarge { p, k })?;
        let modulus = least_irreducible(p, k as usize);
        let mulx = |c: &[u64]| -> Vec<u64> {
            // c·x mod m, m monic of degree k
            let k = k as usize;
            let top = c[k - 1];
            let mut r = vec![0u64; k];
            for i in (1..k).rev() {
                r[i] = c[i - 1];
            }
            for i in 0..k {
                r[i] = (r[i] + p - (top * modulus[i]) % p) % p;
            }
            r
        };
        let mul_poly = |a: &[u64], b: &[u64]| -> Vec<u64> {
            let mut acc = vec![0u64; k as usize];
            let mut shifted = a.to_vec();
            for &bi in b {
                for (x, s) in acc.iter_mut().zip(&shifted) {
                    *x = (*x + bi * s) % p;
                }
                shifted = mulx(&shifted);
            }
            acc
        };
        // least primitive element by index
        let order = q - 1;
        let prime_factors: Vec<u64> = {
            let mut n = order;
            let mut fs = Vec::new();
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    fs.push(d);
                    while n % d == 0 {
                        n /= d;
                    }
                }
                d += 1;
            }
            if n > 1 {
                fs.push(n);
            }
            fs
        };
        let pow_poly = |a: &[u64], mut e: u64| -> Vec<u64> {
            let mut r = index_to_coords(1, p, k);
            let mut b = a.to_vec();
            while e > 0 {
                if e & 1 == 1 {
                    r = mul_poly(&r, &b);
                }
                b = mul_poly(&b, &b);
                e >>= 1;
            }
            r
        };
        let one = index_to_coords(1, p, k);
        let g = (1..q)
            .map(|i| index_to_coords(i, p, k))
            .find(|c| prime_factors.iter().all(|&f| pow_poly(c, order / f) != one))
            .expect("cyclic multiplicative group");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = one.clone();
        for e in 0..order {
            let idx = coords_to_index(&cur, p);
            exp.push(idx as u32);
            log[idx as usize] = e as u32;
            cur = mul_poly(&cur, &g);
        }
        let zech = (0..order)
            .map(|e| {
                let mut c = index_to_coords(exp[e as usize] as u64, p, k);
                c[0] = (c[0] + 1) % p;
                let idx = coords_to_index(&c, p);
                if idx == 0 {
                    0
                } else {
                    log[idx as usize] + 1
                }
            })
            .collect();
        Ok(GaloisField { p, k, q, modulus, exp, log, zech })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    /// Coefficients of the defining polynomial, constant term first, monic.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    /// All elements, zero first, then by coordinate index.
    pub fn elements(&self) -> Vec<Gf> {
        (0..self.q).map(|i| self.from_index(i)).collect()
    }

    pub fn from_index(&self, idx: u64) -> Gf {
        if idx == 0 {
            0
        } else {
            self.log[idx as usize] + 1
        }
    }

    pub fn index(&self, a: Gf) -> u64 {
        if a == 0 {
            0
        } else {
            self.exp[(a - 1) as usize] as u64
        }
    }

    /// Coordinates in the basis `1, x, .., x^(k-1)`.
    pub fn coords(&self, a: Gf) -> Vec<u64> {
        index_to_coords(self.index(a), self.p, self.k)
    }

    pub fn from_int(&self, c: u64) -> Gf {
        self.from_index(c % self.p)
    }

    pub fn one(&self) -> Gf {
        1
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = (self.q - 1) as u32;
        let e = (a - 1) + (b - 1);
        (if e >= n { e - n } else { e }) + 1
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let n = (self.q - 1) as u32;
        let (ea, eb) = (a - 1, b - 1);
        let d = if eb >= ea { eb - ea } else { eb + n - ea };
        let z = self.zech[d as usize];
        if z == 0 {
            return 0;
        }
        let e = ea + (z - 1);
        (if e >= n { e - n } else { e }) + 1
    }

    pub fn neg(&self, a: Gf) -> Gf {
        if a == 0 || self.p == 2 {
            return a;
        }
        let n = (self.q - 1) as u32;
        let e = (a - 1) + n / 2;
        (if e >= n { e - n } else { e }) + 1
    }

    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: Gf) -> Gf {
        assert!(a != 0, "inverse of zero");
        let n = (self.q - 1) as u32;
        ((n - (a - 1)) % n) + 1
    }

    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = self.q - 1;
        ((((a - 1) as u64 * (e % n)) % n) as u32) + 1
    }

    pub fn frobenius(&self, a: Gf) -> Gf {
        self.pow(a, self.p)
    }

    pub fn fmt_elem(&self, a: Gf) -> String {
        if self.k == 1 {
            return self.index(a).to_string();
        }
        let c = self.coords(a);
        let terms: Vec<String> = c
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| match (i, d) {
                (0, d) => d.to_string(),
                (1, 1) => "x".into(),
                (1, d) => format!("{d}x"),
                (i, 1) => format!("x^{i}"),
                (i, d) => format!("{d}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// Least monic irreducible polynomial of degree `k` over `F_p` (without the
/// leading 1), ordering candidates by their base-p index from the constant term.
fn least_irreducible(p: u64, k: usize) -> Vec<u64> {
    if k == 1 {
        return vec![0];
    }
    let total = p.pow(k as u32);
    (0..total)
        .map(|i| index_to_coords(i, p, k as u32))
        .find(|c| {
            let mut full = c.clone();
            full.push(1);
            FpPoly::new(p, full).is_irreducible()
        })
        .expect("irreducible polynomials exist in every degree")
}

// ---------------------------------------------------------------------------
// Reduced forms

/// A cubic form with coefficients in a finite field.
#[derive(Clone, Debug)]
pub struct FqCubic {
    pub field: GaloisField,
    pub coeffs: [Gf; 20],
}

pub type Point = [Gf; 4];

impl FqCubic {
    pub fn new(f: &CubicForm, p: u64, k: u32) -> Result<FqCubic, FpError> {
        let red = f.reduce(p)?;
        let field = GaloisField::new(p, k)?;
        let coeffs = red.map(|c| field.from_int(c));
        Ok(FqCubic { field, coeffs })
    }

    pub fn eval(&self, x: &Point) -> Gf {
        let k = &self.field;
        MONOMIALS.iter().zip(&self.coeffs).fold(0, |acc, (m, &c)| {
            if c == 0 {
                return acc;
            }
            let t = m.iter().zip(x).fold(c, |t, (&e, &v)| k.mul(t, k.pow(v, e as u64)));
            k.add(acc, t)
        })
    }

    /// `∂F/∂T_i` at `x`.
    pub fn partial(&self, i: usize, x: &Point) -> Gf {
        let k = &self.field;
        MONOMIALS.iter().zip(&self.coeffs).fold(0, |acc, (m, &c)| {
            if c == 0 || m[i] == 0 {
                return acc;
            }
            let mut t = k.mul(c, k.from_int(m[i] as u64));
            for (j, (&e, &v)) in m.iter().zip(x).enumerate() {
                let e = if j == i { e - 1 } else { e };
                t = k.mul(t, k.pow(v, e as u64));
            }
            k.add(acc, t)
        })
    }

    /// Singular: `F` and all partials vanish (F is needed in characteristic 3).
    pub fn is_singular_at(&self, x: &Point) -> bool {
        self.eval(x) == 0 && (0..4).all(|i| self.partial(i, x) == 0)
    }

    /// Coefficients of `F(x0, x1, x2, x3)` as a cubic in the variable `v`
    /// with the others fixed, constant term first.
    fn slice(&self, v: usize, x: &Point) -> [Gf; 4] {
        let k = &self.field;
        let mut c = [0; 4];
        for (m, &a) in MONOMIALS.iter().zip(&self.coeffs) {
            if a == 0 {
                continue;
            }
            let mut t = a;
            for j in 0..4 {
                if j != v {
                    t = k.mul(t, k.pow(x[j], m[j] as u64));
                }
            }
            let d = m[v] as usize;
            c[d] = k.add(c[d], t);
        }
        c
    }

    /// All projective points on the surface, with the first nonzero
    /// coordinate equal to 1. Charts are scanned in parallel.
    pub fn points(&self) -> Vec<Point> {
        let k = &self.field;
        let els = k.elements();
        let horner = |c: &[Gf; 4], t: Gf| k.add(k.mul(k.add(k.mul(k.add(k.mul(c[3], t), c[2]), t), c[1]), t), c[0]);
        // chart x0 = 1: fix (x1, x2), solve in x3 by Horner
        let mut pts: Vec<Point> = els
            .par_iter()
            .flat_map_iter(|&x1| {
                let mut local = Vec::new();
                for &x2 in &els {
                    let c = self.slice(3, &[1, x1, x2, 0]);
                    for &x3 in &els {
                        if horner(&c, x3) == 0 {
                            local.push([1, x1, x2, x3]);
                        }
                    }
                }
                local
            })
            .collect();
        for &x2 in &els {
            let c = self.slice(3, &[0, 1, x2, 0]);
            for &x3 in &els {
                if horner(&c, x3) == 0 {
                    pts.push([0, 1, x2, x3]);
                }
            }
        }
        for &x3 in &els {
            if self.eval(&[0, 0, 1, x3]) == 0 {
                pts.push([0, 0, 1, x3]);
            }
        }
        if self.eval(&[0, 0, 0, 1]) == 0 {
            pts.push([0, 0, 0, 1]);
        }
        pts
    }

    pub fn frobenius(&self, x: &Point) -> Point {
        x.map(|v| self.field.frobenius(v))
    }

    /// Smallest `d` with `Frob^d(x) = x`.
    pub fn definition_degree(&self, x: &Point) -> u32 {
        let mut y = self.frobenius(x);
        let mut d = 1;
        while &y != x {
            y = self.frobenius(&y);
            d += 1;
        }
        d
    }

    pub fn fmt_point(&self, x: &Point) -> String {
        format!("({})", x.iter().map(|&v| self.field.fmt_elem(v)).collect::<Vec<_>>().join(":"))
    }
}

fn check_enumeration(p: u64, k: u32) -> Result<(), FpError> {
    let q = p.checked_pow(k).ok_or(FpError::FieldTooLarge { p, k })?;
    if q > MAX_FIELD_SIZE || q.saturating_mul(q).saturating_mul(q) > MAX_ENUMERATION {
        return Err(FpError::FieldTooLarge { p, k });
    }
    Ok(())
}

/// Number of projective `F_{p^k}`-points of the reduction.
pub fn count_points(f: &CubicForm, p: u64, k: u32) -> Result<u64, FpError> {
    check_enumeration(p, k)?;
    Ok(FqCubic::new(f, p, k)?.points().len() as u64)
}

/// Independent count: the last nonzero coordinate is normalized to 1 and
/// every monomial is evaluated directly.
pub fn count_points_direct(f: &CubicForm, p: u64, k: u32) -> Result<u64, FpError> {
    check_enumeration(p, k)?;
    let c = FqCubic::new(f, p, k)?;
    let els = c.field.elements();
    let nonzero_tail = |lead: usize| -> u64 {
        // points (x0, .., x_{lead-1}, 1, 0, .., 0)
        let free = lead;
        let total = (els.len() as u64).pow(free as u32);
        (0..total)
            .into_par_iter()
            .filter(|&n| {
                let mut x: Point = [0; 4];
                let mut n = n;
                for slot in x.iter_mut().take(free) {
                    *slot = els[(n % els.len() as u64) as usize];
                    n /= els.len() as u64;
                }
                x[lead] = 1;
                c.eval(&x) == 0
            })
            .count() as u64
    };
    Ok((0..4).map(nonzero_tail).sum())
}

/// A singular point with its Frobenius orbit size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPoint {
    /// coordinates as polynomials in the generator of `F_{p^k}`, constant term first
    pub coords: [Vec<u64>; 4],
    pub display: String,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularCensus {
    pub p: u64,
    pub k_max: u32,
    /// per `k`: defining polynomial of `F_{p^k}` (constant term first)
    pub moduli: Vec<Vec<u64>>,
    pub points: Vec<SingularPoint>,
    /// Frobenius orbits as lists of indices into `points`
    pub orbits: Vec<Vec<usize>>,
}

impl SingularCensus {
    pub fn count_with_degree(&self, d: u32) -> usize {
        self.points.iter().filter(|s| s.degree == d).count()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Singular points over `F_{p^k}` for `k ≤ k_max`; each point is reported once,
/// over the field generated by its coordinates.
pub fn singular_census(f: &CubicForm, p: u64, k_max: u32) -> Result<SingularCensus, FpError> {
    let mut points = Vec::new();
    let mut orbits = Vec::new();
    let mut moduli = Vec::new();
    for k in 1..=k_max {
        check_enumeration(p, k)?;
        let c = FqCubic::new(f, p, k)?;
        moduli.push(c.field.modulus());
        let sing: Vec<Point> = c.points().into_iter().filter(|x| c.is_singular_at(x)).collect();
        let mut seen = BTreeSet::new();
        for x in &sing {
            if seen.contains(x) || c.definition_degree(x) != k {
                continue;
            }
            let mut orbit = Vec::new();
            let mut y = *x;
            loop {
                seen.insert(y);
                orbit.push(points.len());
                points.push(SingularPoint {
                    coords: y.map(|v| c.field.coords(v)),
                    display: c.fmt_point(&y),
                    degree: k,
                });
                y = c.frobenius(&y);
                if &y == x {
                    break;
                }
            }
            orbits.push(orbit);
        }
    }
    Ok(SingularCensus { p, k_max, moduli, points, orbits })
}

/// Whether a given `F_p`-point is singular on the reduction.
pub fn is_singular_point(f: &CubicForm, p: u64, x: [u64; 4]) -> Result<bool, FpError> {
    let c = FqCubic::new(f, p, 1)?;
    Ok(c.is_singular_at(&x.map(|v| c.field.from_int(v))))
}

/// `#S(F_p) - #{singular F_p-points}`.
pub fn smooth_point_count(f: &CubicForm, p: u64) -> Result<u64, FpError> {
    check_enumeration(p, 1)?;
    let c = FqCubic::new(f, p, 1)?;
    Ok(c.points().iter().filter(|x| !c.is_singular_at(x)).count() as u64)
}

// ---------------------------------------------------------------------------
// Sparse forms over F_p: division by linear forms and Gröbner bases

type Mono = [u8; 4];

#[derive(Clone, Debug, PartialEq, Eq)]
struct SparseForm {
    p: u64,
    terms: BTreeMap<Mono, u64>,
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl SparseForm {
    fn from_cubic(c: &[u64; 20], p: u64) -> SparseForm {
        let terms = MONOMIALS.iter().zip(c).filter(|(_, &a)| a != 0).map(|(m, &a)| (*m, a)).collect();
        SparseForm { p, terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Mono, c: u64) {
        let p = self.p;
        let e = self.terms.entry(m).or_insert(0);
        *e = (*e + c) % p;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    /// Exact division by a linear form whose coefficient at `var` is 1.
    /// Returns `None` if it does not divide.
    fn div_linear(&self, l: &[u64; 4], var: usize) -> Option<SparseForm> {
        let p = self.p;
        let mut rem = self.clone();
        let mut quo = SparseForm { p, terms: BTreeMap::new() };
        loop {
            let top = rem.terms.iter().filter(|(m, _)| m[var] > 0).max_by_key(|(m, _)| (m[var], **m)).map(|(m, &c)| (*m, c));
            let Some((m, c)) = top else { break };
            let mut mq = m;
            mq[var] -= 1;
            quo.add_term(mq, c);
            for (j, &lj) in l.iter().enumerate() {
                if lj == 0 {
                    continue;
                }
                let mut mm = mq;
                mm[j] += 1;
                rem.add_term(mm, p - mulm(c, lj, p));
            }
        }
        rem.is_zero().then_some(quo)
    }

    fn degree(&self) -> u8 {
        self.terms.keys().map(|m| m.iter().sum::<u8>()).max().unwrap_or(0)
    }
}

/// Result of splitting off linear factors over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaneFactorization {
    /// `F = c · L1 · L2 · L3` with each `L` normalized (first nonzero coefficient 1)
    Planes { scalar: u64, factors: Vec<[u64; 4]> },
    /// some linear factors split off, the rest has none
    Partial { factors: Vec<[u64; 4]>, residual_degree: u8 },
    /// no linear factor over `F_p`
    NoLinearFactor,
}

fn normalized_linear_forms(p: u64) -> impl Iterator<Item = ([u64; 4], usize)> {
    (0..4usize).flat_map(move |lead| {
        let free = 3 - lead;
        (0..p.pow(free as u32)).map(move |mut n| {
            let mut l = [0u64; 4];
            l[lead] = 1;
            for slot in l.iter_mut().skip(lead + 1) {
                *slot = n % p;
                n /= p;
            }
            (l, lead)
        })
    })
}

/// Factorization of the reduction into `F_p`-linear forms, as far as it goes.
pub fn factor_into_planes(f: &CubicForm, p: u64) -> Result<PlaneFactorization, FpError> {
    let red = f.reduce(p)?;
    let mut cur = SparseForm::from_cubic(&red, p);
    let mut factors = Vec::new();
    'outer: while cur.degree() > 0 {
        for (l, lead) in normalized_linear_forms(p) {
            if let Some(q) = cur.div_linear(&l, lead) {
                factors.push(l);
                cur = q;
                continue 'outer;
            }
        }
        break;
    }
    Ok(match (factors.len(), cur.degree()) {
        (0, _) => PlaneFactorization::NoLinearFactor,
        (_, 0) => {
            let scalar = *cur.terms.values().next().expect("nonzero constant");
            factors.sort();
            PlaneFactorization::Planes { scalar, factors }
        }
        (_, d) => PlaneFactorization::Partial { factors, residual_degree: d },
    })
}

// Gröbner bases over F_p in grevlex order.

fn grevlex_key(m: &Mono) -> (u8, [std::cmp::Reverse<u8>; 4]) {
    let deg = m.iter().sum();
    (deg, [std::cmp::Reverse(m[3]), std::cmp::Reverse(m[2]), std::cmp::Reverse(m[1]), std::cmp::Reverse(m[0])])
}

#[derive(Clone, Debug)]
struct GPoly {
    /// terms sorted descending in grevlex
    terms: Vec<(Mono, u64)>,
}

impl GPoly {
    fn from_sparse(s: &SparseForm) -> GPoly {
        let mut terms: Vec<(Mono, u64)> = s.terms.iter().map(|(m, &c)| (*m, c)).collect();
        terms.sort_by(|a, b| grevlex_key(&b.0).cmp(&grevlex_key(&a.0)));
        GPoly { terms }
    }

    fn lm(&self) -> Mono {
        self.terms[0].0
    }

    fn monic(mut self, p: u64) -> GPoly {
        let inv = mod_inv(self.terms[0].1, p);
        for t in self.terms.iter_mut() {
            t.1 = mulm(t.1, inv, p);
        }
        self
    }

    /// `self - c · x^shift · other`
    fn sub_mul(&self, c: u64, shift: Mono, other: &GPoly, p: u64) -> GPoly {
        let mut map: BTreeMap<Mono, u64> = self.terms.iter().cloned().collect();
        for (m, a) in &other.terms {
            let mm = [m[0] + shift[0], m[1] + shift[1], m[2] + shift[2], m[3] + shift[3]];
            let e = map.entry(mm).or_insert(0);
            *e = (*e + p - mulm(c, *a, p)) % p;
            if *e == 0 {
                map.remove(&mm);
            }
        }
        let mut terms: Vec<(Mono, u64)> = map.into_iter().collect();
        terms.sort_by(|a, b| grevlex_key(&b.0).cmp(&grevlex_key(&a.0)));
        GPoly { terms }
    }
}

fn divides(a: &Mono, b: &Mono) -> bool {
    (0..4).all(|i| a[i] <= b[i])
}

fn lcm_mono(a: &Mono, b: &Mono) -> Mono {
    [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2]), a[3].max(b[3])]
}

fn mono_sub(a: &Mono, b: &Mono) -> Mono {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn reduce_full(mut f: GPoly, basis: &[GPoly], p: u64) -> GPoly {
    let mut out: Vec<(Mono, u64)> = Vec::new();
    while let Some(&(m, c)) = f.terms.first() {
        if let Some(g) = basis.iter().find(|g| divides(&g.lm(), &m)) {
            f = f.sub_mul(c, mono_sub(&m, &g.lm()), g, p);
        } else {
            out.push((m, c));
            f.terms.remove(0);
        }
    }
    GPoly { terms: out }
}

/// Reduced Gröbner basis (Buchberger with the coprime-leading-monomial
/// criterion); leading monomials of the result.
fn groebner_leading_monomials(gens: Vec<GPoly>, p: u64) -> Vec<Mono> {
    let mut basis: Vec<GPoly> = Vec::new();
    for g in gens {
        let r = reduce_full(g, &basis, p);
        if !r.terms.is_empty() {
            basis.push(r.monic(p));
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (a, b) = (basis[i].lm(), basis[j].lm());
        let l = lcm_mono(&a, &b);
        if l == [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]] {
            continue;
        }
        let left = GPoly { terms: vec![] }.sub_mul(p - 1, mono_sub(&l, &a), &basis[i], p);
        let sp = left.sub_mul(1, mono_sub(&l, &b), &basis[j], p);
        let r = reduce_full(sp, &basis, p);
        if !r.terms.is_empty() {
            let n = basis.len();
            basis.push(r.monic(p));
            pairs.extend((0..n).map(|i| (i, n)));
        }
    }
    basis.iter().map(|g| g.lm()).collect()
}

/// Whether the reduction mod `p` is smooth over `F̄_p`: the ideal of `F`
/// and its partials has no projective zero, i.e. its leading monomials
/// contain a pure power of every variable.
pub fn is_smooth_reduction(f: &CubicForm, p: u64) -> Result<bool, FpError> {
    let red = f.reduce(p)?;
    let base = SparseForm::from_cubic(&red, p);
    let mut gens = vec![GPoly::from_sparse(&base)];
    for i in 0..4 {
        let mut d = SparseForm { p, terms: BTreeMap::new() };
        for (m, &c) in &base.terms {
            if m[i] > 0 {
                let mut mm = *m;
                mm[i] -= 1;
                d.add_term(mm, mulm(c, m[i] as u64 % p, p));
            }
        }
        if !d.is_zero() {
            gens.push(GPoly::from_sparse(&d));
        }
    }
    let lms = groebner_leading_monomials(gens, p);
    Ok((0..4).all(|i| lms.iter().any(|m| (0..4).all(|j| (j == i) || m[j] == 0) && m[i] > 0)))
}

/// Primes `p ≤ bound` at which the reduction is singular or undefined.
pub fn bad_primes(f: &CubicForm, bound: u64) -> Vec<u64> {
    (2..=bound)
        .filter(|&p| is_prime(p))
        .filter(|&p| !matches!(is_smooth_reduction(f, p), Ok(true)))
        .collect()
}

/// `t = (#S(F_p) - p² - 1)/p` for a smooth reduction.
pub fn frobenius_trace(f: &CubicForm, p: u64) -> Result<i64, FpError> {
    if !is_smooth_reduction(f, p)? {
        return Err(FpError::SingularReduction(p));
    }
    let n = count_points(f, p, 1)?;
    let num = n as i64 - (p * p) as i64 - 1;
    if num % p as i64 != 0 {
        return Err(FpError::NonIntegralTrace { count: n, p });
    }
    let t = num / p as i64;
    if t.abs() > 7 {
        return Err(FpError::TraceOutOfRange { t, p });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf_axioms_small() {
        for (p, k) in [(2, 3), (3, 2), (7, 1), (5, 2)] {
            let f = GaloisField::new(p, k).unwrap();
            let els = f.elements();
            assert_eq!(els.len() as u64, p.pow(k));
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for &b in &els {
                    // distributivity against a fixed element
                    let c = els[els.len() - 1];
                    assert_eq!(f.mul(c, f.add(a, b)), f.add(f.mul(c, a), f.mul(c, b)));
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                }
            }
        }
    }

    #[test]
    fn least_irreducibles() {
        assert_eq!(GaloisField::new(2, 3).unwrap().modulus(), vec![1, 1, 0, 1]);
        assert_eq!(GaloisField::new(3, 2).unwrap().modulus(), vec![1, 0, 1]);
        assert_eq!(GaloisField::new(7, 3).unwrap().modulus(), vec![2, 0, 0, 1]);
    }

    #[test]
    fn json_round_trip() {
        let f = forms::example3();
        assert_eq!(CubicForm::from_json(&f.to_json()).unwrap(), f);
        assert!(CubicForm::from_json("[\"1\"]").is_err());
        assert_eq!(CubicForm::from_i64(&[0; 20]), Err(FpError::ZeroForm));
    }

    #[test]
    fn division_by_linear_form() {
        // (T0 + T1)(T2)(T3 + 2T0) mod 5
        let p = 5;
        let f = SparseForm::from_cubic(&CubicForm::from_terms(&[(1, [1, 0, 1, 1]), (2, [2, 0, 1, 0]), (1, [0, 1, 1, 1]), (2, [1, 1, 1, 0])]).unwrap().reduce(p).unwrap(), p);
        let q = f.div_linear(&[1, 1, 0, 0], 0).unwrap();
        assert_eq!(q.degree(), 2);
        assert!(f.div_linear(&[1, 2, 0, 0], 0).is_none());
    }
}
