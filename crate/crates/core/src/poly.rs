//! Univariate polynomials over Q, Z and F_p, and factorization over Q
//! (Cantor–Zassenhaus modulo p, Hensel lifting, subset recombination).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Polynomial over Q, coefficients from the constant term up, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    c: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut c: Vec<BigRational>) -> QPoly {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn from_i64(c: &[i64]) -> QPoly {
        QPoly::new(c.iter().map(|&x| qi(x)).collect())
    }

    pub fn zero() -> QPoly {
        QPoly { c: vec![] }
    }

    pub fn one() -> QPoly {
        QPoly::constant(BigRational::one())
    }

    pub fn constant(a: BigRational) -> QPoly {
        QPoly::new(vec![a])
    }

    /// `x - a`
    pub fn linear_root(a: BigRational) -> QPoly {
        QPoly::new(vec![-a, BigRational::one()])
    }

    pub fn x() -> QPoly {
        QPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("non-zero polynomial")
    }

    pub fn lc(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn monic(&self) -> QPoly {
        let l = self.lc();
        self.scale(&l.recip())
    }

    pub fn scale(&self, a: &BigRational) -> QPoly {
        QPoly::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.c.iter().map(|x| -x).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut r = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        QPoly::new(r)
    }

    pub fn pow(&self, e: u32) -> QPoly {
        (0..e).fold(QPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dd = d.deg();
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let inv = d.lc().recip();
        let mut qc = vec![BigRational::zero(); r.len() - dd];
        for k in (0..qc.len()).rev() {
            let coef = &r[k + dd] * &inv;
            if !coef.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * dj;
                }
            }
            qc[k] = coef;
        }
        r.truncate(dd);
        (QPoly::new(qc), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_rational() };
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn ext_gcd(&self, o: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1);
            let s = s0.sub(&qq.mul(&s1));
            let t = t0.sub(&qq.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let l = r0.lc().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    /// Scales to a primitive integer polynomial with positive leading term, kept in Q.
    fn primitive_rational(&self) -> QPoly {
        let z = self.to_primitive_z();
        QPoly::new(z.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a * BigInt::from(i)).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    /// `p(a*x + b)`
    pub fn compose_linear(&self, a: &BigRational, b: &BigRational) -> QPoly {
        let lin = QPoly::new(vec![b.clone(), a.clone()]);
        self.c.iter().rev().fold(QPoly::zero(), |acc, c| acc.mul(&lin).add(&QPoly::constant(c.clone())))
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// Primitive integer polynomial with positive leading coefficient and the same roots.
    pub fn to_primitive_z(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let den = self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut z: Vec<BigInt> = self.c.iter().map(|x| (x * &den).to_integer()).collect();
        let g = z.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        for x in z.iter_mut() {
            *x /= &g;
        }
        if z.last().expect("non-zero").is_negative() {
            for x in z.iter_mut() {
                *x = -&*x;
            }
        }
        z
    }

    pub fn from_z(z: &[BigInt]) -> QPoly {
        QPoly::new(z.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }

    pub fn rational_roots(&self) -> Vec<BigRational> {
        factor(self)
            .into_iter()
            .filter(|(f, _)| f.deg() == 1)
            .map(|(f, _)| -f.coeff(0) / f.coeff(1))
            .collect()
    }

    pub fn discriminant(&self) -> BigRational {
        let n = self.deg();
        let r = resultant(self, &self.derivative());
        let sign = if (n * (n - 1) / 2) % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        sign * r / self.lc()
    }

    pub fn to_string_var(&self, var: &str) -> String {
        fmt_poly(&self.c, var)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_poly(&self.c, "x"))
    }
}

fn fmt_poly(c: &[BigRational], var: &str) -> String {
    if c.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, a) in c.iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        let neg = a.is_negative();
        let abs = a.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if abs.is_one() && i > 0 {
            s.push_str(&mono);
        } else if i == 0 {
            s.push_str(&abs.to_string());
        } else {
            s.push_str(&format!("{abs}*{mono}"));
        }
    }
    s
}

/// Resultant over Q via the Euclidean remainder sequence.
pub fn resultant(a: &QPoly, b: &QPoly) -> BigRational {
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut res = BigRational::one();
    loop {
        let (da, db) = (a.deg(), b.deg());
        if db == 0 {
            return res * b.lc().pow(da as i32);
        }
        let r = a.rem(&b);
        if r.is_zero() {
            return BigRational::zero();
        }
        let dr = r.deg();
        if (da * db) % 2 == 1 {
            res = -res;
        }
        res *= b.lc().pow((da - dr) as i32);
        a = b;
        b = r;
    }
}

// ---------------------------------------------------------------------------
// F_p polynomials

pub fn mod_inv(a: u64, p: u64) -> u64 {
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, p as i128, (a % p) as i128);
    while nr != 0 {
        let qq = r / nr;
        (t, nt) = (nt, t - qq * nt);
        (r, nr) = (nr, r - qq * nr);
    }
    assert_eq!(r, 1, "{a} not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

pub(crate) fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Polynomial over F_p, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> FpPoly {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_z(p: u64, z: &[BigInt]) -> FpPoly {
        let pb = BigInt::from(p);
        FpPoly::new(p, z.iter().map(|x| x.mod_floor(&pb).to_u64().expect("reduced")).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("non-zero polynomial")
    }

    pub fn lc(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn one(p: u64) -> FpPoly {
        FpPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> FpPoly {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn monic(&self) -> FpPoly {
        let inv = mod_inv(self.lc(), self.p);
        self.scale(inv)
    }

    pub fn scale(&self, a: u64) -> FpPoly {
        FpPoly::new(self.p, self.c.iter().map(|&x| mulm(x, a, self.p)).collect())
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let g = |v: &Vec<u64>, i: usize| v.get(i).copied().unwrap_or(0);
        FpPoly::new(self.p, (0..n).map(|i| (g(&self.c, i) + g(&o.c, i)) % self.p).collect())
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let g = |v: &Vec<u64>, i: usize| v.get(i).copied().unwrap_or(0);
        FpPoly::new(self.p, (0..n).map(|i| (g(&self.c, i) + self.p - g(&o.c, i)) % self.p).collect())
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::new(self.p, vec![]);
        }
        let mut r = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                r[i + j] = (r[i + j] + mulm(a, b, self.p)) % self.p;
            }
        }
        FpPoly::new(self.p, r)
    }

    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        let p = self.p;
        let dd = d.deg();
        if self.c.len() <= dd {
            return (FpPoly::new(p, vec![]), self.clone());
        }
        let inv = mod_inv(d.lc(), p);
        let mut r = self.c.clone();
        let mut qc = vec![0u64; r.len() - dd];
        for k in (0..qc.len()).rev() {
            let coef = mulm(r[k + dd], inv, p);
            if coef != 0 {
                for (j, &dj) in d.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mulm(coef, dj, p)) % p;
                }
            }
            qc[k] = coef;
        }
        r.truncate(dd);
        (FpPoly::new(p, qc), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn ext_gcd(&self, o: &FpPoly) -> (FpPoly, FpPoly, FpPoly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::new(p, vec![]));
        let (mut t0, mut t1) = (FpPoly::new(p, vec![]), FpPoly::one(p));
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1);
            let s = s0.sub(&qq.mul(&s1));
            let t = t0.sub(&qq.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = mod_inv(r0.lc(), p);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn derivative(&self) -> FpPoly {
        FpPoly::new(self.p, self.c.iter().enumerate().skip(1).map(|(i, &a)| mulm(a, i as u64 % self.p, self.p)).collect())
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &a| (mulm(acc, x, self.p) + a) % self.p)
    }

    pub fn powmod(&self, mut e: u128, m: &FpPoly) -> FpPoly {
        let mut base = self.rem(m);
        let mut acc = FpPoly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        let d = self.derivative();
        !d.is_zero() && self.gcd(&d).deg() == 0
    }

    pub fn roots(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }

    /// Irreducible monic factors of a squarefree polynomial.
    pub fn factor_squarefree(&self, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
        let mut out = Vec::new();
        for (d, g) in self.monic().distinct_degree() {
            equal_degree(&g, d, rng, &mut out);
        }
        out.sort_by(|a, b| (a.deg(), &a.c).cmp(&(b.deg(), &b.c)));
        out
    }

    /// Irreducibility test (Ben-Or style via distinct-degree factorization).
    pub fn is_irreducible(&self) -> bool {
        if self.deg() <= 1 {
            return self.deg() == 1;
        }
        if !self.is_squarefree() {
            return false;
        }
        let dd = self.monic().distinct_degree();
        dd.len() == 1 && dd[0].0 == self.deg()
    }

    fn distinct_degree(&self) -> Vec<(usize, FpPoly)> {
        let p = self.p;
        let mut f = self.clone();
        let mut out = Vec::new();
        let x = FpPoly::x(p);
        let mut h = x.clone();
        let mut d = 0;
        while f.deg() >= 2 * (d + 1) {
            d += 1;
            h = h.powmod(p as u128, &f);
            let g = f.gcd(&h.sub(&x));
            if g.deg() > 0 {
                f = f.divrem(&g).0;
                h = h.rem(&f);
                out.push((d, g));
            }
        }
        if f.deg() > 0 {
            out.push((f.deg(), f));
        }
        out
    }
}

fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let p = f.p;
    if f.deg() == d {
        out.push(f.monic());
        return;
    }
    loop {
        let a = FpPoly::new(p, (0..f.deg()).map(|_| rng.gen_range(0..p)).collect());
        if a.degree().is_none_or(|x| x == 0) {
            continue;
        }
        let g = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                s = s.add(&t);
            }
            f.gcd(&s)
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            f.gcd(&a.powmod(e, f).sub(&FpPoly::one(p)))
        };
        if g.deg() > 0 && g.deg() < f.deg() {
            let h = f.divrem(&g).0;
            equal_degree(&g, d, rng, out);
            equal_degree(&h, d, rng, out);
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Z[x] modulo m, Hensel lifting

fn zmod(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut r: Vec<BigInt> = v.iter().map(|x| x.mod_floor(m)).collect();
    while r.last().is_some_and(Zero::is_zero) {
        r.pop();
    }
    r
}

fn zmul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    zmod(&r, m)
}

fn zadd(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    zmod(&(0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect::<Vec<_>>(), m)
}

fn zsub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    zmod(&(0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect::<Vec<_>>(), m)
}

/// Division by a monic polynomial modulo `m`.
fn zdivrem_monic(a: &[BigInt], d: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let dd = d.len() - 1;
    if a.len() <= dd {
        return (vec![], zmod(a, m));
    }
    let mut r: Vec<BigInt> = a.to_vec();
    let mut qc = vec![BigInt::zero(); a.len() - dd];
    for k in (0..qc.len()).rev() {
        let coef = r[k + dd].mod_floor(m);
        if !coef.is_zero() {
            for (j, dj) in d.iter().enumerate() {
                r[k + j] -= &coef * dj;
            }
        }
        qc[k] = coef;
    }
    r.truncate(dd);
    (zmod(&qc, m), zmod(&r, m))
}

fn fp_to_z(f: &FpPoly) -> Vec<BigInt> {
    f.c.iter().map(|&x| BigInt::from(x)).collect()
}

/// Lifts `f ≡ g h (mod p)` with `h` monic to modulus `p^(2^k) >= bound`.
fn hensel_two(f: &[BigInt], g: &FpPoly, h: &FpPoly, p: u64, bound: &BigInt) -> (Vec<BigInt>, Vec<BigInt>, BigInt) {
    let (one, s, t) = g.ext_gcd(h);
    assert_eq!(one.c, vec![1], "factors coprime mod p");
    let mut m = BigInt::from(p);
    let (mut g, mut h, mut s, mut t) = (fp_to_z(g), fp_to_z(h), fp_to_z(&s), fp_to_z(&t));
    while &m < bound {
        let m2 = &m * &m;
        let e = zsub(f, &zmul(&g, &h, &m2), &m2);
        let (qq, r) = zdivrem_monic(&zmul(&s, &e, &m2), &h, &m2);
        let g2 = zadd(&zadd(&g, &zmul(&t, &e, &m2), &m2), &zmul(&qq, &g, &m2), &m2);
        let h2 = zadd(&h, &r, &m2);
        let b = zsub(&zadd(&zmul(&s, &g2, &m2), &zmul(&t, &h2, &m2), &m2), &[BigInt::one()], &m2);
        let (c, d) = zdivrem_monic(&zmul(&s, &b, &m2), &h2, &m2);
        s = zsub(&s, &d, &m2);
        t = zsub(&zsub(&t, &zmul(&t, &b, &m2), &m2), &zmul(&c, &g2, &m2), &m2);
        g = g2;
        h = h2;
        m = m2;
    }
    (g, h, m)
}

fn symmetric(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half: BigInt = m / 2;
    v.iter()
        .map(|x| {
            let r = x.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

fn z_divides(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    // exact division over Z
    let dg = g.len() - 1;
    if f.len() < g.len() {
        return None;
    }
    let mut r = f.to_vec();
    let mut qc = vec![BigInt::zero(); f.len() - dg];
    for k in (0..qc.len()).rev() {
        let (c, rem) = r[k + dg].div_rem(&g[dg]);
        if !rem.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, gj) in g.iter().enumerate() {
                r[k + j] -= &c * gj;
            }
        }
        qc[k] = c;
    }
    r[..dg].iter().all(Zero::is_zero).then_some(qc)
}

/// Necessary condition for `g | f` over Z: divisibility modulo word primes
/// not dividing the leading coefficient of `f`.
fn divides_mod_primes(f: &[BigInt], g: &[BigInt], primes: &[u64]) -> bool {
    primes.iter().all(|&q| {
        let gq = FpPoly::from_z(q, g);
        !gq.is_zero() && FpPoly::from_z(q, f).rem(&gq).is_zero()
    })
}

fn primes_from(start: u64) -> impl Iterator<Item = u64> {
    (start..).filter(|&n| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

/// Factors a primitive squarefree integer polynomial of positive degree.
fn zassenhaus(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    if n == 1 {
        return vec![f.to_vec()];
    }
    let lc = f[n].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // choose a prime with the fewest modular factors among a few candidates
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    for p in primes_from(3) {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = FpPoly::from_z(p, f);
        if fp.deg() != n || !fp.is_squarefree() {
            continue;
        }
        let fac = fp.factor_squarefree(&mut rng);
        if fac.len() == 1 {
            return vec![f.to_vec()];
        }
        if best.as_ref().is_none_or(|b| fac.len() < b.1.len()) {
            best = Some((p, fac));
        }
        tried += 1;
        if tried >= 8 {
            break;
        }
    }
    let (p, modular) = best.expect("some prime keeps f squarefree");

    // Mignotte-type bound on factor coefficients
    let norm2: BigInt = f.iter().map(|x| x * x).sum();
    let sqrt = norm2.sqrt() + 1;
    let bound = BigInt::from(2) * (BigInt::one() << n) * sqrt * lc.abs() * lc.abs();

    // lift all factors
    let mut lifted: Vec<Vec<BigInt>> = Vec::new();
    let mut rest = f.to_vec();
    let mut modulus = BigInt::one();
    for i in 0..modular.len() - 1 {
        let h = &modular[i];
        let others = modular[i + 1..].iter().fold(FpPoly::one(p), |a, b| a.mul(b));
        let lc_rest = FpPoly::from_z(p, &rest).lc();
        let g = others.scale(lc_rest);
        let (g2, h2, m) = hensel_two(&rest, &g, h, p, &bound);
        lifted.push(h2);
        rest = g2;
        modulus = m;
    }
    // last factor: make monic modulo p^k
    let lc_rest = rest.last().expect("non-zero").clone();
    let inv = lc_rest.modinv(&modulus).expect("lc invertible mod p^k");
    lifted.push(zmod(&rest.iter().map(|x| x * &inv).collect::<Vec<_>>(), &modulus));

    // recombination
    let check_primes: Vec<u64> = big_primes().filter(|&q| reduce_mod(&lc, q) != 0).take(2).collect();
    let mut factors = Vec::new();
    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut fcur = f.to_vec();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for subset in combinations(&remaining, size) {
            let lcur = fcur.last().expect("non-zero").clone();
            // constant-term test
            if !fcur[0].is_zero() {
                let c0 = subset.iter().fold(lcur.clone(), |acc, &i| (acc * &lifted[i][0]).mod_floor(&modulus));
                let c0 = symmetric(&[c0], &modulus).remove(0);
                if c0.is_zero() || !(&lcur * &fcur[0]).is_multiple_of(&c0) {
                    continue;
                }
            }
            let prod = subset.iter().fold(vec![lcur.clone()], |acc, &i| zmul(&acc, &lifted[i], &modulus));
            let cand = symmetric(&prod, &modulus);
            if !divides_mod_primes(&fcur, &cand, &check_primes) {
                continue;
            }
            let cand = primitive(&cand);
            if let Some(qq) = z_divides(&fcur, &cand) {
                factors.push(cand);
                fcur = primitive(&qq);
                remaining.retain(|i| !subset.contains(i));
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    factors.push(fcur);
    factors
}

fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = v.to_vec();
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    let mut r: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if r.last().is_some_and(|x| x.is_negative()) {
        r = r.iter().map(|x| -x).collect();
    }
    r
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out: Vec<Vec<usize>> =
        combinations(&items[1..], k - 1).into_iter().map(|c| [vec![items[0]], c].concat()).collect();
    out.extend(combinations(&items[1..], k));
    out
}

/// Squarefree test that first tries a few primes.
pub fn is_squarefree_fast(f: &QPoly) -> bool {
    let z = f.to_primitive_z();
    let lc = z.last().expect("non-zero").clone();
    for p in primes_from(101).take(6) {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        if FpPoly::from_z(p, &z).is_squarefree() {
            return true;
        }
    }
    let dz: Vec<BigInt> = z.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    !resultant_vanishes(&z, &dz)
}

/// Factorization over Q into monic irreducible factors with multiplicities,
/// sorted by degree then coefficients. Constants are dropped.
pub fn factor(f: &QPoly) -> Vec<(QPoly, usize)> {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    if f.deg() == 0 {
        return vec![];
    }
    let parts: Vec<(QPoly, usize)> = if is_squarefree_fast(f) {
        vec![(f.monic(), 1)]
    } else {
        squarefree_decomposition(f)
    };
    let mut out = Vec::new();
    for (g, m) in parts {
        for h in zassenhaus(&g.to_primitive_z()) {
            out.push((QPoly::from_z(&h).monic(), m));
        }
    }
    out.sort_by(|a, b| (a.0.deg(), &a.0.c).partial_cmp(&(b.0.deg(), &b.0.c)).expect("total"));
    out
}

/// Yun's algorithm.
pub fn squarefree_decomposition(f: &QPoly) -> Vec<(QPoly, usize)> {
    let f = f.monic();
    let d = f.derivative();
    let a0 = f.gcd(&d);
    let mut b = f.divrem(&a0).0;
    let mut c = d.divrem(&a0).0;
    let mut dd = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.deg() > 0 {
        let a = b.gcd(&dd);
        b = b.divrem(&a).0;
        c = dd.divrem(&a).0;
        if a.deg() > 0 {
            out.push((a, i));
        }
        dd = c.sub(&b.derivative());
        i += 1;
    }
    out
}

pub fn is_irreducible(f: &QPoly) -> bool {
    let fac = factor(f);
    fac.len() == 1 && fac[0].1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(fs: &[(QPoly, usize)]) -> QPoly {
        fs.iter().fold(QPoly::one(), |acc, (g, m)| acc.mul(&g.pow(*m as u32)))
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rational("9/2"), Some(q(9, 2)));
        assert_eq!(parse_rational("-7"), Some(qi(-7)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn factor_small() {
        // (x^2 + 1)(x - 2)(2x + 3)
        let f = QPoly::from_i64(&[1, 0, 1]).mul(&QPoly::from_i64(&[-2, 1])).mul(&QPoly::from_i64(&[3, 2]));
        let fac = factor(&f);
        assert_eq!(fac.len(), 3);
        assert_eq!(expand(&fac), f.monic());
        assert_eq!(f.rational_roots().len(), 2);
    }

    #[test]
    fn swinnerton_dyer_poly_is_irreducible() {
        // x^4 - 10x^2 + 1 splits into quadratics or linears modulo every prime
        let f = QPoly::from_i64(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&f));
        let g = f.mul(&QPoly::from_i64(&[-2, 0, 1]));
        assert_eq!(factor(&g).len(), 2);
    }

    #[test]
    fn repeated_factors() {
        let f = QPoly::from_i64(&[-1, 1]).pow(3).mul(&QPoly::from_i64(&[1, 1]));
        let fac = factor(&f);
        assert_eq!(fac, vec![(QPoly::from_i64(&[-1, 1]), 3), (QPoly::from_i64(&[1, 1]), 1)]);
    }

    #[test]
    fn cyclotomic_product() {
        // x^12 - 1 = product of cyclotomic polynomials for d | 12
        let mut c = vec![0i64; 13];
        c[0] = -1;
        c[12] = 1;
        let fac = factor(&QPoly::from_i64(&c));
        let degs: Vec<usize> = fac.iter().map(|(g, _)| g.deg()).collect();
        assert_eq!(degs, vec![1, 1, 2, 2, 2, 4]);
    }

    #[test]
    fn discriminant_cubic() {
        // x^3 - 3x + 1 has discriminant 81
        assert_eq!(QPoly::from_i64(&[1, -3, 0, 1]).discriminant(), qi(81));
    }

    #[test]
    fn fp_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = FpPoly::new(7, vec![1, 0, 0, 0, 0, 0, 0, 6]); // x^7 - 1 = (x-1)^7 mod 7 -> not squarefree
        assert!(!f.is_squarefree());
        let g = FpPoly::new(5, vec![4, 0, 0, 0, 1]); // x^4 - 1 mod 5 = product of 4 linears
        assert_eq!(g.factor_squarefree(&mut rng).len(), 4);
        assert!(FpPoly::new(2, vec![1, 1, 1]).is_irreducible());
    }
}

// ---------------------------------------------------------------------------
// Multi-modular norms

pub(crate) fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn big_primes() -> impl Iterator<Item = u64> {
    (0..).map(|k| (1u64 << 62) - 1 - 2 * k).filter(|&n| is_prime_u64(n))
}

pub(crate) fn reduce_mod(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("reduced")
}

/// Resultant mod p of `a` (leading coefficient nonzero mod p) and `b`, with
/// `b` taken at its actual degree.
fn resultant_mod(a: &[u64], b: &[u64], p: u64) -> u64 {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    if b.is_empty() {
        return 0;
    }
    let mut res = 1u64;
    loop {
        let (da, db) = (a.len() - 1, b.len() - 1);
        if db == 0 {
            return mulm(res, powm(b[0], da as u64, p), p);
        }
        // r = a mod b
        let inv = mod_inv(b[db], p);
        let mut r = a.clone();
        while r.len() > db && !r.is_empty() {
            let top = r.len() - 1;
            let f = mulm(r[top], inv, p);
            if f != 0 {
                for k in 0..=db {
                    let idx = top - db + k;
                    r[idx] = (r[idx] + p - mulm(f, b[k], p)) % p;
                }
            }
            r.pop();
            trim(&mut r);
        }
        if r.is_empty() {
            return 0;
        }
        let dr = r.len() - 1;
        if da % 2 == 1 && db % 2 == 1 {
            res = (p - res) % p;
        }
        res = mulm(res, powm(b[db], (da - dr) as u64, p), p);
        a = b;
        b = r;
    }
}

/// `∏_σ A(x, θ_σ)` over the roots `θ_σ` of the monic `m`, where `a[j]` holds
/// the θ-coordinates of the coefficient of `x^j`. Computed by evaluation and
/// interpolation modulo word primes and Chinese remaindering against a
/// Mahler-measure bound.
pub fn norm_poly(m: &QPoly, a: &[Vec<BigRational>]) -> QPoly {
    let n = m.deg();
    let e = a.iter().map(|c| c.len()).max().unwrap_or(0).saturating_sub(1);
    let dx = a.len().saturating_sub(1);
    let d = dx * n;
    // integer data: mz = c·m, az = D·a
    let mz = m.to_primitive_z();
    let den = a
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let az: Vec<Vec<BigInt>> =
        a.iter().map(|col| col.iter().map(|c| (c * BigRational::from(den.clone())).to_integer()).collect()).collect();
    let lcm = mz.last().expect("nonzero modulus").clone();
    // |coeffs of R| <= ||mz||_2^e · (Σ|az|)^n with R = lc^e ∏_σ Az(x, θ_σ)
    let norm2_sq: BigInt = mz.iter().map(|c| c * c).sum();
    let l1: BigInt = az.iter().flatten().map(|c| c.abs()).sum();
    let bound_bits = (norm2_sq.bits() as usize * e).div_ceil(2) + l1.bits() as usize * n + 2;
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); d + 1];
    for p in big_primes() {
        if (modulus.bits() as usize) > bound_bits {
            break;
        }
        if reduce_mod(&lcm, p) == 0 {
            continue;
        }
        let mp: Vec<u64> = mz.iter().map(|c| reduce_mod(c, p)).collect();
        let ap: Vec<Vec<u64>> = az.iter().map(|col| col.iter().map(|c| reduce_mod(c, p)).collect()).collect();
        let lcp = reduce_mod(&lcm, p);
        let xs: Vec<u64> = (0..=d as u64).collect();
        let ys: Vec<u64> = xs
            .iter()
            .map(|&x| {
                let mut b = vec![0u64; e + 1];
                let mut xp = 1u64;
                for col in &ap {
                    for (k, &c) in col.iter().enumerate() {
                        b[k] = (b[k] + mulm(c, xp, p)) % p;
                    }
                    xp = mulm(xp, x, p);
                }
                let deg_b = b.iter().rposition(|&c| c != 0);
                match deg_b {
                    None => 0,
                    Some(db) => mulm(resultant_mod(&mp, &b, p), powm(lcp, (e - db) as u64, p), p),
                }
            })
            .collect();
        let coeffs = interpolate_mod(&xs, &ys, p);
        // CRT
        let pb = BigInt::from(p);
        let inv = BigInt::from(mod_inv(reduce_mod(&modulus, p), p));
        for (k, ck) in coeffs.iter().enumerate() {
            let cur = reduce_mod(&acc[k], p);
            let t = ((BigInt::from(*ck) - BigInt::from(cur)) * &inv).mod_floor(&pb);
            acc[k] += &modulus * t;
        }
        modulus *= pb;
    }
    let half = &modulus >> 1;
    let scale = BigRational::new(BigInt::one(), lcm.pow(e as u32) * den.pow(n as u32));
    let cs: Vec<BigRational> = acc
        .into_iter()
        .map(|c| {
            let c = if c > half { c - &modulus } else { c };
            BigRational::from(c) * &scale
        })
        .collect();
    QPoly::new(cs)
}

fn interpolate_mod(xs: &[u64], ys: &[u64], p: u64) -> Vec<u64> {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = (coef[i] + p - coef[i - 1]) % p;
            let den = (xs[i] + p - xs[i - j]) % p;
            coef[i] = mulm(num, mod_inv(den, p), p);
        }
    }
    let mut out = vec![0u64; n];
    out[0] = coef[n - 1];
    let mut len = 1;
    for i in (0..n - 1).rev() {
        // out = out·(x - xs[i]) + coef[i]
        for k in (0..=len).rev() {
            let hi = if k > 0 { out[k - 1] } else { 0 };
            let lo = if k < len { mulm(out[k], (p - xs[i] % p) % p, p) } else { 0 };
            out[k] = (hi + lo) % p;
        }
        len += 1;
        out[0] = (out[0] + coef[i]) % p;
    }
    out
}

/// Whether `Res(a, b)` of two nonzero integer polynomials is zero, decided by
/// residues modulo word primes up to the Hadamard bound.
pub fn resultant_vanishes(a: &[BigInt], b: &[BigInt]) -> bool {
    let (da, db) = (a.len() - 1, b.len() - 1);
    let n2 = |v: &[BigInt]| v.iter().map(|c| c * c).sum::<BigInt>().bits() as usize;
    let bound_bits = (n2(a) * db + n2(b) * da).div_ceil(2) + 1;
    let mut bits = 0usize;
    for p in big_primes() {
        if bits > bound_bits {
            return true;
        }
        if reduce_mod(&a[da], p) == 0 || reduce_mod(&b[db], p) == 0 {
            continue;
        }
        let ap: Vec<u64> = a.iter().map(|c| reduce_mod(c, p)).collect();
        let bp: Vec<u64> = b.iter().map(|c| reduce_mod(c, p)).collect();
        if resultant_mod(&ap, &bp, p) != 0 {
            return false;
        }
        bits += 61;
    }
    unreachable!()
}

/// Residue of a rational modulo `p`, if the denominator is a unit.
pub(crate) fn rational_mod(c: &BigRational, p: u64) -> Option<u64> {
    let d = reduce_mod(c.denom(), p);
    (d != 0).then(|| mulm(reduce_mod(c.numer(), p), mod_inv(d, p), p))
}

/// Rational `a/b` with `|a|, |b| <= sqrt(m/2)` and `a ≡ c b (mod m)`.
pub(crate) fn rational_reconstruct(c: &BigInt, m: &BigInt) -> Option<BigRational> {
    let limit = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), c.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > limit {
        let qq = &r0 / &r1;
        let r2 = &r0 - &qq * &r1;
        let t2 = &t0 - &qq * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > limit || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}
