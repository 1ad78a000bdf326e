//! Cubic norm-residue symbols of cyclic cubic fields at finite places,
//! local evaluation of a representing function, adelic sums and the
//! distribution of local values over residue classes.
//!
//! Values live in `(1/3)Z/Z` and are stored as [`Third`]. The identification
//! `Gal(L/Q) → (1/3)Z/Z` sends a distinguished generator `σ` to `1/3`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpgeom::{is_prime, CubicForm, FqCubic, MONOMIALS};
use crate::numfield::{Elem, NumberField};
use crate::poly::{self, parse_rational, powm, FpPoly, QPoly};

/// Random elements drawn per norm-group search.
pub const NORM_SAMPLES: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("defining polynomial must be a monic integral cubic: {0}")]
    BadPolynomial(String),
    #[error("the cubic is not irreducible")]
    Reducible,
    #[error("the cubic field is not cyclic (discriminant {0} is not a square)")]
    NotCyclic(String),
    #[error("quadratic base Q(√{0}) is not supported; only base Q is implemented")]
    UnsupportedBase(i64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("Z[θ] is not maximal at {0}; use a p-maximal defining polynomial")]
    NonMaximal(u64),
    #[error("splitting data at {0} is inconsistent with a cyclic cubic field")]
    Inconsistent(u64),
    #[error("norm-group search at {p} found a quotient of order {order}")]
    NormSearch { p: u64, order: u64 },
    #[error("insufficient precision at {p}: need {need} digits, have {have}")]
    InsufficientPrecision { p: u64, need: u32, have: u32 },
    #[error("element indistinguishable from 0 at {0}")]
    Zero(u64),
    #[error("indeterminate at x for p = {0}: supply a local correction f_x or a different representative")]
    Indeterminate(u64),
    #[error("prime {0} is missing from the set of places")]
    MissingPrime(u64),
    #[error("p = {0} divides a denominator of Ψ")]
    Denominator(u64),
    #[error("representing function: {0}")]
    BadFunction(String),
    #[error("no reciprocity witness found for the identification at {0}")]
    NoWitness(u64),
    #[error("surface reduction: {0}")]
    Surface(String),
}

/// An element `k/3` of `(1/3)Z/Z`, `k ∈ {0, 1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Third(pub u8);

impl Third {
    pub const ZERO: Third = Third(0);

    pub fn new(k: i64) -> Third {
        Third(k.rem_euclid(3) as u8)
    }

    pub fn add(self, o: Third) -> Third {
        Third((self.0 + o.0) % 3)
    }

    pub fn times(self, k: i64) -> Third {
        Third::new(self.0 as i64 * k)
    }
}

impl fmt::Display for Third {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            k => write!(f, "{k}/3"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    Rational,
    Quadratic(i64),
}

/// A cyclic cubic field `L = Q[x]/(g)` with a distinguished generator `σ`
/// of its Galois group, stored as `σ(θ)` in the power basis.
#[derive(Clone, Debug)]
pub struct CyclicCubicExtension {
    g: [i64; 3],
    poly: QPoly,
    field: NumberField,
    sigma: Elem,
    sigma2: Elem,
    disc: BigInt,
}

fn to_i64(c: &BigRational) -> Option<i64> {
    c.is_integer().then(|| c.to_integer().to_i64()).flatten()
}

impl CyclicCubicExtension {
    pub fn new(base: Base, poly: &QPoly) -> Result<CyclicCubicExtension, LocalError> {
        if let Base::Quadratic(d) = base {
            return Err(LocalError::UnsupportedBase(d));
        }
        let bad = || LocalError::BadPolynomial(poly.to_string_var("x"));
        if poly.deg() != 3 || !poly.lc().is_one() {
            return Err(bad());
        }
        let mut g = [0i64; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = to_i64(&poly.coeff(i)).filter(|v| v.abs() < 1 << 20).ok_or_else(bad)?;
        }
        if !poly::is_irreducible(poly) {
            return Err(LocalError::Reducible);
        }
        let disc = poly.discriminant().to_integer();
        if disc.is_negative() || disc.sqrt().pow(2) != disc {
            return Err(LocalError::NotCyclic(disc.to_string()));
        }
        let field = NumberField::new(poly).map_err(|_| LocalError::Reducible)?;
        let mut autos: Vec<Elem> = field
            .automorphisms()
            .map_err(|_| LocalError::NotCyclic(disc.to_string()))?
            .into_iter()
            .filter(|a| *a != field.gen())
            .collect();
        if autos.len() != 2 {
            return Err(LocalError::NotCyclic(disc.to_string()));
        }
        autos.sort();
        let sigma = autos[0].clone();
        let sigma2 = field.eval_q(&QPoly::new(sigma.0.clone()), &sigma);
        debug_assert_eq!(sigma2, autos[1]);
        Ok(CyclicCubicExtension { g, poly: poly.clone(), field, sigma, sigma2, disc })
    }

    pub fn from_i64(c: [i64; 3]) -> Result<CyclicCubicExtension, LocalError> {
        CyclicCubicExtension::new(Base::Rational, &QPoly::from_i64(&[c[0], c[1], c[2], 1]))
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn sigma(&self) -> &Elem {
        &self.sigma
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    /// Primes dividing the discriminant of `g`.
    pub fn discriminant_primes(&self) -> Vec<u64> {
        let mut n = self.disc.to_u64().expect("small discriminant");
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    fn fp_poly(&self, p: u64) -> FpPoly {
        let c = self.g.iter().map(|&v| v.rem_euclid(p as i64) as u64).chain([1]).collect();
        FpPoly::new(p, c)
    }

    /// Norm of `c0 + c1 θ + c2 θ²` modulo `n`.
    pub fn norm_mod(&self, c: [u64; 3], n: u64) -> u64 {
        let n128 = n as i128;
        let g: Vec<i128> = self.g.iter().map(|&v| (v as i128).rem_euclid(n128)).collect();
        let times_theta = |y: [i128; 3]| -> [i128; 3] {
            [
                (-g[0] * y[2]).rem_euclid(n128),
                (y[0] - g[1] * y[2]).rem_euclid(n128),
                (y[1] - g[2] * y[2]).rem_euclid(n128),
            ]
        };
        let c0 = [c[0] as i128, c[1] as i128, c[2] as i128];
        let c1 = times_theta(c0);
        let c2 = times_theta(c1);
        let m = [c0, c1, c2];
        let det = m[0][0] * ((m[1][1] * m[2][2] - m[1][2] * m[2][1]) % n128)
            - m[0][1] * ((m[1][0] * m[2][2] - m[1][2] * m[2][0]) % n128)
            + m[0][2] * ((m[1][0] * m[2][1] - m[1][1] * m[2][0]) % n128);
        det.rem_euclid(n128) as u64
    }
}

// ---------------------------------------------------------------------------
// p-adic numbers given to finite precision

/// `p^v · u` with `u` a unit known modulo `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdic {
    pub p: u64,
    pub v: i64,
    pub unit: BigInt,
    pub prec: u32,
}

fn valuation(n: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    (v, n)
}

impl PAdic {
    pub fn from_rational(x: &BigRational, p: u64, prec: u32) -> Result<PAdic, LocalError> {
        if x.is_zero() {
            return Err(LocalError::Zero(p));
        }
        let (vn, un) = valuation(x.numer(), p);
        let (vd, ud) = valuation(x.denom(), p);
        let m = BigInt::from(p).pow(prec);
        let inv = ud.mod_floor(&m).modinv(&m).expect("unit");
        Ok(PAdic { p, v: vn - vd, unit: (un * inv).mod_floor(&m), prec })
    }

    /// From a residue modulo `p^prec`; the unit part loses `v` digits.
    pub fn from_residue(r: &BigInt, p: u64, prec: u32) -> Result<PAdic, LocalError> {
        let m = BigInt::from(p).pow(prec);
        let r = r.mod_floor(&m);
        if r.is_zero() {
            return Err(LocalError::Zero(p));
        }
        let (v, u) = valuation(&r, p);
        Ok(PAdic { p, v, unit: u, prec: prec - v as u32 })
    }

    pub fn mul(&self, o: &PAdic) -> PAdic {
        let prec = self.prec.min(o.prec);
        let m = BigInt::from(self.p).pow(prec);
        PAdic { p: self.p, v: self.v + o.v, unit: (&self.unit * &o.unit).mod_floor(&m), prec }
    }

    pub fn div(&self, o: &PAdic) -> PAdic {
        let prec = self.prec.min(o.prec);
        let m = BigInt::from(self.p).pow(prec);
        let inv = o.unit.mod_floor(&m).modinv(&m).expect("unit");
        PAdic { p: self.p, v: self.v - o.v, unit: (&self.unit * inv).mod_floor(&m), prec }
    }

    fn unit_mod(&self, m: u32) -> u64 {
        (&self.unit % BigInt::from(self.p).pow(m)).to_u64().expect("small modulus")
    }
}

// ---------------------------------------------------------------------------
// Norm groups by search

/// The quotient `Q_p^× / N(L_p^×)` found by searching norms modulo `p^m`.
/// The norm group image in `Z × Z/n` (valuation, discrete log of the unit
/// part) is the lattice spanned by `(a, b)` and `(0, d)`.
#[derive(Clone, Debug)]
pub struct NormQuotient {
    pub p: u64,
    pub m: u32,
    /// order of the unit group modulo p^m
    pub n: u64,
    log: Vec<u32>,
    pub a: u64,
    pub b: u64,
    pub d: u64,
}

fn primitive_root(p: u64) -> u64 {
    let mut fs = Vec::new();
    let mut n = p - 1;
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
    (2..p).find(|&g| fs.iter().all(|&f| powm(g, (p - 1) / f, p) != 1)).unwrap_or(1)
}

impl NormQuotient {
    /// Searches norms of `samples` random elements of `O_L / p^(m+3)`.
    /// Requires `p` odd and `Z[θ]` maximal at `p`.
    pub fn search(ext: &CyclicCubicExtension, p: u64, m: u32, samples: usize, seed: u64) -> NormQuotient {
        assert!(p % 2 == 1, "odd primes only");
        let pm = p.pow(m);
        let n = pm / p * (p - 1);
        let mut gen = primitive_root(p);
        if p > 2 && powm(gen, p - 1, p * p) == 1 {
            gen += p;
        }
        let mut log = vec![u32::MAX; pm as usize];
        let mut x = 1u64;
        for k in 0..n {
            log[x as usize] = k as u32;
            x = x * gen % pm;
        }
        let big = p.pow(m + 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.rotate_left(17) ^ m as u64);
        let (mut a, mut b, mut d) = (0u64, 0u64, n);
        for _ in 0..samples {
            // every other element is a multiple of p, so valuation-3 norms
            // are sampled even where units dominate
            let s = if rng.gen_bool(0.5) { p } else { 1 };
            let c = [0, 1, 2].map(|_| rng.gen_range(0..big) * s % big);
            let nm = ext.norm_mod(c, big);
            if nm == 0 {
                continue;
            }
            let mut v = 0u64;
            let mut u = nm;
            while u % p == 0 {
                u /= p;
                v += 1;
            }
            if v > 3 {
                continue;
            }
            let l = log[(u % pm) as usize] as u64;
            (a, b, d) = add_row(a, b, d, v, l);
        }
        NormQuotient { p, m, n, log, a, b, d }
    }

    pub fn order(&self) -> u64 {
        if self.a == 0 {
            0
        } else {
            self.a * self.d
        }
    }

    /// Class of `p^v · u` in the quotient, as an integer mod `order`.
    pub fn class(&self, v: i64, unit_mod_pm: u64) -> u64 {
        let l = self.log[(unit_mod_pm % self.p.pow(self.m)) as usize] as i64;
        if self.d == 1 {
            v.rem_euclid(self.a as i64) as u64
        } else if self.a == 1 {
            (l - v * self.b as i64).rem_euclid(self.d as i64) as u64
        } else {
            // order a·d with both > 1 does not occur for cubic extensions
            u64::MAX
        }
    }

    pub fn class_of(&self, x: &PAdic) -> Result<u64, LocalError> {
        if x.prec < self.m {
            return Err(LocalError::InsufficientPrecision { p: self.p, need: self.m, have: x.prec });
        }
        if self.a == 0 {
            return Err(LocalError::NormSearch { p: self.p, order: 0 });
        }
        Ok(self.class(x.v, x.unit_mod(self.m)))
    }
}

/// Adds the row `(v, l)` to the lattice `⟨(a, b), (0, d)⟩ ⊂ Z × Z/n`.
fn add_row(a: u64, b: u64, d: u64, v: u64, l: u64) -> (u64, u64, u64) {
    let (a_, b_, v_, l_, d_) = (a as i128, b as i128, v as i128, l as i128, d as i128);
    if v == 0 {
        let nd = d_.gcd(&l_) as u64;
        return (a, if nd == 0 { 0 } else { b % nd }, nd);
    }
    if a == 0 {
        return (v, l % d, d);
    }
    let e = a_.extended_gcd(&v_);
    let g = e.gcd;
    let nb = (e.x * b_ + e.y * l_).rem_euclid(d_);
    // eliminate the first coordinate: (v/g)(a, b) - (a/g)(v, l)
    let rest = ((v_ / g) * b_ - (a_ / g) * l_).rem_euclid(d_);
    let nd = d_.gcd(&rest);
    (g as u64, (nb % nd) as u64, nd as u64)
}

// ---------------------------------------------------------------------------
// Places

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug)]
pub struct LocalPlace {
    pub p: u64,
    pub splitting: Splitting,
    /// `k` with `Frob_p = σ^k`, at inert places
    pub frobenius: Option<u8>,
    /// norm quotient at the working precision and at twice it (ramified places)
    quotients: Option<(NormQuotient, NormQuotient)>,
    /// `ε` with `θ_p = ε · class / 3`, fixed by reciprocity (ramified places)
    identification: Option<u8>,
}

impl LocalPlace {
    /// Digits of precision below which the ramified symbol is not computed.
    pub fn precision_floor(p: u64) -> u32 {
        if p == 3 {
            3
        } else {
            2
        }
    }

    pub fn quotient(&self) -> Option<&NormQuotient> {
        self.quotients.as_ref().map(|q| &q.0)
    }
}

/// Splitting type of `p` in `L` and the data needed for `θ_p`.
fn classify(ext: &CyclicCubicExtension, p: u64, seed: u64) -> Result<LocalPlace, LocalError> {
    if !is_prime(p) {
        return Err(LocalError::NotPrime(p));
    }
    let gp = ext.fp_poly(p);
    let pb = BigInt::from(p);
    if !(ext.disc.clone() % &pb).is_zero() {
        let roots = gp.roots().len();
        return match roots {
            3 => Ok(LocalPlace { p, splitting: Splitting::Split, frobenius: None, quotients: None, identification: None }),
            0 => {
                let xp = FpPoly::x(p).powmod(p as u128, &gp);
                let reduce = |e: &Elem| -> Option<FpPoly> {
                    let c: Option<Vec<u64>> = e.0.iter().map(|c| poly::rational_mod(c, p)).collect();
                    c.map(|c| FpPoly::new(p, c).rem(&gp))
                };
                let k = if reduce(&ext.sigma).as_ref() == Some(&xp) {
                    1
                } else if reduce(&ext.sigma2).as_ref() == Some(&xp) {
                    2
                } else {
                    return Err(LocalError::Inconsistent(p));
                };
                Ok(LocalPlace { p, splitting: Splitting::Inert, frobenius: Some(k), quotients: None, identification: None })
            }
            _ => Err(LocalError::Inconsistent(p)),
        };
    }
    // p divides disc(g): only total ramification is possible with Z[θ] p-maximal
    let roots = gp.roots();
    if roots.len() != 1 {
        return Err(LocalError::NonMaximal(p));
    }
    let r = roots[0];
    let cube = FpPoly::new(p, vec![(p - r) % p, 1]).mul(&FpPoly::new(p, vec![(p - r) % p, 1])).mul(&FpPoly::new(p, vec![(p - r) % p, 1]));
    if cube != gp {
        return Err(LocalError::NonMaximal(p));
    }
    // Dedekind: with G = (x - r)³ over Z, p ∤ index iff ((g - G)/p)(r) ≢ 0 mod p
    let r = r as i128;
    let gcoef = [ext.g[0] as i128, ext.g[1] as i128, ext.g[2] as i128];
    let big_g = [-r * r * r, 3 * r * r, -3 * r];
    let pi = p as i128;
    let f_at_r: i128 = (0..3).map(|i| ((gcoef[i] - big_g[i]) / pi) * r.pow(i as u32)).sum();
    if f_at_r.rem_euclid(pi) == 0 {
        return Err(LocalError::NonMaximal(p));
    }
    let m = LocalPlace::precision_floor(p);
    let q1 = NormQuotient::search(ext, p, m, NORM_SAMPLES, seed);
    let q2 = NormQuotient::search(ext, p, 2 * m, NORM_SAMPLES, seed.wrapping_add(1));
    for q in [&q1, &q2] {
        if q.order() != 3 {
            return Err(LocalError::NormSearch { p, order: q.order() });
        }
    }
    // the class must depend only on the unit modulo p^m
    let pm = p.pow(m);
    for v in 0..3 {
        for u in (1..pm).filter(|u| u % p != 0) {
            if q1.class(v, u) != q2.class(v, u) {
                return Err(LocalError::InsufficientPrecision { p, need: 2 * m, have: m });
            }
        }
    }
    Ok(LocalPlace { p, splitting: Splitting::Ramified, frobenius: None, quotients: Some((q1, q2)), identification: None })
}

/// Cubic norm-residue symbols of one extension, with places computed on
/// demand and cached.
pub struct LocalSymbols {
    pub ext: CyclicCubicExtension,
    seed: u64,
    places: Mutex<BTreeMap<u64, LocalPlace>>,
}

impl LocalSymbols {
    pub fn new(ext: CyclicCubicExtension, seed: u64) -> Result<LocalSymbols, LocalError> {
        let s = LocalSymbols { ext, seed, places: Mutex::new(BTreeMap::new()) };
        s.fix_ramified_identifications()?;
        Ok(s)
    }

    pub fn place(&self, p: u64) -> Result<LocalPlace, LocalError> {
        if let Some(pl) = self.places.lock().expect("lock").get(&p) {
            return Ok(pl.clone());
        }
        let pl = classify(&self.ext, p, self.seed)?;
        if pl.splitting == Splitting::Ramified {
            // ramified places are all fixed at construction
            return Err(LocalError::Inconsistent(p));
        }
        self.places.lock().expect("lock").insert(p, pl.clone());
        Ok(pl)
    }

    pub fn ramified_primes(&self) -> Vec<u64> {
        self.places
            .lock()
            .expect("lock")
            .values()
            .filter(|pl| pl.splitting == Splitting::Ramified)
            .map(|pl| pl.p)
            .collect()
    }

    /// Fixes `Q_p^×/N ≅ (1/3)Z/Z` at each ramified `p` by the product formula:
    /// for an unramified prime `ℓ` that is a local norm at every other
    /// ramified place, `θ_p(ℓ) = -θ_ℓ(ℓ)`. A second witness must agree.
    fn fix_ramified_identifications(&self) -> Result<(), LocalError> {
        let mut ram = Vec::new();
        for q in self.ext.discriminant_primes() {
            let pl = classify(&self.ext, q, self.seed)?;
            if pl.splitting == Splitting::Ramified {
                ram.push(pl);
            } else {
                self.places.lock().expect("lock").insert(q, pl);
            }
        }
        let mut eps = vec![None; ram.len()];
        for (i, pl) in ram.iter().enumerate() {
            let mut found: Vec<u8> = Vec::new();
            for ell in (2u64..50_000).filter(|&l| is_prime(l) && ram.iter().all(|r| r.p != l)) {
                let lp = self.place(ell)?;
                let witness = PAdic::from_rational(&BigRational::from_integer(ell.into()), pl.p, 8)?;
                let others_trivial = ram.iter().enumerate().all(|(j, r)| {
                    j == i || r.quotient().expect("ramified").class_of(&PAdic::from_rational(&BigRational::from_integer(ell.into()), r.p, 8).expect("nonzero")).expect("precision") == 0
                });
                let c = pl.quotient().expect("ramified").class_of(&witness)?;
                if !others_trivial || c == 0 {
                    continue;
                }
                let frob = match lp.splitting {
                    Splitting::Inert => lp.frobenius.expect("inert") as i64,
                    // a split ℓ with θ_p(ℓ) ≠ 0 contradicts reciprocity
                    _ => return Err(LocalError::Inconsistent(pl.p)),
                };
                // ε · c ≡ -frob (mod 3), and c is its own inverse mod 3
                found.push(Third::new(-frob * c as i64).0);
                if found.len() == 2 {
                    break;
                }
            }
            match found.as_slice() {
                [e1, e2] if e1 == e2 => eps[i] = Some(*e1),
                [_, _] => return Err(LocalError::Inconsistent(pl.p)),
                _ => return Err(LocalError::NoWitness(pl.p)),
            }
        }
        let mut places = self.places.lock().expect("lock");
        for (mut pl, e) in ram.into_iter().zip(eps) {
            pl.identification = e;
            places.insert(pl.p, pl);
        }
        Ok(())
    }

    /// `θ_p(x) ∈ (1/3)Z/Z`.
    pub fn theta(&self, p: u64, x: &PAdic) -> Result<Third, LocalError> {
        let pl = self.place(p)?;
        theta_at(&pl, x)
    }

    pub fn theta_rational(&self, p: u64, x: &BigRational) -> Result<Third, LocalError> {
        self.theta(p, &PAdic::from_rational(x, p, 2 * LocalPlace::precision_floor(p))?)
    }

    /// Places where `θ(x)` can be nonzero for a rational `x`.
    pub fn support(&self, x: &BigRational) -> Vec<u64> {
        let mut out = self.ramified_primes();
        for n in [x.numer(), x.denom()] {
            let mut n = n.abs();
            let mut d = BigInt::from(2);
            while &d * &d <= n {
                if (&n % &d).is_zero() {
                    out.push(d.to_u64().expect("small prime"));
                    while (&n % &d).is_zero() {
                        n /= &d;
                    }
                }
                d += 1;
            }
            if n > BigInt::one() {
                out.push(n.to_u64().expect("small prime"));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

fn theta_at(pl: &LocalPlace, x: &PAdic) -> Result<Third, LocalError> {
    match pl.splitting {
        Splitting::Split => Ok(Third::ZERO),
        Splitting::Inert => Ok(Third::new(x.v * pl.frobenius.expect("inert") as i64)),
        Splitting::Ramified => {
            let (q1, q2) = pl.quotients.as_ref().expect("ramified");
            let c = q1.class_of(x)? as i64;
            if x.prec >= q2.m && q2.class_of(x)? as i64 != c {
                return Err(LocalError::InsufficientPrecision { p: pl.p, need: q2.m, have: x.prec });
            }
            Ok(Third::new(c * pl.identification.expect("fixed at construction") as i64))
        }
    }
}

// ---------------------------------------------------------------------------
// Representing functions and evaluation

/// A term `c · T^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub c: String,
    pub e: [u8; 4],
}

/// `Ψ = numerator / denominator`, homogeneous of equal degree. `certified`
/// records that `div(Ψ)` is a norm from `L`, so values of nonzero valuation
/// need no local correction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentingFunction {
    pub numerator: Vec<(BigRational, [u8; 4])>,
    pub denominator: Vec<(BigRational, [u8; 4])>,
    pub certified: bool,
}

#[derive(Serialize, Deserialize)]
struct PsiJson {
    cubic: Vec<String>,
    numerator: Vec<Term>,
    denominator: Vec<Term>,
    #[serde(default)]
    certified: bool,
}

fn eval_terms(t: &[(BigRational, [u8; 4])], x: &[BigInt; 4]) -> BigRational {
    t.iter().fold(BigRational::zero(), |acc, (c, e)| {
        let mono = (0..4).fold(BigInt::one(), |m, i| m * x[i].pow(e[i] as u32));
        acc + c * BigRational::from_integer(mono)
    })
}

fn eval_terms_mod(t: &[(BigRational, [u8; 4])], x: &[u64; 4], n: u64, p: u64) -> Result<u64, LocalError> {
    let nb = BigInt::from(n);
    let mut acc = BigInt::zero();
    for (c, e) in t {
        let den = c.denom().mod_floor(&nb);
        let inv = den.modinv(&nb).ok_or(LocalError::Denominator(p))?;
        let mut v = c.numer() * inv;
        for i in 0..4 {
            v = v * BigInt::from(x[i]).modpow(&BigInt::from(e[i]), &nb);
        }
        acc += v;
    }
    Ok(acc.mod_floor(&nb).to_u64().expect("reduced"))
}

impl RepresentingFunction {
    pub fn new(
        numerator: Vec<(BigRational, [u8; 4])>,
        denominator: Vec<(BigRational, [u8; 4])>,
        certified: bool,
    ) -> Result<RepresentingFunction, LocalError> {
        let degree = |t: &[(BigRational, [u8; 4])]| -> Result<u8, LocalError> {
            let ds: Vec<u8> = t.iter().filter(|(c, _)| !c.is_zero()).map(|(_, e)| e.iter().sum()).collect();
            match ds.split_first() {
                None => Err(LocalError::BadFunction("zero form".into())),
                Some((d, rest)) if rest.iter().all(|x| x == d) => Ok(*d),
                _ => Err(LocalError::BadFunction("not homogeneous".into())),
            }
        };
        if degree(&numerator)? != degree(&denominator)? {
            return Err(LocalError::BadFunction("degrees differ".into()));
        }
        Ok(RepresentingFunction { numerator, denominator, certified })
    }

    /// Parses `{"cubic": [g0, g1, g2, 1], "numerator": [{"c", "e"}], "denominator": [..], "certified"}`.
    pub fn from_json(s: &str) -> Result<(CyclicCubicExtension, RepresentingFunction), LocalError> {
        let j: PsiJson = serde_json::from_str(s).map_err(|e| LocalError::BadFunction(e.to_string()))?;
        let parse = |v: &[Term]| -> Result<Vec<(BigRational, [u8; 4])>, LocalError> {
            v.iter()
                .map(|t| parse_rational(&t.c).map(|c| (c, t.e)).ok_or_else(|| LocalError::BadFunction(t.c.clone())))
                .collect()
        };
        let cubic: Vec<BigRational> = j
            .cubic
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| LocalError::BadFunction(s.clone())))
            .collect::<Result<_, _>>()?;
        let ext = CyclicCubicExtension::new(Base::Rational, &QPoly::new(cubic))?;
        Ok((ext, RepresentingFunction::new(parse(&j.numerator)?, parse(&j.denominator)?, j.certified)?))
    }

    pub fn to_json(&self, ext: &CyclicCubicExtension) -> String {
        let terms = |t: &[(BigRational, [u8; 4])]| t.iter().map(|(c, e)| Term { c: c.to_string(), e: *e }).collect();
        let j = PsiJson {
            cubic: (0..4).map(|i| ext.poly.coeff(i).to_string()).collect(),
            numerator: terms(&self.numerator),
            denominator: terms(&self.denominator),
            certified: self.certified,
        };
        serde_json::to_string(&j).expect("serializable")
    }

    /// `Ψ(x)`, or `None` at a zero or pole.
    pub fn value(&self, x: &[i64; 4]) -> Option<BigRational> {
        let xb = x.map(BigInt::from);
        let (n, d) = (eval_terms(&self.numerator, &xb), eval_terms(&self.denominator, &xb));
        (!n.is_zero() && !d.is_zero()).then(|| n / d)
    }
}

/// `ev_p(Ψ, x)` at a rational point with coprime integer coordinates.
pub fn ev_p(sym: &LocalSymbols, psi: &RepresentingFunction, x: &[i64; 4], p: u64) -> Result<Third, LocalError> {
    let pl = sym.place(p)?;
    if pl.splitting == Splitting::Split {
        return Ok(Third::ZERO);
    }
    let val = psi.value(x).ok_or(LocalError::Indeterminate(p))?;
    let px = PAdic::from_rational(&val, p, 2 * LocalPlace::precision_floor(p))?;
    if px.v != 0 && !psi.certified {
        return Err(LocalError::Indeterminate(p));
    }
    theta_at(&pl, &px)
}

/// `Σ_p ev_p(Ψ, x)` over `primes`; the archimedean place contributes 0.
pub fn adelic_sum(sym: &LocalSymbols, psi: &RepresentingFunction, x: &[i64; 4], primes: &[u64]) -> Result<Third, LocalError> {
    let val = psi.value(x).ok_or(LocalError::Indeterminate(0))?;
    if let Some(q) = sym.support(&val).into_iter().find(|q| !primes.contains(q)) {
        return Err(LocalError::MissingPrime(q));
    }
    primes.iter().try_fold(Third::ZERO, |acc, &p| Ok(acc.add(ev_p(sym, psi, x, p)?)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueDistribution {
    pub p: u64,
    /// number of smooth `F_p`-points with local value `0, 1/3, 2/3`
    pub counts: [usize; 3],
    /// smooth points on which `Ψ` is not a unit for every lift
    pub indeterminate: Vec<[u64; 4]>,
}

impl ResidueDistribution {
    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.indeterminate.len()
    }

    /// The class sizes are all equal or all mass sits in one class.
    pub fn is_equal_or_concentrated(&self) -> bool {
        let nonzero = self.counts.iter().filter(|&&c| c > 0).count();
        nonzero <= 1 || self.counts.iter().all(|&c| c == self.counts[0])
    }
}

fn eval_form_mod(c: &[i128; 20], x: &[i128; 4], n: i128) -> i128 {
    MONOMIALS.iter().zip(c).fold(0i128, |acc, (m, &a)| {
        let t = (0..4).fold(a.rem_euclid(n), |t, i| (0..m[i]).fold(t, |t, _| t * x[i] % n));
        (acc + t) % n
    })
}

fn partial_mod(c: &[i128; 20], i: usize, x: &[i128; 4], n: i128) -> i128 {
    MONOMIALS.iter().zip(c).fold(0i128, |acc, (m, &a)| {
        if m[i] == 0 {
            return acc;
        }
        let mut t = (a * m[i] as i128).rem_euclid(n);
        for j in 0..4 {
            let e = if j == i { m[j] - 1 } else { m[j] };
            for _ in 0..e {
                t = t * x[j] % n;
            }
        }
        (acc + t) % n
    })
}

/// Lifts a smooth `F_p`-point to a point modulo `p^prec` by Newton's method
/// in one coordinate with nonvanishing partial derivative; `offset` shifts
/// the other coordinates by multiples of `p` to select a different lift.
pub fn hensel_lift(f: &CubicForm, x: [u64; 4], p: u64, prec: u32, offset: [u64; 4]) -> Option<[u64; 4]> {
    let z = f.primitive_integral();
    let c: Vec<i128> = z.iter().map(|v| v.to_i128().expect("small coefficients")).collect();
    let c: [i128; 20] = c.try_into().expect("20 coefficients");
    let n = (p as i128).pow(prec);
    let pi = p as i128;
    let xi = x.map(|v| v as i128);
    let var = (0..4).find(|&i| partial_mod(&c, i, &xi, pi) != 0)?;
    let mut y: [i128; 4] = std::array::from_fn(|i| if i == var { xi[i] } else { (xi[i] + pi * offset[i] as i128) % n });
    for _ in 0..=prec {
        let fv = eval_form_mod(&c, &y, n);
        if fv == 0 {
            break;
        }
        let d = partial_mod(&c, var, &y, n);
        let dinv = BigInt::from(d).modinv(&BigInt::from(n))?.to_i128()?;
        y[var] = (y[var] - fv * dinv % n).rem_euclid(n);
    }
    (eval_form_mod(&c, &y, n) == 0).then(|| y.map(|v| v as u64))
}

/// Distribution of `ev_p` over the smooth `F_p`-points, one lift per point.
pub fn residue_distribution(
    sym: &LocalSymbols,
    psi: &RepresentingFunction,
    f: &CubicForm,
    p: u64,
) -> Result<ResidueDistribution, LocalError> {
    let pl = sym.place(p)?;
    let fq = FqCubic::new(f, p, 1).map_err(|e| LocalError::Surface(e.to_string()))?;
    let smooth: Vec<[u64; 4]> = fq
        .points()
        .into_iter()
        .filter(|x| !fq.is_singular_at(x))
        .map(|x| x.map(|v| fq.field.index(v)))
        .collect();
    let prec = 2 * LocalPlace::precision_floor(p);
    let n = p.pow(prec);
    let values: Vec<Result<Option<Third>, LocalError>> = smooth
        .par_iter()
        .map(|x| {
            let y = hensel_lift(f, *x, p, prec, [0; 4]).ok_or(LocalError::Inconsistent(p))?;
            let num = eval_terms_mod(&psi.numerator, &y, n, p)?;
            let den = eval_terms_mod(&psi.denominator, &y, n, p)?;
            if num % p == 0 || den % p == 0 {
                return Ok(None);
            }
            let v = PAdic::from_residue(&num.into(), p, prec)?.div(&PAdic::from_residue(&den.into(), p, prec)?);
            theta_at(&pl, &v).map(Some)
        })
        .collect();
    let mut counts = [0usize; 3];
    let mut indeterminate = Vec::new();
    for (x, r) in smooth.iter().zip(values) {
        match r? {
            Some(t) => counts[t.0 as usize] += 1,
            None => indeterminate.push(*x),
        }
    }
    Ok(ResidueDistribution { p, counts, indeterminate })
}

/// The surface `N_{L/Q}(T0 + T1 θ) = c · T2 T3 (T2 + a T3)` with `Ψ = T2 / T3`.
/// The divisors of `T2`, `T3` and `T2 + a T3` on it are norms of lines over
/// `L`, so the class of `(L/Q, Ψ)` is unramified.
pub fn synthetic_instance(ext: &CyclicCubicExtension, c: i64, a: i64) -> (CubicForm, RepresentingFunction) {
    let [g0, g1, g2] = ext.g;
    // N(T0 + T1 θ) = T0³ - g2 T0² T1 + g1 T0 T1² - g0 T1³
    let f = CubicForm::from_terms(&[
        (1, [3, 0, 0, 0]),
        (-g2, [2, 1, 0, 0]),
        (g1, [1, 2, 0, 0]),
        (-g0, [0, 3, 0, 0]),
        (-c, [0, 0, 2, 1]),
        (-c * a, [0, 0, 1, 2]),
    ])
    .expect("nonzero");
    let one = BigRational::one();
    let psi = RepresentingFunction::new(vec![(one.clone(), [0, 0, 1, 0])], vec![(one, [0, 0, 0, 1])], true).expect("valid");
    (f, psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_rows() {
        // Z × Z/6 with rows (0, 2) and (3, 1): quotient of order 3·2
        let (a, b, d) = add_row(0, 0, 6, 0, 2);
        assert_eq!((a, b, d), (0, 0, 2));
        let (a, b, d) = add_row(a, b, d, 3, 1);
        assert_eq!((a, b, d), (3, 1, 2));
        let (a, _, d) = add_row(a, b, d, 2, 0);
        assert_eq!(a * d, 2);
    }

    #[test]
    fn padic_arithmetic() {
        let x = PAdic::from_rational(&BigRational::new(50.into(), 3.into()), 5, 4).unwrap();
        assert_eq!(x.v, 2);
        assert_eq!((x.unit.clone() * BigInt::from(3) % BigInt::from(625)).to_u64(), Some(2));
        let y = PAdic::from_residue(&BigInt::from(250), 5, 4).unwrap();
        assert_eq!((y.v, y.prec), (3, 1));
        assert!(PAdic::from_residue(&BigInt::from(625), 5, 4).is_err());
    }
}
