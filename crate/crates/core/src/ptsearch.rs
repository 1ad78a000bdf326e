//! Height-bounded search for rational points on cubic surfaces.
//!
//! Points are primitive integer vectors with first nonzero coordinate
//! positive; the height is the largest absolute coordinate.

use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpgeom::{CubicForm, MONOMIALS};

/// Largest height accepted by [`search_oracle`].
pub const ORACLE_MAX_HEIGHT: u64 = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("height bound must be at least 1")]
    ZeroHeight,
    #[error("the oracle accepts heights up to {ORACLE_MAX_HEIGHT}, got {0}")]
    OracleHeight(u64),
    #[error("coefficients too large for exact 128-bit evaluation at height {0}")]
    Overflow(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HeightBound(u64);

impl HeightBound {
    pub fn new(b: u64) -> Result<HeightBound, SearchError> {
        if b == 0 {
            Err(SearchError::ZeroHeight)
        } else {
            Ok(HeightBound(b))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub height: u64,
    pub count: usize,
    /// sorted
    pub points: Vec<[i64; 4]>,
}

/// Integer coefficients of the primitive multiple, checked against the bound.
fn integral_coeffs(f: &CubicForm, b: u64) -> Result<[i128; 20], SearchError> {
    let z = f.primitive_integral();
    let mut out = [0i128; 20];
    let mut total: u128 = 0;
    for (o, c) in out.iter_mut().zip(&z) {
        *o = c.to_i128().filter(|v| v.unsigned_abs() < 1u128 << 60).ok_or(SearchError::Overflow(b))?;
        total = total.saturating_add(o.unsigned_abs());
    }
    let b3 = (b as u128).pow(3);
    if total.checked_mul(b3).map_or(true, |v| v >= 1u128 << 60) {
        return Err(SearchError::Overflow(b));
    }
    Ok(out)
}

pub fn is_canonical(x: &[i64; 4]) -> bool {
    x.iter().find(|v| **v != 0).is_some_and(|v| *v > 0) && x.iter().fold(0i64, |g, v| g.gcd(v)) == 1
}

fn eval(c: &[i128; 20], x: &[i64; 4]) -> i128 {
    MONOMIALS.iter().zip(c).fold(0i128, |acc, (m, &a)| {
        if a == 0 {
            return acc;
        }
        acc + m.iter().zip(x).fold(a, |t, (&e, &v)| t * (v as i128).pow(e as u32))
    })
}

/// Value of `g(x) = c0 + c1 x + c2 x² + c3 x³`.
fn horner(g: &[i128; 4], x: i128) -> i128 {
    ((g[3] * x + g[2]) * x + g[1]) * x + g[0]
}

fn degree(g: &[i128; 4]) -> Option<usize> {
    (0..4).rev().find(|&i| g[i] != 0)
}

/// Integer bracket `[floor(lo), ceil(hi)]` around the real roots of
/// `a x² + b x + c` (a ≠ 0), exact: uses the integer square root of the
/// discriminant and rounds outward.
fn quadratic_root_brackets(a: i128, b: i128, c: i128) -> Vec<(i128, i128)> {
    let disc = b * b - 4 * a * c;
    if disc < 0 {
        return vec![];
    }
    let s = (disc as u128).sqrt() as i128;
    // roots lie in ((-b ± s)/(2a), (-b ± (s+1))/(2a)) up to orientation
    let den = 2 * a;
    let mut out = Vec::new();
    for sign in [-1i128, 1] {
        let p = -b + sign * s;
        let q = -b + sign * (s + 1);
        let (x, y) = (Integer::div_floor(&p, &den), Integer::div_floor(&q, &den));
        let lo = x.min(y);
        let hi = x.max(y) + 1;
        out.push((lo, hi));
    }
    out
}

/// Pushes every integer root of `g` in `[lo, hi]` on a range where `g` is
/// monotone.
fn monotone_roots(g: &[i128; 4], lo: i128, hi: i128, out: &mut Vec<i128>) {
    if lo > hi {
        return;
    }
    let (glo, ghi) = (horner(g, lo), horner(g, hi));
    if glo == 0 {
        out.push(lo);
    }
    if ghi == 0 && hi != lo {
        out.push(hi);
    }
    if glo.signum() * ghi.signum() >= 0 {
        return;
    }
    let (mut l, mut h) = (lo, hi);
    let increasing = glo < 0;
    while h - l > 1 {
        let m = l + (h - l) / 2;
        let v = horner(g, m);
        if v == 0 {
            out.push(m);
            return;
        }
        if (v < 0) == increasing {
            l = m;
        } else {
            h = m;
        }
    }
}

/// All integer roots of the nonzero polynomial `g` (degree ≤ 3) in `[lo, hi]`.
/// Returns `None` when `g` vanishes identically.
fn integer_roots(g: &[i128; 4], lo: i128, hi: i128) -> Option<Vec<i128>> {
    let mut out = Vec::new();
    match degree(g) {
        None => return None,
        Some(0) => {}
        Some(1) => {
            if g[0] % g[1] == 0 {
                let x = -g[0] / g[1];
                if lo <= x && x <= hi {
                    out.push(x);
                }
            }
        }
        Some(d) => {
            // cut points around the critical points, where g may turn
            let brackets = if d == 2 {
                let v = Integer::div_floor(&-g[1], &(2 * g[2]));
                vec![(v, v + 1)]
            } else {
                quadratic_root_brackets(3 * g[3], 2 * g[2], g[1])
            };
            let mut cuts: Vec<(i128, i128)> = brackets
                .into_iter()
                .map(|(a, b)| (a.max(lo), b.min(hi)))
                .filter(|(a, b)| a <= b)
                .collect();
            cuts.sort();
            let mut start = lo;
            for (a, b) in cuts {
                if a > start {
                    monotone_roots(g, start, a - 1, &mut out);
                }
                for x in a.max(start)..=b {
                    if horner(g, x) == 0 {
                        out.push(x);
                    }
                }
                start = start.max(b + 1);
            }
            monotone_roots(g, start, hi, &mut out);
            out.sort();
            out.dedup();
        }
    }
    Some(out)
}

/// Optimized search: for every slice `(T1, T2, T3)` the form is a cubic in
/// `T0` whose integer roots are isolated exactly. Only slices with
/// positive leading entry (and the zero slice) are visited.
pub fn search(f: &CubicForm, b: HeightBound) -> Result<SearchResult, SearchError> {
    let bb = b.get();
    let c = integral_coeffs(f, bb)?;
    let bi = bb as i64;
    // coefficient of T0^e as a polynomial in (T1, T2, T3): (exponents, coeff)
    let mut parts: [Vec<([u8; 3], i128)>; 4] = Default::default();
    for (m, &a) in MONOMIALS.iter().zip(&c) {
        if a != 0 {
            parts[m[0] as usize].push(([m[1], m[2], m[3]], a));
        }
    }
    let slice_poly = |y: [i64; 3]| -> [i128; 4] {
        let mut g = [0i128; 4];
        for (e, terms) in parts.iter().enumerate() {
            g[e] = terms
                .iter()
                .map(|(m, a)| (0..3).fold(*a, |t, i| t * (y[i] as i128).pow(m[i] as u32)))
                .sum();
        }
        g
    };
    let mut points: Vec<[i64; 4]> = (0..=bi)
        .into_par_iter()
        .flat_map_iter(|y1| {
            let mut local = Vec::new();
            let y2_lo = if y1 == 0 { 0 } else { -bi };
            for y2 in y2_lo..=bi {
                let y3_lo = if y1 == 0 && y2 == 0 { 0 } else { -bi };
                for y3 in y3_lo..=bi {
                    let y = [y1, y2, y3];
                    let g = slice_poly(y);
                    if y == [0, 0, 0] {
                        if horner(&g, 1) == 0 {
                            local.push([1, 0, 0, 0]);
                        }
                        continue;
                    }
                    // y has positive leading entry; (x, y) and (-x, -y) are the
                    // same point, so the slice -y needs no visit
                    let roots = integer_roots(&g, -(bi as i128), bi as i128)
                        .unwrap_or_else(|| (-(bi as i128)..=bi as i128).collect());
                    for x in roots {
                        let x = x as i64;
                        let p = if x < 0 { [-x, -y1, -y2, -y3] } else { [x, y1, y2, y3] };
                        if is_canonical(&p) {
                            local.push(p);
                        }
                    }
                }
            }
            local
        })
        .collect();
    points.sort();
    points.dedup();
    Ok(SearchResult { height: bb, count: points.len(), points })
}

/// Naive oracle: four nested loops over `[-B, B]`, exact evaluation.
pub fn search_oracle(f: &CubicForm, b: u64) -> Result<SearchResult, SearchError> {
    if b == 0 {
        return Err(SearchError::ZeroHeight);
    }
    if b > ORACLE_MAX_HEIGHT {
        return Err(SearchError::OracleHeight(b));
    }
    let c = integral_coeffs(f, b)?;
    let bi = b as i64;
    let mut points = Vec::new();
    for x0 in -bi..=bi {
        for x1 in -bi..=bi {
            for x2 in -bi..=bi {
                for x3 in -bi..=bi {
                    let x = [x0, x1, x2, x3];
                    if is_canonical(&x) && eval(&c, &x) == 0 {
                        points.push(x);
                    }
                }
            }
        }
    }
    points.sort();
    Ok(SearchResult { height: b, count: points.len(), points })
}

/// Exact check that `x` lies on the surface.
pub fn on_surface(f: &CubicForm, x: &[i64; 4]) -> bool {
    f.eval_int(x).is_zero()
}

/// Max-norm height.
pub fn height(x: &[i64; 4]) -> u64 {
    x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(g: &[i128; 4], lo: i128, hi: i128) -> Vec<i128> {
        (lo..=hi).filter(|&x| horner(g, x) == 0).collect()
    }

    #[test]
    fn roots_match_brute_force() {
        let cases: [[i128; 4]; 6] = [
            [-6, 11, -6, 1],     // 1, 2, 3
            [0, 0, 0, 5],        // triple root 0
            [4, -4, 1, 0],       // (x-2)²
            [-30, -1, 6, 1],     // -5, -3, 2
            [7, 0, 0, 0],        // constant
            [1000, 0, -10, 0],   // x² = 100
        ];
        for g in cases {
            assert_eq!(integer_roots(&g, -50, 50).unwrap(), brute(&g, -50, 50), "{g:?}");
        }
        assert_eq!(integer_roots(&[0; 4], -1, 1), None);
    }
}
