//! Exact integer linear algebra: matrices over `Z`, Hermite and Smith normal
//! forms, lattices in `Z^n` and finite abelian groups.
//!
//! Everything here works with arbitrary precision integers. Matrices in this
//! crate are small (at most a few dozen rows), so the algorithms favour
//! simplicity over asymptotic speed.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector is not contained in the lattice")]
    NotContained,
    #[error("sublattice is not contained in the superlattice")]
    NotSublattice,
    #[error("matrix is not unimodular")]
    NotUnimodular,
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim);
            for (i, x) in col.iter().enumerate() {
                m.data[i * cols.len() + j] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "incompatible shapes");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    /// Determinant via fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    pub fn rank(&self) -> usize {
        row_hnf(self.row_vectors(), self.cols).len()
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix, LatticeError> {
        let n = self.rows;
        if n != self.cols {
            return Err(LatticeError::NotUnimodular);
        }
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                let mut row: Vec<BigRational> =
                    self.row(r).iter().map(|x| BigRational::from_integer(x.clone())).collect();
                row.extend((0..n).map(|c| {
                    if c == r {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                row
            })
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(LatticeError::NotUnimodular)?;
            a.swap(k, p);
            let inv = a[k][k].recip();
            for x in a[k].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..n {
                if i != k && !a[i][k].is_zero() {
                    let f = a[i][k].clone();
                    for c in 0..2 * n {
                        let v = &a[k][c] * &f;
                        a[i][c] -= v;
                    }
                }
            }
        }
        let mut out = IntMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let x = &a[r][n + c];
                if !x.is_integer() {
                    return Err(LatticeError::NotUnimodular);
                }
                out.set(r, c, x.to_integer());
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * f;
            self.data[dst * self.cols + c] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * f;
            self.data[r * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -&self.data[r * self.cols + c];
            self.data[r * self.cols + c] = v;
        }
    }
}

/// Result of [`snf`]: `u * m * v == s` with `s` diagonal and
/// `s[i][i] | s[i+1][i+1]`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivots on the entry of minimal absolute value in the remaining block.
pub fn snf(m: &IntMatrix) -> SmithForm {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for r in t..s.rows {
            for c in t..s.cols {
                let x = s.get(r, c);
                if !x.is_zero() && best.map_or(true, |(br, bc)| x.abs() < s.get(br, bc).abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        s.swap_rows(t, pr);
        u.swap_rows(t, pr);
        s.swap_cols(t, pc);
        v.swap_cols(t, pc);

        loop {
            let mut dirty = false;
            for r in t + 1..s.rows {
                if !s.get(r, t).is_zero() {
                    let q = s.get(r, t).div_floor(s.get(t, t));
                    let q = -q;
                    s.add_row(r, t, &q);
                    u.add_row(r, t, &q);
                    if !s.get(r, t).is_zero() {
                        dirty = true;
                    }
                }
            }
            for c in t + 1..s.cols {
                if !s.get(t, c).is_zero() {
                    let q = -s.get(t, c).div_floor(s.get(t, t));
                    s.add_col(c, t, &q);
                    v.add_col(c, t, &q);
                    if !s.get(t, c).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // move the smallest nonzero entry of row/column t to the pivot
                let mut best = (t, t);
                for r in t + 1..s.rows {
                    let x = s.get(r, t);
                    if !x.is_zero() && x.abs() < s.get(best.0, best.1).abs() {
                        best = (r, t);
                    }
                }
                for c in t + 1..s.cols {
                    let x = s.get(t, c);
                    if !x.is_zero() && x.abs() < s.get(best.0, best.1).abs() {
                        best = (t, c);
                    }
                }
                s.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
                s.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
                continue;
            }
            // divisibility condition on the trailing block
            let piv = s.get(t, t).clone();
            let bad = (t + 1..s.rows)
                .find(|&r| (t + 1..s.cols).any(|c| !s.get(r, c).is_multiple_of(&piv)));
            match bad {
                Some(r) => {
                    let one = BigInt::one();
                    s.add_row(t, r, &one);
                    u.add_row(t, r, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithForm { u, s, v }
}

/// Row-style Hermite normal form of the lattice spanned by `vectors`.
///
/// Returns the nonzero rows, echelon with strictly increasing pivot columns,
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn row_hnf(vectors: Vec<Vec<BigInt>>, dim: usize) -> Vec<Vec<BigInt>> {
    row_hnf_with_transform(vectors, dim).0
}

/// Like [`row_hnf`], additionally returns for each input combination the
/// coefficient rows: `rows_out[i] = sum_j t[i][j] * vectors[j]`. The rows of
/// `t` beyond the rank span the integer relations among the inputs.
fn row_hnf_with_transform(
    mut rows: Vec<Vec<BigInt>>,
    dim: usize,
) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = rows.len();
    let mut t: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut piv_row = 0;
    let mut pivots = Vec::new();
    for col in 0..dim {
        if piv_row >= m {
            break;
        }
        loop {
            // row with smallest nonzero |entry| in this column
            let best = (piv_row..m)
                .filter(|&r| !rows[r][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(best) = best else { break };
            rows.swap(piv_row, best);
            t.swap(piv_row, best);
            let mut done = true;
            for r in piv_row + 1..m {
                if rows[r][col].is_zero() {
                    continue;
                }
                let q = rows[r][col].div_floor(&rows[piv_row][col]);
                sub_scaled(&mut rows, r, piv_row, &q);
                sub_scaled(&mut t, r, piv_row, &q);
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if piv_row < m && !rows[piv_row][col].is_zero() {
            if rows[piv_row][col].is_negative() {
                for x in rows[piv_row].iter_mut() {
                    *x = -&*x;
                }
                for x in t[piv_row].iter_mut() {
                    *x = -&*x;
                }
            }
            for r in 0..piv_row {
                let q = rows[r][col].div_floor(&rows[piv_row][col]);
                sub_scaled(&mut rows, r, piv_row, &q);
                sub_scaled(&mut t, r, piv_row, &q);
            }
            pivots.push(col);
            piv_row += 1;
        }
    }
    let relations = t.split_off(piv_row);
    rows.truncate(piv_row);
    (rows, t, relations)
}

fn sub_scaled(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Integer kernel `{x in Z^cols : m x = 0}`, returned as a list of basis vectors
/// in Hermite form.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    // Rows of m^T are the images of the unit vectors; relations among them
    // are exactly the kernel.
    let (_, _, relations) = row_hnf_with_transform(m.transpose().row_vectors(), m.rows);
    row_hnf(relations, m.cols)
}

/// A full-dimensional or lower rank sublattice of `Z^n`, stored by its
/// canonical Hermite basis. Equal lattices have identical representations.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    ambient_dim: usize,
    /// Basis vectors in row-echelon Hermite form.
    basis: Vec<Vec<BigInt>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(dim {}, rank {}) ", self.ambient_dim, self.rank())?;
        f.debug_list().entries(self.basis.iter().map(|v| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        }))
        .finish()
    }
}

impl Lattice {
    pub fn from_generators(ambient_dim: usize, gens: Vec<Vec<BigInt>>) -> Self {
        for g in &gens {
            assert_eq!(g.len(), ambient_dim, "generator of wrong length");
        }
        Lattice { ambient_dim, basis: row_hnf(gens, ambient_dim) }
    }

    pub fn from_i64(ambient_dim: usize, gens: &[Vec<i64>]) -> Self {
        Self::from_generators(
            ambient_dim,
            gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        )
    }

    pub fn full(ambient_dim: usize) -> Self {
        let gens = (0..ambient_dim)
            .map(|i| (0..ambient_dim).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect();
        Self::from_generators(ambient_dim, gens)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Lattice { ambient_dim, basis: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_vectors(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Basis as a matrix whose columns are the basis vectors.
    pub fn basis_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.ambient_dim, &self.basis)
    }

    /// Coordinates of `x` with respect to the Hermite basis.
    pub fn coordinates(&self, x: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if x.len() != self.ambient_dim {
            return Err(LatticeError::DimensionMismatch(x.len(), self.ambient_dim));
        }
        let mut rest = x.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for b in &self.basis {
            let piv = b.iter().position(|v| !v.is_zero()).expect("zero basis vector");
            let (q, r) = rest[piv].div_rem(&b[piv]);
            if !r.is_zero() {
                return Err(LatticeError::NotContained);
            }
            if !q.is_zero() {
                for (y, bv) in rest.iter_mut().zip(b) {
                    *y -= &q * bv;
                }
            }
            coords.push(q);
        }
        if rest.iter().all(Zero::is_zero) {
            Ok(coords)
        } else {
            Err(LatticeError::NotContained)
        }
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_ok()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.ambient_dim == self.ambient_dim && other.basis.iter().all(|b| self.contains(b))
    }

    /// Sum of two lattices.
    pub fn join(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LatticeError::DimensionMismatch(self.ambient_dim, other.ambient_dim));
        }
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        Ok(Lattice::from_generators(self.ambient_dim, gens))
    }

    /// Image under a linear map given as a matrix acting on column vectors.
    pub fn image(&self, m: &IntMatrix) -> Lattice {
        assert_eq!(m.cols(), self.ambient_dim);
        Lattice::from_generators(m.rows(), self.basis.iter().map(|b| m.mul_vec(b)).collect())
    }
}

/// Intersection of two lattices in the same ambient space.
pub fn lattice_intersect(a: &Lattice, b: &Lattice) -> Result<Lattice, LatticeError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(LatticeError::DimensionMismatch(a.ambient_dim, b.ambient_dim));
    }
    let n = a.ambient_dim;
    if a.rank() == 0 || b.rank() == 0 {
        return Ok(Lattice::zero(n));
    }
    // x = A u = B w  <=>  [A | -B] (u, w) = 0
    let ra = a.rank();
    let mut cols: Vec<Vec<BigInt>> = a.basis.clone();
    cols.extend(b.basis.iter().map(|v| v.iter().map(|x| -x).collect()));
    let m = IntMatrix::from_columns(n, &cols);
    let kernel = integer_kernel(&m);
    let gens = kernel
        .iter()
        .map(|k| {
            let mut x = vec![BigInt::zero(); n];
            for (coef, bv) in k[..ra].iter().zip(&a.basis) {
                if !coef.is_zero() {
                    for (xi, bi) in x.iter_mut().zip(bv) {
                        *xi += coef * bi;
                    }
                }
            }
            x
        })
        .collect();
    Ok(Lattice::from_generators(n, gens))
}

/// Finite abelian group `Z/d1 x ... x Z/dk` with `d1 | d2 | ... | dk`, all `>= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    /// Builds the group from any list of cyclic orders; ones are dropped and
    /// the list is brought into divisibility-chain form.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let diag: Vec<BigInt> = orders.iter().map(|x| x.abs()).collect();
        let n = diag.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        let s = snf(&m);
        let inv = s.diagonal().into_iter().filter(|d| !d.is_one()).collect::<Vec<_>>();
        assert!(inv.iter().all(|d| !d.is_zero()), "infinite cyclic factor");
        FiniteAbelianGroup { invariant_factors: inv }
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { invariant_factors: Vec::new() }
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    /// Invariant factors as machine integers; panics beyond `u64`.
    pub fn factors_u64(&self) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .map(|d| u64::try_from(d).expect("invariant factor overflows u64"))
            .collect()
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Outcome of [`quotient_structure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientStructure {
    Finite(FiniteAbelianGroup),
    /// `sup / sub` has free rank `free_rank > 0`.
    Infinite { free_rank: usize, torsion: FiniteAbelianGroup },
}

/// Structure of `sup / sub`.
pub fn quotient_structure(sup: &Lattice, sub: &Lattice) -> Result<QuotientStructure, LatticeError> {
    let q = QuotientMap::new(sup, sub)?;
    let torsion = q.group();
    if q.free_rank > 0 {
        Ok(QuotientStructure::Infinite { free_rank: q.free_rank, torsion })
    } else {
        Ok(QuotientStructure::Finite(torsion))
    }
}

/// Explicit presentation of a quotient `sup / sub`: a basis of `sup` adapted
/// to `sub`, so that elements of `sup` can be mapped to their coordinates in
/// `Z/d1 x ... x Z/dk (x Z^r)`.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    sup: Lattice,
    /// Rows: change of coordinates from the Hermite basis of `sup` to the
    /// adapted basis.
    u: IntMatrix,
    /// Diagonal of the Smith form, one entry per adapted basis vector; zero
    /// marks a free direction.
    diag: Vec<BigInt>,
    free_rank: usize,
}

impl QuotientMap {
    pub fn new(sup: &Lattice, sub: &Lattice) -> Result<Self, LatticeError> {
        if sup.ambient_dim != sub.ambient_dim {
            return Err(LatticeError::DimensionMismatch(sup.ambient_dim, sub.ambient_dim));
        }
        let r = sup.rank();
        // coordinate matrix: column j = coordinates of sub basis vector j
        let mut coord_cols = Vec::with_capacity(sub.rank());
        for b in &sub.basis {
            coord_cols.push(sup.coordinates(b).map_err(|_| LatticeError::NotSublattice)?);
        }
        let c = IntMatrix::from_columns(r, &coord_cols);
        let sf = snf(&c);
        let mut diag = vec![BigInt::zero(); r];
        for (i, d) in sf.diagonal().into_iter().enumerate() {
            diag[i] = d;
        }
        let free_rank = diag.iter().filter(|d| d.is_zero()).count();
        Ok(QuotientMap { sup: sup.clone(), u: sf.u, diag, free_rank })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Torsion part of the quotient.
    pub fn group(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup {
            invariant_factors: self
                .diag
                .iter()
                .filter(|d| !d.is_zero() && !d.is_one())
                .cloned()
                .collect(),
        }
    }

    /// Indices (into the adapted basis) of the nontrivial torsion generators,
    /// aligned with [`FiniteAbelianGroup::invariant_factors`].
    fn torsion_indices(&self) -> Vec<usize> {
        (0..self.diag.len()).filter(|&i| !self.diag[i].is_zero() && !self.diag[i].is_one()).collect()
    }

    /// Coordinates of an element of `sup` in the torsion part: entry `i` is
    /// taken modulo the `i`-th invariant factor.
    pub fn torsion_coordinates(&self, x: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        let c = self.sup.coordinates(x)?;
        let adapted = self.u.mul_vec(&c);
        Ok(self
            .torsion_indices()
            .into_iter()
            .map(|i| adapted[i].mod_floor(&self.diag[i]))
            .collect())
    }

    /// Representatives in `sup` of the torsion generators.
    pub fn torsion_generators(&self) -> Vec<Vec<BigInt>> {
        let uinv = self.u.inverse_unimodular().expect("SNF transform is unimodular");
        let b = self.sup.basis_matrix();
        let adapted = b.mul(&uinv);
        self.torsion_indices().into_iter().map(|i| adapted.column(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn factors(g: &FiniteAbelianGroup) -> Vec<u64> {
        g.factors_u64()
    }

    #[test]
    fn snf_identity() {
        let sf = snf(&bi(&[vec![1, 0], vec![0, 1]]));
        assert_eq!(sf.s, bi(&[vec![1, 0], vec![0, 1]]));
    }

    #[test]
    fn snf_two_by_two() {
        let m = bi(&[vec![2, 4], vec![6, 8]]);
        let sf = snf(&m);
        assert_eq!(sf.s, bi(&[vec![2, 0], vec![0, 4]]));
        assert_eq!(sf.u.mul(&m).mul(&sf.v), sf.s);
    }

    #[test]
    fn snf_zero() {
        let sf = snf(&IntMatrix::zeros(2, 2));
        assert!(sf.s.is_zero());
    }

    #[test]
    fn snf_rectangular() {
        let m = bi(&[vec![3, 6, 9], vec![2, 4, 8]]);
        let sf = snf(&m);
        assert_eq!(sf.u.mul(&m).mul(&sf.v), sf.s);
        assert_eq!(sf.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn intersect_examples() {
        let z2 = Lattice::full(2);
        assert_eq!(lattice_intersect(&z2, &z2).unwrap(), z2);

        let a = Lattice::from_i64(2, &[vec![2, 0], vec![0, 1]]);
        let b = Lattice::from_i64(2, &[vec![1, 1]]);
        assert_eq!(lattice_intersect(&a, &b).unwrap(), Lattice::from_i64(2, &[vec![2, 2]]));

        let a = Lattice::from_i64(2, &[vec![1, 0]]);
        let b = Lattice::from_i64(2, &[vec![0, 1]]);
        assert_eq!(lattice_intersect(&a, &b).unwrap().rank(), 0);
    }

    #[test]
    fn intersect_dimension_mismatch() {
        assert_eq!(
            lattice_intersect(&Lattice::full(2), &Lattice::full(3)),
            Err(LatticeError::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn quotient_examples() {
        let sub = Lattice::from_i64(2, &[vec![2, 0], vec![0, 3]]);
        match quotient_structure(&Lattice::full(2), &sub).unwrap() {
            QuotientStructure::Finite(g) => assert_eq!(factors(&g), vec![6]),
            other => panic!("unexpected {other:?}"),
        }
        let z2 = Lattice::full(2);
        assert_eq!(
            quotient_structure(&z2, &z2).unwrap(),
            QuotientStructure::Finite(FiniteAbelianGroup::trivial())
        );
        let three = Lattice::from_i64(1, &[vec![3]]);
        match quotient_structure(&Lattice::full(1), &three).unwrap() {
            QuotientStructure::Finite(g) => assert_eq!(factors(&g), vec![3]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quotient_errors() {
        let sup = Lattice::from_i64(2, &[vec![2, 0], vec![0, 2]]);
        let sub = Lattice::from_i64(2, &[vec![1, 0]]);
        assert_eq!(quotient_structure(&sup, &sub), Err(LatticeError::NotSublattice));
        let sub = Lattice::from_i64(2, &[vec![4, 0]]);
        match quotient_structure(&sup, &sub).unwrap() {
            QuotientStructure::Infinite { free_rank, torsion } => {
                assert_eq!(free_rank, 1);
                assert_eq!(factors(&torsion), vec![2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hnf_is_canonical() {
        let a = Lattice::from_i64(3, &[vec![1, 2, 3], vec![4, 5, 6]]);
        let b = Lattice::from_i64(3, &[vec![5, 7, 9], vec![-3, -3, -3], vec![1, 2, 3]]);
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_and_det() {
        let m = bi(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = integer_kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        assert_eq!(bi(&[vec![2, 1], vec![7, 4]]).det(), BigInt::from(1));
        assert_eq!(bi(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 9]]).det(), BigInt::from(-3));
    }

    #[test]
    fn quotient_map_coordinates() {
        let sup = Lattice::full(2);
        let sub = Lattice::from_i64(2, &[vec![2, 0], vec![0, 3]]);
        let q = QuotientMap::new(&sup, &sub).unwrap();
        let gens = q.torsion_generators();
        assert_eq!(gens.len(), 1);
        let c = q.torsion_coordinates(&gens[0]).unwrap();
        assert_eq!(c, vec![BigInt::from(1)]);
        let c = q.torsion_coordinates(&[BigInt::from(2), BigInt::from(3)]).unwrap();
        assert_eq!(c, vec![BigInt::from(0)]);
    }
}
