//! Integer matrices and sublattices of Z^k.
//!
//! Lattices are stored by a basis in column Hermite normal form: column `j`
//! has its first nonzero entry (the pivot) in row `p_j` with
//! `p_1 < p_2 < ...`, pivots are positive, and the entries of earlier columns
//! in a pivot row lie in `[0, pivot)`. This representation is canonical, so
//! lattice equality is basis equality.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = BigInt::one();
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, cols)
    }

    pub fn from_rows_with_cols<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            data.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: rows.len(), cols, data }
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(cols: &[Vec<BigInt>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "product dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Columns `range` as a new matrix.
    pub fn select_cols(&self, cols: impl IntoIterator<Item = usize>) -> IntMatrix {
        let cs: Vec<Vec<BigInt>> = cols.into_iter().map(|j| self.col(j)).collect();
        Self::from_columns(&cs, self.rows)
    }

    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize>) -> IntMatrix {
        let rs: Vec<Vec<BigInt>> = rows.into_iter().map(|i| self.row(i)).collect();
        Self::from_rows_with_cols(&rs, self.cols)
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, rhs.rows, "row count mismatch");
        let mut cs = self.columns();
        cs.extend(rhs.columns());
        Self::from_columns(&cs, self.rows)
    }

    /// Vertical concatenation.
    pub fn vcat(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.cols, "column count mismatch");
        let mut rs = self.to_rows();
        rs.extend(rhs.to_rows());
        Self::from_rows_with_cols(&rs, self.cols)
    }

    pub fn to_rational(&self) -> Mat<BigRational> {
        self.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.to_rational())
    }

    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        linalg::det(&self.to_rational()).to_integer()
    }

    /// Inverse over Z, if the matrix is unimodular.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        let inv = linalg::inverse(&self.to_rational())?;
        let mut out = Self::zeros(self.rows, self.cols);
        for (i, row) in inv.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_integer() {
                    return None;
                }
                out[(i, j)] = x.to_integer();
            }
        }
        Some(out)
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    /// `col[dst] -= f * col[src]`
    fn col_axpy(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let t = f * s;
                self.data[i * self.cols + dst] -= t;
            }
        }
    }

    fn row_axpy(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let t = f * s;
                self.data[dst * self.cols + j] -= t;
            }
        }
    }

    /// Replace columns `(a, b)` by `(s*a + t*b, x*a + y*b)`.
    fn col_combine(&mut self, a: usize, b: usize, coeffs: [&BigInt; 4]) {
        let [s, t, x, y] = coeffs;
        for i in 0..self.rows {
            let va = self.data[i * self.cols + a].clone();
            let vb = self.data[i * self.cols + b].clone();
            self.data[i * self.cols + a] = s * &va + t * &vb;
            self.data[i * self.cols + b] = x * &va + y * &vb;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_strings())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for r in self.to_strings() {
            seq.serialize_element(&r)?;
        }
        seq.end()
    }
}

/// Column Hermite normal form `m * u = [h | 0]` with `u` unimodular.
#[derive(Clone, Debug)]
pub struct Hnf {
    /// Nonzero HNF columns (`rows x rank`).
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Pivot row of each column of `h`.
    pub pivots: Vec<usize>,
}

/// Extended gcd with `g >= 0` and `s*a + t*b = g`.
fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn hnf(m: &IntMatrix) -> Hnf {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.cols);
    let mut pivots = Vec::new();
    let mut c = 0;
    for i in 0..a.rows {
        if c == a.cols {
            break;
        }
        // Fold every later column into column c along row i.
        for j in c + 1..a.cols {
            if a[(i, j)].is_zero() {
                continue;
            }
            if a[(i, c)].is_zero() {
                a.swap_cols(c, j);
                u.swap_cols(c, j);
                continue;
            }
            let (x, y) = (a[(i, c)].clone(), a[(i, j)].clone());
            if y.is_multiple_of(&x) {
                let q = &y / &x;
                a.col_axpy(j, c, &q);
                u.col_axpy(j, c, &q);
                continue;
            }
            let (g, s, t) = xgcd(&x, &y);
            let xg = &x / &g;
            let yg = &y / &g;
            let ny = -&xg;
            a.col_combine(c, j, [&s, &t, &yg, &ny]);
            u.col_combine(c, j, [&s, &t, &yg, &ny]);
        }
        if a[(i, c)].is_zero() {
            continue;
        }
        if a[(i, c)].is_negative() {
            a.negate_col(c);
            u.negate_col(c);
        }
        let p = a[(i, c)].clone();
        for k in 0..c {
            let q = a[(i, k)].div_floor(&p);
            a.col_axpy(k, c, &q);
            u.col_axpy(k, c, &q);
        }
        pivots.push(i);
        c += 1;
    }
    let h = a.select_cols(0..c);
    Hnf { h, u, pivots }
}

/// Invariant factors and free rank of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq, DeriveSerialize)]
pub struct QuotientStructure {
    /// Nonzero diagonal of the Smith form, each dividing the next.
    #[serde(serialize_with = "ser_bigints")]
    pub elementary_divisors: Vec<BigInt>,
    pub free_rank: usize,
}

fn ser_bigints<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<String> = v.iter().map(ToString::to_string).collect();
    strs.serialize(s)
}

impl QuotientStructure {
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Product of the divisors when the group is finite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.elementary_divisors.iter().product())
    }

    /// Divisors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.elementary_divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Smith normal form `u * m * v = diag(d_1, ..., d_r, 0, ...)`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Structure of the cokernel `Z^rows / m Z^cols`.
    pub cokernel: QuotientStructure,
}

pub fn snf(m: &IntMatrix) -> Snf {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // Move the smallest nonzero entry of the trailing block to (t, t), clear
        // its row and column by division with remainder, and repeat while a
        // remainder or a non-divisible entry survives. The pivot shrinks on every
        // repeat, so this terminates.
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..a.rows {
                for j in t..a.cols {
                    if !a[(i, j)].is_zero()
                        && best.map_or(true, |(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = a[(t, t)].clone();
            let mut leftover = false;
            for i in t + 1..a.rows {
                let q = a[(i, t)].div_floor(&p);
                a.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                leftover |= !a[(i, t)].is_zero();
            }
            for j in t + 1..a.cols {
                let q = a[(t, j)].div_floor(&p);
                a.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                leftover |= !a[(t, j)].is_zero();
            }
            if leftover {
                continue;
            }
            let bad = (t + 1..a.rows)
                .flat_map(|i| (t + 1..a.cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&p));
            match bad {
                Some((i, _)) => {
                    let minus_one = -BigInt::one();
                    a.row_axpy(t, i, &minus_one);
                    u.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_zero() {
            break;
        }
        if a[(t, t)].is_negative() {
            for j in 0..a.cols {
                a[(t, j)] = -a[(t, j)].clone();
            }
            for j in 0..u.cols {
                u[(t, j)] = -u[(t, j)].clone();
            }
        }
        t += 1;
    }
    let divisors: Vec<BigInt> =
        (0..n).map(|k| a[(k, k)].clone()).filter(|d| !d.is_zero()).collect();
    let free_rank = m.rows - divisors.len();
    Snf { d: a, u, v, cokernel: QuotientStructure { elementary_divisors: divisors, free_rank } }
}

/// Primitive integer multiple of a rational vector (content removed, sign kept).
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Fraction-free (Bareiss) row echelon form; returns a basis of the row space.
pub fn bareiss_rows(m: &IntMatrix) -> IntMatrix {
    let mut a = m.to_rows();
    let cols = m.cols;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    a.truncate(r);
    let rows: Vec<Vec<BigInt>> = a
        .into_iter()
        .map(|row| {
            let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            row.into_iter().map(|x| x / &g).collect()
        })
        .collect();
    IntMatrix::from_rows_with_cols(&rows, cols)
}

/// Saturated lattice `{x in Z^cols : m x = 0}` of a rational matrix.
pub fn integer_kernel(m: &[Vec<BigRational>], cols: usize) -> IntLattice {
    let rows: Vec<Vec<BigInt>> = m
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| primitive_integer_vector(r))
        .collect();
    integer_kernel_int(&IntMatrix::from_rows_with_cols(&rows, cols))
}

pub fn integer_kernel_int(m: &IntMatrix) -> IntLattice {
    let cols = m.cols;
    if m.rows == 0 || m.is_zero() {
        return IntLattice::full(cols);
    }
    let reduced = bareiss_rows(m);
    let h = hnf(&reduced);
    let r = h.h.cols();
    IntLattice::from_generators(&h.u.select_cols(r..cols))
}

#[derive(Clone, PartialEq, Eq, Hash, DeriveSerialize)]
pub struct IntLattice {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl fmt::Debug for IntLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntLattice(Z^{}; {:?})", self.ambient_rank, self.basis.columns_strings())
    }
}

impl IntMatrix {
    fn columns_strings(&self) -> Vec<Vec<String>> {
        self.columns().iter().map(|c| c.iter().map(ToString::to_string).collect()).collect()
    }
}

impl IntLattice {
    /// Lattice generated by the columns of `gens`.
    pub fn from_generators(gens: &IntMatrix) -> Self {
        let h = hnf(gens);
        IntLattice { ambient_rank: gens.rows(), basis: h.h }
    }

    pub fn from_vectors(vecs: &[Vec<BigInt>], ambient: usize) -> Self {
        Self::from_generators(&IntMatrix::from_columns(vecs, ambient))
    }

    pub fn zero(ambient: usize) -> Self {
        IntLattice { ambient_rank: ambient, basis: IntMatrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        IntLattice { ambient_rank: ambient, basis: IntMatrix::identity(ambient) }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        self.basis.columns()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    fn check_ambient(&self, other: &IntLattice) -> Result<()> {
        if self.ambient_rank != other.ambient_rank {
            return Err(Error::DimensionMismatch(format!(
                "lattices in Z^{} and Z^{}",
                self.ambient_rank, other.ambient_rank
            )));
        }
        Ok(())
    }

    /// Coordinates of `v` in the basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if v.len() != self.ambient_rank {
            return None;
        }
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        let h = hnf_pivots(&self.basis);
        for (j, &p) in h.iter().enumerate() {
            let piv = &self.basis[(p, j)];
            let (q, r) = rest[p].div_rem(piv);
            if !r.is_zero() {
                return None;
            }
            for (i, x) in rest.iter_mut().enumerate().skip(p) {
                *x -= &q * &self.basis[(i, j)];
            }
            coords.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        self.ambient_rank == other.ambient_rank
            && other.basis.columns().iter().all(|c| self.contains(c))
    }

    pub fn sum(&self, other: &IntLattice) -> Result<IntLattice> {
        self.check_ambient(other)?;
        Ok(Self::from_generators(&self.basis.hcat(&other.basis)))
    }

    pub fn intersect(&self, other: &IntLattice) -> Result<IntLattice> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ambient_rank));
        }
        let mut neg = other.basis.clone();
        for j in 0..neg.cols() {
            neg.negate_col(j);
        }
        let joint = self.basis.hcat(&neg);
        let ker = integer_kernel_int(&joint);
        let coeffs = ker.basis.select_rows(0..self.rank());
        Ok(Self::from_generators(&self.basis.mul(&coeffs)))
    }

    /// Smallest saturated lattice containing this one: `Q L ∩ Z^k`.
    pub fn saturate(&self) -> IntLattice {
        if self.is_zero() {
            return self.clone();
        }
        let ann = integer_kernel_int(&self.basis.transpose());
        integer_kernel_int(&ann.basis.transpose())
    }

    pub fn is_saturated(&self) -> bool {
        self.saturate() == *self
    }

    /// Image under an integer matrix with `ambient_rank` columns.
    pub fn image(&self, m: &IntMatrix) -> Result<IntLattice> {
        if m.cols() != self.ambient_rank {
            return Err(Error::DimensionMismatch(format!(
                "map with {} columns applied to Z^{}",
                m.cols(),
                self.ambient_rank
            )));
        }
        Ok(Self::from_generators(&m.mul(&self.basis)))
    }

    /// Integer annihilator `{y : y . x = 0 for all x in L}`.
    pub fn annihilator(&self) -> IntLattice {
        if self.is_zero() {
            return Self::full(self.ambient_rank);
        }
        integer_kernel_int(&self.basis.transpose())
    }

    /// Unimodular `U` whose first `rank` columns are this lattice's basis.
    pub fn complete_to_basis(&self) -> Result<IntMatrix> {
        if !self.is_saturated() {
            return Err(Error::NotSaturated);
        }
        let k = self.ambient_rank;
        let r = self.rank();
        if r == 0 {
            return Ok(IntMatrix::identity(k));
        }
        let h = hnf(&self.basis.transpose());
        let w_inv = h.u.unimodular_inverse().ok_or_else(|| {
            Error::InternalInconsistency("HNF transform is not unimodular".into())
        })?;
        let mut u = w_inv.transpose();
        for j in 0..r {
            for i in 0..k {
                u[(i, j)] = self.basis[(i, j)].clone();
            }
        }
        if !u.det().abs().is_one() {
            return Err(Error::InternalInconsistency("basis completion is not unimodular".into()));
        }
        Ok(u)
    }
}

fn hnf_pivots(h: &IntMatrix) -> Vec<usize> {
    (0..h.cols())
        .map(|j| (0..h.rows()).find(|&i| !h[(i, j)].is_zero()).expect("HNF column is nonzero"))
        .collect()
}

/// Structure of `big / small`.
pub fn quotient(big: &IntLattice, small: &IntLattice) -> Result<QuotientStructure> {
    big.check_ambient(small)?;
    let mut coords = Vec::with_capacity(small.rank());
    for c in small.basis.columns() {
        coords.push(big.coordinates(&c).ok_or(Error::NotASublattice)?);
    }
    let c = IntMatrix::from_columns(&coords, big.rank());
    Ok(snf(&c).cokernel)
}

/// Convert to `i64` when every entry fits.
pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(ToPrimitive::to_i64).collect()
}

pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        let r: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntMatrix::from_rows(&r)
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn hnf_identity_and_zero() {
        let h = hnf(&IntMatrix::identity(3));
        assert_eq!(h.h, IntMatrix::identity(3));
        assert_eq!(h.u, IntMatrix::identity(3));
        let z = hnf(&IntMatrix::zeros(2, 3));
        assert_eq!(z.h.cols(), 0);
    }

    #[test]
    fn hnf_transform_relation() {
        let m = im(&[&[2, 4, 6], &[0, 3, 9], &[1, 1, 1]]);
        let h = hnf(&m);
        let mu = m.mul(&h.u);
        assert_eq!(mu.select_cols(0..h.h.cols()), h.h);
        assert!(mu.select_cols(h.h.cols()..3).is_zero());
        assert!(h.u.det().abs().is_one());
    }

    #[test]
    fn snf_examples() {
        let s = snf(&im(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.cokernel.elementary_divisors, big_vec(&[1, 6]));
        assert_eq!(s.cokernel.order(), Some(BigInt::from(6)));
        let s = snf(&im(&[&[2, 0], &[0, 0]]));
        assert_eq!(s.cokernel.elementary_divisors, big_vec(&[2]));
        assert_eq!(s.cokernel.free_rank, 1);
        let m = im(&[&[4, 6, 2], &[2, 8, 10]]);
        let s = snf(&m);
        assert_eq!(s.u.mul(&m).mul(&s.v), s.d);
    }

    #[test]
    fn kernel_of_a1() {
        let a1 = vec![vec![q(0), q(-1), q(-1)], vec![q(1), q(0), q(0)]];
        let k = integer_kernel(&a1, 3);
        assert_eq!(k.rank(), 1);
        assert!(k.contains(&big_vec(&[0, 1, -1])));
        let id = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert!(integer_kernel(&id, 2).is_zero());
    }

    #[test]
    fn quotient_orders() {
        let big = IntLattice::full(2);
        let small = IntLattice::from_vectors(&[big_vec(&[2, 0]), big_vec(&[0, 3])], 2);
        assert_eq!(quotient(&big, &small).unwrap().order(), Some(BigInt::from(6)));
        assert_eq!(quotient(&big, &big).unwrap().order(), Some(BigInt::one()));
        let line = IntLattice::from_vectors(&[big_vec(&[1, 0])], 2);
        assert_eq!(quotient(&big, &line).unwrap().free_rank, 1);
        assert_eq!(quotient(&small, &big), Err(Error::NotASublattice));
    }

    #[test]
    fn lattice_calculus() {
        let a = IntLattice::from_vectors(&[big_vec(&[2, 0])], 2);
        let b = IntLattice::from_vectors(&[big_vec(&[0, 3])], 2);
        let diag = IntLattice::from_vectors(&[big_vec(&[1, 1])], 2);
        let s = a.sum(&b).unwrap();
        let i = s.intersect(&diag).unwrap();
        assert_eq!(i, IntLattice::from_vectors(&[big_vec(&[6, 6])], 2));
        assert_eq!(s.intersect(&s).unwrap(), s);
        let l = IntLattice::from_vectors(&[big_vec(&[2, 4])], 2);
        assert_eq!(l.saturate(), IntLattice::from_vectors(&[big_vec(&[1, 2])], 2));
    }

    #[test]
    fn completion_is_unimodular() {
        let l = IntLattice::from_vectors(&[big_vec(&[0, 1, -1])], 3);
        let u = l.complete_to_basis().unwrap();
        assert!(u.det().abs().is_one());
        assert_eq!(u.col(0), l.basis_vectors()[0]);
        let not_sat = IntLattice::from_vectors(&[big_vec(&[2, 0])], 2);
        assert_eq!(not_sat.complete_to_basis(), Err(Error::NotSaturated));
    }
}
