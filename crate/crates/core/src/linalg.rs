//! Dense Gauss-Jordan linear algebra over exact fields.
//!
//! Matrices are row-major `Vec<Vec<T>>`. Reduced row echelon form is unique,
//! so every result built from it (kernels, row spaces) is canonical.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{RatFunc, Scalar};

pub type Mat<T> = Vec<Vec<T>>;

pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inverse(&self) -> Self;
    /// Size heuristic used to prefer small pivots.
    fn weight(&self) -> usize {
        1
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Self {
        self.recip()
    }
    fn weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Self {
        self.inv().expect("pivot is nonzero")
    }
    fn weight(&self) -> usize {
        self.numer().num_terms() + self.denom().num_terms()
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Self {
        self.inv().expect("pivot is nonzero")
    }
    fn weight(&self) -> usize {
        self.re.weight() + self.im.weight()
    }
}

pub fn zeros<T: Field>(rows: usize, cols: usize) -> Mat<T> {
    vec![vec![T::zero(); cols]; rows]
}

pub fn identity<T: Field>(n: usize) -> Mat<T> {
    let mut m = zeros(n, n);
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = T::one();
    }
    m
}

pub fn cols_of<T>(m: &Mat<T>) -> usize {
    m.first().map_or(0, Vec::len)
}

pub fn transpose<T: Clone>(m: &Mat<T>) -> Mat<T> {
    let cols = cols_of(m);
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul<T: Field>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let n = cols_of(b);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut acc = T::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            acc = acc.plus(&x.times(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<T: Field>(a: &Mat<T>, v: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| {
            row.iter().zip(v).fold(T::zero(), |acc, (x, y)| {
                if x.is_zero() || y.is_zero() {
                    acc
                } else {
                    acc.plus(&x.times(y))
                }
            })
        })
        .collect()
}

/// Matrix whose columns are the given vectors.
pub fn from_columns<T: Clone>(cols: &[Vec<T>], rows: usize) -> Mat<T> {
    (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

pub fn columns<T: Clone>(m: &Mat<T>) -> Vec<Vec<T>> {
    transpose(m)
}

/// Reduced row echelon form and pivot columns. Zero rows are dropped.
pub fn rref<T: Field>(m: &Mat<T>) -> (Mat<T>, Vec<usize>) {
    let mut a: Mat<T> = m.clone();
    let cols = cols_of(&a);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let best = (r..a.len()).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].weight());
        let Some(p) = best else { continue };
        a.swap(r, p);
        let inv = a[r][c].inverse();
        for x in a[r].iter_mut().skip(c) {
            if !x.is_zero() {
                *x = x.times(&inv);
            }
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x = x.minus(&f.times(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank<T: Field>(m: &Mat<T>) -> usize {
    rref(m).1.len()
}

/// Canonical basis of the right kernel `{x : m x = 0}`, one vector per free column.
pub fn kernel<T: Field>(m: &Mat<T>, cols: usize) -> Vec<Vec<T>> {
    let (r, pivots) = rref(m);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![T::zero(); cols];
        v[free] = T::one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = row[free].negate();
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `m x = b`, or `None` when inconsistent.
pub fn solve<T: Field>(m: &Mat<T>, b: &[T], cols: usize) -> Option<Vec<T>> {
    let aug: Mat<T> = m
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![T::zero(); cols];
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[cols].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse<T: Field>(m: &Mat<T>) -> Option<Mat<T>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let aug: Mat<T> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Determinant by elimination.
pub fn det<T: Field>(m: &Mat<T>) -> T {
    let n = m.len();
    if n <= 4 {
        let cols: Vec<usize> = (0..n).collect();
        return cofactor_det(m, 0, &cols);
    }
    let mut a = m.clone();
    let mut d = T::one();
    for c in 0..n {
        let best = (c..n).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].weight());
        let Some(p) = best else { return T::zero() };
        if p != c {
            a.swap(p, c);
            d = d.negate();
        }
        d = d.times(&a[c][c]);
        let inv = a[c][c].inverse();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].times(&inv);
            for j in c..n {
                if !a[c][j].is_zero() {
                    let t = f.times(&a[c][j]);
                    a[i][j] = a[i][j].minus(&t);
                }
            }
        }
    }
    d
}

/// Division-free Laplace expansion along `row` over the given columns.
fn cofactor_det<T: Field>(m: &Mat<T>, row: usize, cols: &[usize]) -> T {
    if cols.is_empty() {
        return T::one();
    }
    let mut acc = T::zero();
    for (k, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = m[row][c].times(&cofactor_det(m, row + 1, &rest));
        acc = if k % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
    }
    acc
}

/// Lift a rational matrix into another field.
pub fn lift<T: Field>(m: &Mat<BigRational>, f: impl Fn(&BigRational) -> T) -> Mat<T> {
    m.iter().map(|r| r.iter().map(&f).collect()).collect()
}
