//! Splitting scalar matrices into rational coefficient matrices, one per monomial.
//!
//! Because the symbols are algebraically independent, a polynomial vanishes
//! exactly when every monomial coefficient does. This turns K-linear
//! conditions on integer unknowns into rational linear conditions.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;

use super::gcd::lcm;
use super::{Monomial, Poly, RatFunc, Scalar};

pub type RatMatrix = Vec<Vec<BigRational>>;

#[derive(Clone, Debug, PartialEq)]
pub struct MonomialDecomposition {
    /// Common denominator that was cleared (monic).
    pub denominator: Poly,
    /// Distinct monomials, ascending graded lexicographic.
    pub basis: Vec<Monomial>,
    /// Real-part coefficient matrix for each basis monomial.
    pub re: Vec<RatMatrix>,
    /// Imaginary-part coefficient matrix for each basis monomial.
    pub im: Vec<RatMatrix>,
}

impl MonomialDecomposition {
    /// `sum_k (re[k] + i*im[k]) * basis[k] / denominator`, rebuilt entrywise.
    pub fn reconstruct(&self, rows: usize, cols: usize) -> Vec<Vec<Scalar>> {
        let den = RatFunc::from_poly(self.denominator.clone());
        let mut out = vec![vec![Scalar::zero(); cols]; rows];
        for (k, m) in self.basis.iter().enumerate() {
            for i in 0..rows {
                for j in 0..cols {
                    let re = Poly::term(self.re[k][i][j].clone(), m.clone());
                    let im = Poly::term(self.im[k][i][j].clone(), m.clone());
                    let add = Scalar::new(RatFunc::from_poly(re), RatFunc::from_poly(im));
                    out[i][j] = &out[i][j] + &add;
                }
            }
        }
        for row in out.iter_mut() {
            for x in row.iter_mut() {
                *x = Scalar::new(&x.re / &den, &x.im / &den);
            }
        }
        out
    }
}

fn common_denominator<'a, I: IntoIterator<Item = &'a RatFunc>>(items: I) -> Poly {
    let mut den = Poly::one();
    for f in items {
        if !f.denom().is_one() && den != *f.denom() {
            den = lcm(&den, f.denom());
        }
    }
    den
}

fn cleared(f: &RatFunc, den: &Poly) -> Poly {
    if f.denom() == den {
        return f.numer().clone();
    }
    let factor = den.exact_div(f.denom()).expect("common denominator");
    f.numer() * &factor
}

/// Decompose a scalar matrix over the monomials of its cleared numerators.
pub fn monomial_decompose(m: &[Vec<Scalar>]) -> MonomialDecomposition {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let den = common_denominator(m.iter().flatten().flat_map(|s| [&s.re, &s.im]));
    let re_polys: Vec<Vec<Poly>> =
        m.iter().map(|r| r.iter().map(|s| cleared(&s.re, &den)).collect()).collect();
    let im_polys: Vec<Vec<Poly>> =
        m.iter().map(|r| r.iter().map(|s| cleared(&s.im, &den)).collect()).collect();
    let mut basis = BTreeSet::new();
    for p in re_polys.iter().chain(im_polys.iter()).flatten() {
        for (mono, _) in p.terms() {
            basis.insert(mono.clone());
        }
    }
    let basis: Vec<Monomial> = basis.into_iter().collect();
    let extract = |polys: &Vec<Vec<Poly>>, mono: &Monomial| -> RatMatrix {
        (0..rows).map(|i| (0..cols).map(|j| polys[i][j].coefficient(mono)).collect()).collect()
    };
    let re = basis.iter().map(|mono| extract(&re_polys, mono)).collect();
    let im = basis.iter().map(|mono| extract(&im_polys, mono)).collect();
    MonomialDecomposition { denominator: den, basis, re, im }
}

/// Rational conditions equivalent to `row . x = 0` for every row, with `x` rational.
///
/// Each row is cleared of its own denominator; all-zero condition rows are dropped.
pub fn linear_conditions(rows: &[Vec<Scalar>]) -> RatMatrix {
    let mut out = Vec::new();
    for row in rows {
        let d = monomial_decompose(std::slice::from_ref(row));
        for part in d.re.iter().chain(d.im.iter()) {
            let r = &part[0];
            if r.iter().any(|c| !c.is_zero()) {
                out.push(r.clone());
            }
        }
    }
    out
}

/// As [`linear_conditions`] for rows over the real field Q(r).
pub fn real_linear_conditions(rows: &[Vec<RatFunc>]) -> RatMatrix {
    let lifted: Vec<Vec<Scalar>> =
        rows.iter().map(|r| r.iter().cloned().map(Scalar::real).collect()).collect();
    linear_conditions(&lifted)
}
