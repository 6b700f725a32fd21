//! Sturm sequences for univariate polynomials with rational coefficients.
//!
//! Polynomials are dense coefficient vectors, constant term first.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(k.into())).collect()
}

fn rem(f: &[BigRational], g: &[BigRational]) -> Vec<BigRational> {
    let mut r = f.to_vec();
    trim(&mut r);
    let dg = g.len() - 1;
    let lg = &g[dg];
    while r.len() > dg && !r.is_empty() {
        let shift = r.len() - 1 - dg;
        let q = r.last().expect("nonempty") / lg;
        for (k, gk) in g.iter().enumerate() {
            r[k + shift] -= &q * gk;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// `p, p', -rem(p, p'), ...` up to the last nonzero remainder.
pub fn sturm_sequence(p: &[BigRational]) -> Vec<Vec<BigRational>> {
    let mut p0 = p.to_vec();
    trim(&mut p0);
    if p0.is_empty() {
        return Vec::new();
    }
    let mut p1 = derivative(&p0);
    trim(&mut p1);
    let mut seq = vec![p0];
    while !p1.is_empty() {
        let r = rem(seq.last().expect("nonempty"), &p1);
        seq.push(p1);
        p1 = r.into_iter().map(|c| -c).collect();
    }
    seq
}

fn sign_changes(seq: &[Vec<BigRational>], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in seq {
        let v = eval(p, x);
        let s = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Number of distinct real roots in the half-open interval `(a, b]`, `a < b`.
pub fn count_roots(p: &[BigRational], a: &BigRational, b: &BigRational) -> usize {
    let seq = sturm_sequence(p);
    if seq.is_empty() {
        return 0;
    }
    sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b))
}

/// Sign of `p` on the closed interval `[a, b]` when it has no root there.
///
/// Returns `None` when `p` vanishes somewhere on the interval (including the
/// zero polynomial).
pub fn constant_sign_on(p: &[BigRational], a: &BigRational, b: &BigRational) -> Option<i8> {
    let va = eval(p, a);
    if va.is_zero() || (a < b && count_roots(p, a, b) > 0) {
        return None;
    }
    Some(if va.is_positive() { 1 } else { -1 })
}
