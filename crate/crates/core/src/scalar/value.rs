use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::forward_owned;
use super::{Poly, RatFunc};
use crate::error::{Error, Result};

/// `re + i*im` with `re, im` in Q(r1, ..., rs).
///
/// The symbols are formally real, so conjugation only flips the sign of `im`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: RatFunc,
    pub im: RatFunc,
}

impl Scalar {
    pub fn new(re: RatFunc, im: RatFunc) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar { re: RatFunc::zero(), im: RatFunc::zero() }
    }

    pub fn one() -> Self {
        Self::real(RatFunc::one())
    }

    pub fn i() -> Self {
        Scalar { re: RatFunc::zero(), im: RatFunc::one() }
    }

    pub fn real(re: RatFunc) -> Self {
        Scalar { re, im: RatFunc::zero() }
    }

    pub fn from_int(c: i64) -> Self {
        Self::real(RatFunc::from_int(c))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::real(RatFunc::from_rational(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::real(RatFunc::from_poly(p))
    }

    pub fn symbol(index: usize) -> Self {
        Self::from_poly(Poly::var(index))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.is_real() && self.re.constant_value().is_some()
    }

    /// The rational value when the scalar is a rational constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_real() {
            self.re.constant_value()
        } else {
            None
        }
    }

    pub fn conj(&self) -> Scalar {
        Scalar { re: self.re.clone(), im: -&self.im }
    }

    /// `|x|^2 = re^2 + im^2`, a real element of the base field.
    pub fn norm_sq(&self) -> RatFunc {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(Scalar::real(self.re.inv()?));
        }
        if self.re.is_zero() {
            return Ok(Scalar { re: RatFunc::zero(), im: -&self.im.inv()? });
        }
        let n = self.norm_sq().inv()?;
        Ok(Scalar { re: &self.re * &n, im: -&(&self.im * &n) })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, c: &BigRational) -> Scalar {
        Scalar { re: self.re.scale(c), im: self.im.scale(c) }
    }

    pub fn mul_real(&self, c: &RatFunc) -> Scalar {
        Scalar { re: &self.re * c, im: &self.im * c }
    }

    /// Exact rational evaluation `(re, im)` at a point.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<(BigRational, BigRational)> {
        Ok((self.re.evaluate(point)?, self.im.evaluate(point)?))
    }

    /// Canonical expression string; reparses to an equal value.
    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.im.is_zero() {
            return self.re.fmt_with(names);
        }
        let im_part = imag_string(&self.im, names);
        if self.re.is_zero() {
            return im_part;
        }
        let re_part = self.re.fmt_with(names);
        match im_part.strip_prefix('-') {
            Some(rest) => format!("{re_part} - {rest}"),
            None => format!("{re_part} + {im_part}"),
        }
    }
}

fn imag_string(im: &RatFunc, names: &[String]) -> String {
    if !im.is_polynomial() {
        return format!("i*{}", im.fmt_with(names));
    }
    // term-wise: c*i*m, keeping the leading sign outside
    let mut out = String::new();
    for (k, (m, c)) in im.numer().terms().rev().enumerate() {
        let neg = c < &BigRational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        let mut body = String::new();
        if abs != BigRational::from_integer(1.into()) {
            body.push_str(&abs.to_string());
            body.push('*');
        }
        body.push('i');
        if !m.is_one() {
            body.push('*');
            body.push_str(&m.fmt_with(names));
        }
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl std::fmt::Debug for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.fmt_with(&[]))
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(&self.re * &rhs.re);
        }
        if self.im.is_zero() {
            return rhs.mul_real(&self.re);
        }
        if rhs.im.is_zero() {
            return self.mul_real(&rhs.re);
        }
        Scalar {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero; see [`Scalar::checked_div`].
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -&self.re, im: -&self.im }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

forward_owned!(Scalar, Add add, Sub sub, Mul mul, Div div);

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["r".into()]
    }

    #[test]
    fn monomial_product() {
        let r = Scalar::symbol(0);
        let ir3 = &Scalar::i() * &r.pow(3);
        let prod = &ir3 * &r;
        assert_eq!(prod, &Scalar::i() * &r.pow(4));
        assert_eq!(prod.fmt_with(&names()), "i*r^4");
    }

    #[test]
    fn self_division_is_one() {
        let a = &Scalar::one() + &Scalar::i();
        assert_eq!(&a / &a, Scalar::one());
        assert_eq!(Scalar::one().checked_div(&Scalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn conjugation() {
        let r = Scalar::symbol(0);
        let x = &r + &(&Scalar::i() * &r.pow(2));
        assert_eq!(x.conj().conj(), x);
        let two_re = &x + &x.conj();
        assert_eq!(two_re, Scalar::real(&x.re + &x.re));
    }

    #[test]
    fn evaluation() {
        let r = Scalar::symbol(0);
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(r.pow(2).evaluate(&[q(3, 2)]).unwrap(), (q(9, 4), q(0, 1)));
        let ir3 = &Scalar::i() * &r.pow(3);
        assert_eq!(ir3.evaluate(&[q(2, 1)]).unwrap(), (q(0, 1), q(8, 1)));
        let pole = Scalar::one().checked_div(&(&r - &Scalar::one())).unwrap();
        assert!(matches!(pole.evaluate(&[q(1, 1)]), Err(Error::PoleAtWitness(_))));
    }
}
