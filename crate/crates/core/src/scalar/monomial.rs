use std::cmp::Ordering;
use std::fmt;

/// A monomial `r1^e1 * r2^e2 * ...` stored as its exponent vector.
///
/// Trailing zero exponents are trimmed so that the representation does not
/// depend on how many symbols a table declares; the constant monomial is the
/// empty vector. Ordering is graded lexicographic with earlier symbols
/// heavier.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        Self::var_pow(index, 1)
    }

    pub fn var_pow(index: usize, exp: u32) -> Self {
        if exp == 0 {
            return Self::one();
        }
        let mut v = vec![0; index + 1];
        v[index] = exp;
        Monomial(v)
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0.get(index).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of symbol slots actually used (index of last nonzero exponent + 1).
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (&self.0, &other.0)
        } else {
            (&other.0, &self.0)
        };
        let mut v = long.clone();
        for (a, b) in v.iter_mut().zip(short.iter()) {
            *a += *b;
        }
        Monomial(v)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        let mut v = other.0.clone();
        for (a, b) in v.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        Monomial::from_exponents(v)
    }

    /// Remove the exponent of one symbol, returning it together with the rest.
    pub fn split_var(&self, index: usize) -> (u32, Monomial) {
        let e = self.exponent(index);
        if e == 0 {
            return (0, self.clone());
        }
        let mut v = self.0.clone();
        v[index] = 0;
        (e, Monomial::from_exponents(v))
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
            if e == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                let c = self.exponent(i).cmp(&other.exponent(i));
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let x = Monomial::var(0);
        let y = Monomial::var(1);
        let x2 = Monomial::var_pow(0, 2);
        let xy = x.mul(&y);
        assert!(Monomial::one() < y);
        assert!(y < x);
        assert!(x < xy);
        assert!(xy < x2);
        assert_eq!(Monomial::from_exponents(vec![1, 0, 0]), x);
    }

    #[test]
    fn divide() {
        let a = Monomial::from_exponents(vec![2, 1]);
        let b = Monomial::from_exponents(vec![1]);
        assert!(b.divides(&a));
        assert_eq!(b.quotient_of(&a), Monomial::from_exponents(vec![1, 1]));
        assert!(!a.divides(&b));
    }
}
