//! Exact arithmetic in K = Q(i)(r1, ..., rs).
//!
//! The symbols are treated as real and algebraically independent over Q.
//! Every result certified downstream holds under that hypothesis.

use std::sync::Arc;

use crate::error::{Error, Result};

pub mod decompose;
pub mod expr;
pub mod gcd;
mod monomial;
mod poly;
mod ratfunc;
pub mod sturm;
mod value;

pub use decompose::{linear_conditions, monomial_decompose, MonomialDecomposition, RatMatrix};
pub use monomial::Monomial;
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use value::Scalar;

/// Ordered, immutable list of symbol names. Symbol `k` is variable index `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SymbolTable {
    names: Arc<[String]>,
}

impl SymbolTable {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (k, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::InvalidSymbols(format!("`{n}` is not an identifier")));
            }
            if n == "i" {
                return Err(Error::InvalidSymbols("`i` is reserved for the imaginary unit".into()));
            }
            if names[..k].contains(n) {
                return Err(Error::InvalidSymbols(format!("duplicate symbol `{n}`")));
            }
        }
        Ok(SymbolTable { names: names.into() })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn fmt(&self, x: &Scalar) -> String {
        x.fmt_with(&self.names)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
