//! Recursive-descent parser for scalar expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | 'i' | SYMBOL | '(' expr ')'
//! ```
//!
//! A rational `p/q` is the quotient of two integer atoms.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Poly, Scalar, SymbolTable};

/// Largest accepted exponent in `x ^ n`.
pub const MAX_EXPONENT: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprErrorKind {
    Syntax { found: String, expected: Vec<&'static str> },
    UnknownSymbol(String),
    DivisionByZero,
    ExponentTooLarge(String),
}

/// A parse failure at byte `offset` of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub offset: usize,
    pub kind: ExprErrorKind,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprErrorKind::Syntax { found, expected } => {
                write!(f, "unexpected {found}, expected one of: {}", expected.join(", "))
            }
            ExprErrorKind::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            ExprErrorKind::DivisionByZero => write!(f, "division by zero"),
            ExprErrorKind::ExponentTooLarge(e) => {
                write!(f, "exponent {e} exceeds the limit {MAX_EXPONENT}")
            }
        }
    }
}

impl std::error::Error for ExprError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
    Other(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
            Tok::Other(c) => format!("`{c}`"),
        }
    }
}

const OPERAND: &[&str] = &["number", "symbol", "`i`", "`(`", "`-`", "`+`"];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
    symbols: &'a SymbolTable,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, symbols: &'a SymbolTable) -> Self {
        let mut p = Parser { src, pos: 0, tok: Tok::End, tok_start: 0, symbols };
        p.bump();
        p
    }

    fn bump(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(c) = self.src[self.pos..].chars().next() else {
            self.tok = Tok::End;
            return;
        };
        if c.is_ascii_digit() {
            let end = self.scan(|c| c.is_ascii_digit());
            self.tok = Tok::Int(self.src[self.tok_start..end].parse().expect("digits"));
            self.pos = end;
            return;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let end = self.scan(|c| c.is_ascii_alphanumeric() || c == '_');
            self.tok = Tok::Ident(self.src[self.tok_start..end].to_string());
            self.pos = end;
            return;
        }
        self.pos += c.len_utf8();
        self.tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => Tok::Other(other),
        };
    }

    fn scan(&self, pred: impl Fn(char) -> bool) -> usize {
        self.src[self.tok_start..]
            .char_indices()
            .find(|&(_, c)| !pred(c))
            .map_or(self.src.len(), |(k, _)| self.tok_start + k)
    }

    fn error(&self, expected: &[&'static str]) -> ExprError {
        ExprError {
            offset: self.tok_start,
            kind: ExprErrorKind::Syntax { found: self.tok.describe(), expected: expected.to_vec() },
        }
    }

    fn expr(&mut self) -> Result<Scalar, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    let at = self.tok_start;
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc
                        .checked_div(&rhs)
                        .map_err(|_| ExprError { offset: at, kind: ExprErrorKind::DivisionByZero })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ExprError> {
        match self.tok {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Scalar, ExprError> {
        let base = self.atom()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let Tok::Int(n) = &self.tok else {
            return Err(self.error(&["nonnegative integer exponent"]));
        };
        let e = match u32::try_from(n) {
            Ok(e) if e <= MAX_EXPONENT => e,
            _ => {
                return Err(ExprError {
                    offset: self.tok_start,
                    kind: ExprErrorKind::ExponentTooLarge(n.to_string()),
                })
            }
        };
        self.bump();
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<Scalar, ExprError> {
        match self.tok.clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Scalar::from_rational(BigRational::from_integer(n)))
            }
            Tok::Ident(name) => {
                if name == "i" {
                    self.bump();
                    return Ok(Scalar::i());
                }
                match self.symbols.index_of(&name) {
                    Some(k) => {
                        self.bump();
                        Ok(Scalar::from_poly(Poly::var(k)))
                    }
                    None => Err(ExprError {
                        offset: self.tok_start,
                        kind: ExprErrorKind::UnknownSymbol(name),
                    }),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(self.error(&["`)`", "operator"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(OPERAND)),
        }
    }
}

/// Parse a complete expression; trailing input is an error.
pub fn parse_scalar(src: &str, symbols: &SymbolTable) -> Result<Scalar, ExprError> {
    let mut p = Parser::new(src, symbols);
    let value = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error(&["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(value)
}

/// Parse the longest expression at the start of `src`.
///
/// Returns the value and the byte offset just past the last consumed token,
/// so callers can embed expressions in a larger syntax.
pub fn parse_prefix(src: &str, symbols: &SymbolTable) -> Result<(Scalar, usize), ExprError> {
    let mut p = Parser::new(src, symbols);
    let value = p.expr()?;
    Ok((value, p.tok_start))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        SymbolTable::new(["r1", "r2"]).unwrap()
    }

    fn parse(s: &str) -> Scalar {
        parse_scalar(s, &table()).unwrap()
    }

    #[test]
    fn precedence_and_rationals() {
        let r1 = Scalar::symbol(0);
        assert_eq!(parse("i*r1^3"), &Scalar::i() * &r1.pow(3));
        assert_eq!(parse("-r1^2"), -r1.pow(2));
        assert_eq!(parse("3/2*r1"), r1.scale(&BigRational::new(3.into(), 2.into())));
        assert_eq!(parse("1 - 2 - 3"), Scalar::from_int(-4));
        assert_eq!(parse("(1 + i)^2"), &Scalar::i() * &Scalar::from_int(2));
    }

    #[test]
    fn canonical_strings_reparse() {
        let t = table();
        for s in ["i*r1^3 + r2", "(r1 + 1)/(r1^2 - r2)", "1/r1 - i*2/r2", "-3/4 + i", "0"] {
            let x = parse(s);
            let printed = t.fmt(&x);
            assert_eq!(parse_scalar(&printed, &t).unwrap(), x, "{s} -> {printed}");
        }
    }

    #[test]
    fn dangling_operator() {
        let err = parse_scalar("1 + ", &table()).unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(matches!(err.kind, ExprErrorKind::Syntax { .. }));
    }

    #[test]
    fn errors() {
        let t = table();
        assert!(matches!(parse_scalar("r3", &t).unwrap_err().kind, ExprErrorKind::UnknownSymbol(_)));
        assert_eq!(parse_scalar("1/(r1 - r1)", &t).unwrap_err().kind, ExprErrorKind::DivisionByZero);
        assert!(matches!(parse_scalar("r1^999", &t).unwrap_err().kind, ExprErrorKind::ExponentTooLarge(_)));
        assert_eq!(parse_scalar("(1", &t).unwrap_err().offset, 2);
    }

    #[test]
    fn prefix_stops_before_unknown_token() {
        let (x, end) = parse_prefix("1 + r1 , 2 ]", &table()).unwrap();
        assert_eq!(x, &Scalar::one() + &Scalar::symbol(0));
        assert_eq!(end, 7);
        let (_, end) = parse_prefix("i r1", &table()).unwrap();
        assert_eq!(end, 2);
    }
}
