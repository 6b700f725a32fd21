//! The `.tor` input language.
//!
//! ```text
//! # comment to end of line
//! symbols r1 r2
//! matrix P 3 x 5
//! [ 0, 1, 0, i*r1^3, r1 ]
//! [ 0, 0, 1, r1, i ]
//! [ 1, 0, 0, 0, r2 ]
//! form H 3 x 3
//! [ 1/r1^3, 0, 0 ] [ 0, 1, 0 ] [ 0, 0, 0 ]
//! witness W r1=3/2 r2=5/7 interval r1 [1/2, 4]
//! subspace Y gamma [ 0, 1, 0, 0, 0 ] [ 0, 0, 1, 0, 0 ]
//! vector a gamma [ 1, 0, 0, 2 ]
//! ```
//!
//! `symbols` must come first. Entries are scalar expressions in the declared
//! symbols. Subspaces are complex spans of their vectors; `gamma` vectors are
//! integer coordinates in the lattice generators, `ambient` vectors are points
//! of C^n.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;
use toroidal_core::scalar::expr::{parse_prefix, ExprErrorKind};
use toroidal_core::{Scalar, SymbolTable};

const KEYWORDS: &[&str] = &["symbols", "matrix", "form", "witness", "subspace", "vector", "interval", "gamma", "ambient"];
const DIRECTIVES: &[&str] = &["symbols", "matrix", "form", "witness", "subspace", "vector"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DslErrorKind {
    Syntax { found: String, expected: Vec<String> },
    DimensionMismatch(String),
    UnknownSymbol(String),
    DuplicateName(String),
}

impl DslErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            DslErrorKind::Syntax { .. } => "SyntaxError",
            DslErrorKind::DimensionMismatch(_) => "DimensionMismatch",
            DslErrorKind::UnknownSymbol(_) => "UnknownSymbol",
            DslErrorKind::DuplicateName(_) => "DuplicateName",
        }
    }
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslErrorKind::Syntax { found, expected } => {
                write!(f, "unexpected {found}, expected one of: {}", expected.join(", "))
            }
            DslErrorKind::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            DslErrorKind::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            DslErrorKind::DuplicateName(s) => write!(f, "name `{s}` is already defined"),
        }
    }
}

/// A parse failure at a 1-based line and column (in characters).
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct DslError {
    pub line: usize,
    pub column: usize,
    pub kind: DslErrorKind,
}

/// Coordinates of subspace and vector entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coords {
    /// Integer coordinates in the lattice generators.
    Gamma,
    /// Points of C^n.
    Ambient,
}

impl Coords {
    pub fn as_str(self) -> &'static str {
        match self {
            Coords::Gamma => "gamma",
            Coords::Ambient => "ambient",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedMatrix {
    pub name: String,
    pub rows: Vec<Vec<Scalar>>,
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessDecl {
    pub name: String,
    pub values: Vec<(String, BigRational)>,
    pub interval: Option<(String, BigRational, BigRational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorsDecl {
    pub name: String,
    pub coords: Coords,
    pub vectors: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub symbols: SymbolTable,
    pub matrices: Vec<NamedMatrix>,
    pub forms: Vec<NamedMatrix>,
    pub witnesses: Vec<WitnessDecl>,
    pub subspaces: Vec<VectorsDecl>,
    pub vectors: Vec<VectorsDecl>,
}

impl Document {
    pub fn matrix(&self, name: &str) -> Option<&NamedMatrix> {
        self.matrices.iter().find(|m| m.name == name)
    }

    pub fn form(&self, name: &str) -> Option<&NamedMatrix> {
        self.forms.iter().find(|m| m.name == name)
    }

    pub fn witness(&self, name: &str) -> Option<&WitnessDecl> {
        self.witnesses.iter().find(|m| m.name == name)
    }

    pub fn subspace(&self, name: &str) -> Option<&VectorsDecl> {
        self.subspaces.iter().find(|m| m.name == name)
    }

    pub fn vector(&self, name: &str) -> Option<&VectorsDecl> {
        self.vectors.iter().find(|m| m.name == name)
    }

    fn has_name(&self, name: &str) -> bool {
        self.matrix(name).is_some()
            || self.form(name).is_some()
            || self.witness(name).is_some()
            || self.subspace(name).is_some()
            || self.vector(name).is_some()
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    symbols: SymbolTable,
}

fn describe(token: &str) -> String {
    if token.is_empty() {
        "end of input".into()
    } else {
        format!("`{token}`")
    }
}

fn expected(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl<'a> Parser<'a> {
    fn error_at(&self, offset: usize, kind: DslErrorKind) -> DslError {
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |k| k + 1);
        let column = before[line_start..].chars().count() + 1;
        DslError { line, column, kind }
    }

    fn skip_trivia(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b'#' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    /// The next token's text without consuming it: an identifier, a number, or
    /// one character.
    fn peek(&mut self) -> &'a str {
        self.skip_trivia();
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else { return "" };
        let end = if c.is_ascii_alphanumeric() || c == '_' {
            rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len())
        } else {
            c.len_utf8()
        };
        &rest[..end]
    }

    fn syntax(&mut self, want: &[&str]) -> DslError {
        let found = describe(self.peek());
        self.error_at(self.pos, DslErrorKind::Syntax { found, expected: expected(want) })
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.peek() == tok {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), DslError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.syntax(&[&format!("`{tok}`")]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(&'a str, usize), DslError> {
        let tok = self.peek();
        let start = self.pos;
        if tok.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
            self.pos += tok.len();
            Ok((tok, start))
        } else {
            Err(self.syntax(&[what]))
        }
    }

    fn new_name(&mut self, doc: &Document) -> Result<String, DslError> {
        let (name, start) = self.ident("name")?;
        if KEYWORDS.contains(&name) || name == "i" {
            return Err(self.error_at(
                start,
                DslErrorKind::Syntax { found: format!("keyword `{name}`"), expected: expected(&["name"]) },
            ));
        }
        if doc.has_name(name) {
            return Err(self.error_at(start, DslErrorKind::DuplicateName(name.into())));
        }
        Ok(name.to_string())
    }

    fn size(&mut self) -> Result<(usize, usize), DslError> {
        let tok = self.peek();
        let start = self.pos;
        match tok.parse::<usize>() {
            Ok(n) if n > 0 => {
                self.pos += tok.len();
                Ok((n, start))
            }
            _ => Err(self.syntax(&["positive integer"])),
        }
    }

    fn expr(&mut self) -> Result<(Scalar, usize), DslError> {
        self.skip_trivia();
        let start = self.pos;
        match parse_prefix(&self.src[start..], &self.symbols) {
            Ok((value, used)) => {
                self.pos = start + used;
                Ok((value, start))
            }
            Err(e) => {
                let at = start + e.offset;
                let message = e.to_string();
                let kind = match e.kind {
                    ExprErrorKind::Syntax { found, expected } => DslErrorKind::Syntax {
                        found,
                        expected: expected.iter().map(|s| s.to_string()).collect(),
                    },
                    ExprErrorKind::UnknownSymbol(s) => DslErrorKind::UnknownSymbol(s),
                    ExprErrorKind::DivisionByZero | ExprErrorKind::ExponentTooLarge(_) => {
                        DslErrorKind::Syntax { found: message, expected: expected(&["valid expression"]) }
                    }
                };
                Err(self.error_at(at, kind))
            }
        }
    }

    fn rational(&mut self) -> Result<BigRational, DslError> {
        let (v, start) = self.expr()?;
        v.as_rational().ok_or_else(|| {
            self.error_at(
                start,
                DslErrorKind::Syntax { found: "non-rational expression".into(), expected: expected(&["rational number"]) },
            )
        })
    }

    /// `[ e1, e2, ... ]`, returning the entries and the offset of `[`.
    fn row(&mut self) -> Result<(Vec<Scalar>, usize), DslError> {
        self.peek();
        let start = self.pos;
        self.expect("[")?;
        let mut out = Vec::new();
        if self.eat("]") {
            return Ok((out, start));
        }
        loop {
            out.push(self.expr()?.0);
            if self.eat("]") {
                return Ok((out, start));
            }
            if !self.eat(",") {
                return Err(self.syntax(&["`,`", "`]`", "operator"]));
            }
        }
    }

    fn matrix(&mut self, doc: &Document, square: bool) -> Result<NamedMatrix, DslError> {
        let name = self.new_name(doc)?;
        let (n, _) = self.size()?;
        self.expect("x")?;
        let (k, kpos) = self.size()?;
        if square && n != k {
            return Err(self.error_at(kpos, DslErrorKind::DimensionMismatch(format!("form must be square, got {n} x {k}"))));
        }
        let mut rows = Vec::with_capacity(n);
        for r in 0..n {
            if self.peek() != "[" {
                let found = describe(self.peek());
                return Err(self.error_at(
                    self.pos,
                    DslErrorKind::Syntax {
                        found: format!("{found} after {r} of {n} rows"),
                        expected: expected(&["`[`"]),
                    },
                ));
            }
            let (row, at) = self.row()?;
            if row.len() != k {
                return Err(self.error_at(
                    at,
                    DslErrorKind::DimensionMismatch(format!("row {} has {} entries, expected {k}", r + 1, row.len())),
                ));
            }
            rows.push(row);
        }
        if self.peek() == "[" {
            return Err(self.error_at(self.pos, DslErrorKind::DimensionMismatch(format!("more than {n} rows"))));
        }
        Ok(NamedMatrix { name, rows, cols: k })
    }

    fn witness(&mut self, doc: &Document) -> Result<WitnessDecl, DslError> {
        let name = self.new_name(doc)?;
        let mut values: Vec<(String, BigRational)> = Vec::new();
        loop {
            let tok = self.peek();
            if tok.is_empty() || DIRECTIVES.contains(&tok) || tok == "interval" {
                break;
            }
            let (sym, at) = self.ident("symbol assignment")?;
            self.symbol_known(sym, at)?;
            if values.iter().any(|(s, _)| s == sym) {
                return Err(self.error_at(at, DslErrorKind::DuplicateName(sym.into())));
            }
            self.expect("=")?;
            values.push((sym.to_string(), self.rational()?));
        }
        let interval = if self.eat("interval") {
            let (sym, at) = self.ident("symbol")?;
            self.symbol_known(sym, at)?;
            self.expect("[")?;
            let lo = self.rational()?;
            self.expect(",")?;
            let hi = self.rational()?;
            self.expect("]")?;
            Some((sym.to_string(), lo, hi))
        } else {
            None
        };
        Ok(WitnessDecl { name, values, interval })
    }

    fn symbol_known(&self, sym: &str, at: usize) -> Result<(), DslError> {
        if self.symbols.index_of(sym).is_none() {
            return Err(self.error_at(at, DslErrorKind::UnknownSymbol(sym.into())));
        }
        Ok(())
    }

    fn vectors(&mut self, doc: &Document, many: bool) -> Result<VectorsDecl, DslError> {
        let name = self.new_name(doc)?;
        let coords = match self.peek() {
            "gamma" => Coords::Gamma,
            "ambient" => Coords::Ambient,
            _ => return Err(self.syntax(&["`gamma`", "`ambient`"])),
        };
        self.pos += coords.as_str().len();
        let mut vectors = Vec::new();
        loop {
            let (v, at) = self.row()?;
            if v.is_empty() {
                return Err(self.error_at(at, DslErrorKind::DimensionMismatch("empty vector".into())));
            }
            if let Some(first) = vectors.first() {
                let first: &Vec<Scalar> = first;
                if first.len() != v.len() {
                    return Err(self.error_at(
                        at,
                        DslErrorKind::DimensionMismatch(format!("vector has {} entries, expected {}", v.len(), first.len())),
                    ));
                }
            }
            if coords == Coords::Gamma && !v.iter().all(|x| x.as_rational().is_some_and(|q| q.is_integer())) {
                return Err(self.error_at(
                    at,
                    DslErrorKind::Syntax { found: "non-integer coordinate".into(), expected: expected(&["integer"]) },
                ));
            }
            vectors.push(v);
            if !many || self.peek() != "[" {
                break;
            }
        }
        Ok(VectorsDecl { name, coords, vectors })
    }

    fn document(&mut self) -> Result<Document, DslError> {
        let mut doc = Document::default();
        if self.eat("symbols") {
            let start = self.pos;
            let mut names = Vec::new();
            loop {
                let tok = self.peek();
                if tok.is_empty() || DIRECTIVES.contains(&tok) {
                    break;
                }
                let (name, at) = self.ident("symbol name")?;
                if KEYWORDS.contains(&name) || name == "i" || name == "x" {
                    return Err(self.error_at(
                        at,
                        DslErrorKind::Syntax { found: format!("reserved word `{name}`"), expected: expected(&["symbol name"]) },
                    ));
                }
                if names.contains(&name) {
                    return Err(self.error_at(at, DslErrorKind::DuplicateName(name.into())));
                }
                names.push(name);
            }
            self.symbols = SymbolTable::new(names.iter().copied()).map_err(|e| {
                self.error_at(start, DslErrorKind::Syntax { found: e.to_string(), expected: expected(&["symbol name"]) })
            })?;
            doc.symbols = self.symbols.clone();
        }
        loop {
            match self.peek() {
                "" => return Ok(doc),
                "matrix" => {
                    self.pos += "matrix".len();
                    let m = self.matrix(&doc, false)?;
                    doc.matrices.push(m);
                }
                "form" => {
                    self.pos += "form".len();
                    let m = self.matrix(&doc, true)?;
                    doc.forms.push(m);
                }
                "witness" => {
                    self.pos += "witness".len();
                    let w = self.witness(&doc)?;
                    doc.witnesses.push(w);
                }
                "subspace" => {
                    self.pos += "subspace".len();
                    let s = self.vectors(&doc, true)?;
                    doc.subspaces.push(s);
                }
                "vector" => {
                    self.pos += "vector".len();
                    let v = self.vectors(&doc, false)?;
                    doc.vectors.push(v);
                }
                "symbols" => {
                    let at = self.pos;
                    return Err(self.error_at(
                        at,
                        DslErrorKind::Syntax {
                            found: "`symbols` after other directives".into(),
                            expected: expected(&["`matrix`", "`form`", "`witness`", "`subspace`", "`vector`"]),
                        },
                    ));
                }
                _ => return Err(self.syntax(&["`matrix`", "`form`", "`witness`", "`subspace`", "`vector`", "end of input"])),
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Document, DslError> {
    Parser { src: text, pos: 0, symbols: SymbolTable::empty() }.document()
}

fn write_rows(out: &mut String, symbols: &SymbolTable, rows: &[Vec<Scalar>]) {
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| symbols.fmt(x)).collect();
        let _ = writeln!(out, "[ {} ]", cells.join(", "));
    }
}

/// Canonical text of a document; `parse(&print(d)) == Ok(d)`.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    let t = &doc.symbols;
    if !t.is_empty() {
        let _ = writeln!(out, "symbols {}", t.names().join(" "));
    }
    for m in &doc.matrices {
        let _ = writeln!(out, "matrix {} {} x {}", m.name, m.rows.len(), m.cols);
        write_rows(&mut out, t, &m.rows);
    }
    for m in &doc.forms {
        let _ = writeln!(out, "form {} {} x {}", m.name, m.rows.len(), m.cols);
        write_rows(&mut out, t, &m.rows);
    }
    for w in &doc.witnesses {
        let _ = write!(out, "witness {}", w.name);
        for (s, v) in &w.values {
            let _ = write!(out, " {s}={v}");
        }
        if let Some((s, lo, hi)) = &w.interval {
            let _ = write!(out, " interval {s} [{lo}, {hi}]");
        }
        out.push('\n');
    }
    for (keyword, list) in [("subspace", &doc.subspaces), ("vector", &doc.vectors)] {
        for v in list {
            let _ = writeln!(out, "{keyword} {} {}", v.name, v.coords.as_str());
            write_rows(&mut out, t, &v.vectors);
        }
    }
    out
}

/// Integer entries of a `gamma` vector; the parser guarantees integrality.
pub fn integer_entries(v: &[Scalar]) -> Vec<BigInt> {
    v.iter().map(|x| x.as_rational().expect("integer coordinate").to_integer()).collect()
}
