//! Command dispatch and JSON reports.
//!
//! Every report is a JSON object with sorted keys, a `command`, a `status`
//! (`ok`, `input_error` or `internal_error`) and an `assumptions` block.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;
use toroidal_core::intlattice::IntLattice;
use toroidal_core::linalg::{self, Mat};
use toroidal_core::riemann::{
    bounded_endomorphisms, build_complement, check_ample, decompose, endo_from_rational, endo_injectivity,
    endq_inverse, AmpleCertificate, SubgroupCheck,
};
use toroidal_core::subvariety::{
    find_subtori, geometric_simplicity_certificate, lattice_coordinates, line_lattice_intersection,
    primitive_vectors, verify_homomorphism, SubtorusCandidate,
};
use toroidal_core::torgroup::{
    closure_of, cm_of, standard_splitting, subgroup_lattice, toroidal_certificate, toroidal_certificate_of,
};
use toroidal_core::{IntMatrix, PeriodLattice, RiemannForm, Scalar, Subspace, SymbolTable, Witness};

use crate::dsl::{integer_entries, Coords, Document, DslError, NamedMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Command {
    Toroidal,
    MaxCx,
    Closure,
    Subgroup,
    LineIntersect,
    Subtori,
    SimpleCert,
    Decompose,
    Endo,
    IsogenyOrder,
    Golden,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Toroidal,
        Command::MaxCx,
        Command::Closure,
        Command::Subgroup,
        Command::LineIntersect,
        Command::Subtori,
        Command::SimpleCert,
        Command::Decompose,
        Command::Endo,
        Command::IsogenyOrder,
        Command::Golden,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Toroidal => "toroidal",
            Command::MaxCx => "max-cx",
            Command::Closure => "closure",
            Command::Subgroup => "subgroup",
            Command::LineIntersect => "line-intersect",
            Command::Subtori => "subtori",
            Command::SimpleCert => "simple-cert",
            Command::Decompose => "decompose",
            Command::Endo => "endo",
            Command::IsogenyOrder => "isogeny-order",
            Command::Golden => "golden",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Flags shared by the document commands. Names select declarations in the
/// document; when omitted, the first declaration of the kind is used.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub height: Option<u32>,
    pub dim: Option<usize>,
    pub witness: Option<String>,
    pub matrix: Option<String>,
    pub form: Option<String>,
    pub subspace: Option<String>,
    pub vector: Option<String>,
    pub map: Option<String>,
    pub compare: Option<String>,
}

impl Options {
    /// Flags as they would be written on the command line, in a fixed order.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |flag: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push(format!("--{flag}"));
                out.push(v);
            }
        };
        push("height", self.height.map(|h| h.to_string()));
        push("dim", self.dim.map(|d| d.to_string()));
        push("matrix", self.matrix.clone());
        push("form", self.form.clone());
        push("witness", self.witness.clone());
        push("subspace", self.subspace.clone());
        push("vector", self.vector.clone());
        push("map", self.map.clone());
        push("compare", self.compare.clone());
        out
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Parse(#[from] DslError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] toroidal_core::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(e) if e.is_internal() => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            RunError::Parse(e) => json!({
                "kind": e.kind.name(),
                "line": e.line,
                "column": e.column,
                "message": e.kind.to_string(),
                "expected": match &e.kind {
                    crate::dsl::DslErrorKind::Syntax { expected, .. } => json!(expected),
                    _ => Value::Null,
                },
            }),
            RunError::Input(m) => json!({ "kind": "InputError", "message": m }),
            RunError::Core(e) => {
                let debug = format!("{e:?}");
                let kind = debug.split(|c: char| !c.is_ascii_alphanumeric()).next().unwrap_or("Error").to_string();
                json!({ "kind": kind, "message": e.to_string() })
            }
        }
    }
}

/// A finished run: the report and the process exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

impl Outcome {
    /// Pretty-printed report with a trailing newline; the stable byte format.
    pub fn render(&self) -> String {
        render(&self.report)
    }
}

/// Two-space indented JSON with arrays of scalars kept on one line.
pub fn render(v: &Value) -> String {
    fn leaf(v: &Value) -> bool {
        !matches!(v, Value::Array(_) | Value::Object(_))
    }
    fn write(out: &mut String, v: &Value, indent: usize) {
        let pad = "  ".repeat(indent + 1);
        match v {
            Value::Object(m) if !m.is_empty() => {
                out.push_str("{\n");
                for (k, (key, x)) in m.iter().enumerate() {
                    out.push_str(&pad);
                    out.push_str(&Value::String(key.clone()).to_string());
                    out.push_str(": ");
                    write(out, x, indent + 1);
                    out.push_str(if k + 1 < m.len() { ",\n" } else { "\n" });
                }
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
            Value::Array(a) if !a.is_empty() && !a.iter().all(leaf) => {
                out.push_str("[\n");
                for (k, x) in a.iter().enumerate() {
                    out.push_str(&pad);
                    write(out, x, indent + 1);
                    out.push_str(if k + 1 < a.len() { ",\n" } else { "\n" });
                }
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Value::Array(a) => {
                let items: Vec<String> = a.iter().map(Value::to_string).collect();
                out.push('[');
                out.push_str(&items.join(", "));
                out.push(']');
            }
            other => out.push_str(&other.to_string()),
        }
    }
    let mut out = String::new();
    write(&mut out, v, 0);
    out.push('\n');
    out
}

const COMPLEMENT_RULE: &str = "complements are chosen greedily from the leftmost pivot columns of the reduced \
     row echelon basis of the enclosing space; other choices give isomorphic factors";

const INDEPENDENCE: &str = "symbols are real and algebraically independent over Q; ranks, kernels and \
     equalities are decided exactly in Q(i)(symbols), so they hold for all values outside a proper algebraic subset";

/// Run `command` on parsed `text`, turning every error into a report.
pub fn run_text(command: Command, text: &str, opts: &Options) -> Outcome {
    match crate::dsl::parse(text) {
        Ok(doc) => run(command, &doc, opts),
        Err(e) => failure(command, None, opts, RunError::Parse(e)),
    }
}

pub fn run(command: Command, doc: &Document, opts: &Options) -> Outcome {
    let mut ctx = Context { doc, opts, witness: None, matrix: None };
    match ctx.dispatch(command) {
        Ok(fields) => {
            let mut report = fields;
            report.insert("command".into(), json!(command.as_str()));
            report.insert("status".into(), json!("ok"));
            report.insert("assumptions".into(), assumptions(command, Some(&doc.symbols), opts, &ctx.matrix, &ctx.witness));
            Outcome { report: Value::Object(report), exit_code: 0 }
        }
        Err(e) => failure(command, Some(&ctx), opts, e),
    }
}

fn failure(command: Command, ctx: Option<&Context>, opts: &Options, e: RunError) -> Outcome {
    let code = e.exit_code();
    let (symbols, matrix, witness) = match ctx {
        Some(c) => (Some(&c.doc.symbols), c.matrix.clone(), c.witness.clone()),
        None => (None, None, None),
    };
    let report = json!({
        "command": command.as_str(),
        "status": if code == 2 { "internal_error" } else { "input_error" },
        "error": e.to_json(),
        "assumptions": assumptions(command, symbols, opts, &matrix, &witness),
    });
    Outcome { report, exit_code: code }
}

fn assumptions(
    command: Command,
    symbols: Option<&SymbolTable>,
    opts: &Options,
    matrix: &Option<String>,
    witness: &Option<Value>,
) -> Value {
    let names: Vec<String> = symbols.map(|t| t.names().to_vec()).unwrap_or_default();
    let field = if names.is_empty() { "Q(i)".to_string() } else { format!("Q(i)({})", names.join(", ")) };
    let bounded = matches!(command, Command::LineIntersect | Command::Subtori | Command::SimpleCert | Command::Decompose)
        || (command == Command::Endo && opts.map.is_none());
    let scope = match command {
        Command::Subtori | Command::SimpleCert | Command::Decompose => Some(
            "negative verdicts cover only subgroups spanned by lattice vectors of height at most H \
             (maximum absolute coordinate in the generators, primitive vectors only)",
        ),
        Command::LineIntersect if opts.vector.is_none() => {
            Some("every primitive direction of height at most H with first nonzero coordinate positive")
        }
        Command::Endo if opts.map.is_none() => Some("rational representations with entries bounded by H in absolute value"),
        _ => None,
    };
    let complement = matches!(command, Command::Decompose | Command::IsogenyOrder).then_some(COMPLEMENT_RULE);
    json!({
        "symbols": names,
        "field": field,
        "algebraic_independence": if names.is_empty() { "no symbols; entries lie in Q(i)" } else { INDEPENDENCE },
        "height_bound": if bounded { opts.height.map(|h| json!(h)).unwrap_or(Value::Null) } else { Value::Null },
        "search_scope": scope,
        "complement_rule": complement,
        "matrix": matrix,
        "witness": witness,
        "real_coordinates": "real subspaces are written in (Re z_1, ..., Re z_n, Im z_1, ..., Im z_n)",
    })
}

struct Context<'a> {
    doc: &'a Document,
    opts: &'a Options,
    /// Witness values used, recorded for the assumptions block.
    witness: Option<Value>,
    matrix: Option<String>,
}

fn strings(m: &Mat<Scalar>, t: &SymbolTable) -> Value {
    json!(m.iter().map(|r| r.iter().map(|x| t.fmt(x)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn vector_strings(v: &[Scalar], t: &SymbolTable) -> Value {
    json!(v.iter().map(|x| t.fmt(x)).collect::<Vec<_>>())
}

fn ints(v: &[BigInt]) -> Value {
    json!(v.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn lattice_json(l: &IntLattice) -> Value {
    json!({
        "rank": l.rank(),
        "ambient_rank": l.ambient_rank(),
        "basis": l.basis_vectors().iter().map(|v| ints(v)).collect::<Vec<_>>(),
    })
}

fn complex_subspace_json(s: &Subspace, t: &SymbolTable) -> Result<Value, RunError> {
    let basis = s.complex_basis()?;
    Ok(json!({
        "complex_dim": basis.len(),
        "basis": basis.iter().map(|v| vector_strings(v, t)).collect::<Vec<_>>(),
    }))
}

fn real_subspace_json(s: &Subspace, t: &SymbolTable) -> Value {
    json!({ "real_dim": s.dim(), "basis": s.canonical_strings(t) })
}

fn is_unit(x: &BigInt) -> bool {
    x.abs().is_one()
}

impl<'a> Context<'a> {
    fn t(&self) -> &'a SymbolTable {
        &self.doc.symbols
    }

    fn pick<'b, T>(
        &self,
        what: &str,
        name: Option<&String>,
        items: &'b [T],
        key: impl Fn(&T) -> &str,
    ) -> Result<&'b T, RunError> {
        match name {
            Some(n) => items
                .iter()
                .find(|x| key(x) == n)
                .ok_or_else(|| RunError::Input(format!("no {what} named `{n}`"))),
            None => items.first().ok_or_else(|| RunError::Input(format!("document declares no {what}"))),
        }
    }

    fn lattice(&mut self) -> Result<PeriodLattice, RunError> {
        let m = self.pick("matrix", self.opts.matrix.as_ref(), &self.doc.matrices, |m| &m.name)?;
        self.matrix = Some(m.name.clone());
        Ok(PeriodLattice::new(self.t().clone(), m.rows.clone())?)
    }

    fn named_matrix(&self, name: &str) -> Result<&'a NamedMatrix, RunError> {
        self.doc.matrix(name).ok_or_else(|| RunError::Input(format!("no matrix named `{name}`")))
    }

    fn form(&mut self) -> Result<RiemannForm, RunError> {
        let f = self.pick("form", self.opts.form.as_ref(), &self.doc.forms, |m| &m.name)?;
        let mut witness = Witness::default();
        let mut record = Map::new();
        if !self.t().is_empty() || self.opts.witness.is_some() {
            let w = self.pick("witness", self.opts.witness.as_ref(), &self.doc.witnesses, |w| &w.name)?;
            witness = Witness::from_assignments(self.t(), &w.values)?;
            for (s, v) in &w.values {
                record.insert(s.clone(), json!(v.to_string()));
            }
            if let Some((s, lo, hi)) = &w.interval {
                let var = self.t().index_of(s).expect("parser checks symbols");
                witness = witness.with_interval(var, lo.clone(), hi.clone());
                record.insert("interval".into(), json!({ "symbol": s, "lo": lo.to_string(), "hi": hi.to_string() }));
            }
            record.insert("name".into(), json!(w.name));
        }
        self.witness = Some(Value::Object(record));
        Ok(RiemannForm::new(f.rows.clone(), witness))
    }

    /// Points of C^n named by a subspace or vector declaration.
    fn points(&self, coords: Coords, vectors: &[Vec<Scalar>], p: &PeriodLattice) -> Result<Vec<Vec<Scalar>>, RunError> {
        let want = match coords {
            Coords::Gamma => p.rank(),
            Coords::Ambient => p.dim(),
        };
        if let Some(v) = vectors.iter().find(|v| v.len() != want) {
            return Err(RunError::Input(format!(
                "{} vector has {} entries, expected {want}",
                coords.as_str(),
                v.len()
            )));
        }
        Ok(match coords {
            Coords::Gamma => vectors.iter().map(|v| p.point(&integer_entries(v))).collect(),
            Coords::Ambient => vectors.to_vec(),
        })
    }

    /// The `--subspace` declaration as a complex span, or `C_Γ^m` by default.
    fn subspace(&self, p: &PeriodLattice, default_cm: bool) -> Result<(String, Subspace), RunError> {
        match &self.opts.subspace {
            Some(name) => {
                let d = self.doc.subspace(name).ok_or_else(|| RunError::Input(format!("no subspace named `{name}`")))?;
                let pts = self.points(d.coords, &d.vectors, p)?;
                Ok((name.clone(), Subspace::complex_span(p.dim(), &pts)))
            }
            None if default_cm => Ok(("C_m".into(), cm_of(p))),
            None => match self.doc.subspaces.first() {
                Some(d) => {
                    let pts = self.points(d.coords, &d.vectors, p)?;
                    Ok((d.name.clone(), Subspace::complex_span(p.dim(), &pts)))
                }
                None => Err(RunError::Input("document declares no subspace".into())),
            },
        }
    }

    fn height(&self) -> Result<u32, RunError> {
        self.opts.height.ok_or_else(|| RunError::Input("--height is required".into()))
    }

    fn dispatch(&mut self, command: Command) -> Result<Map<String, Value>, RunError> {
        let v = match command {
            Command::Toroidal => self.toroidal()?,
            Command::MaxCx => self.max_cx()?,
            Command::Closure => self.closure()?,
            Command::Subgroup => self.subgroup()?,
            Command::LineIntersect => self.line_intersect()?,
            Command::Subtori => self.subtori()?,
            Command::SimpleCert => self.simple_cert()?,
            Command::Decompose => self.decompose()?,
            Command::Endo => self.endo()?,
            Command::IsogenyOrder => self.isogeny_order()?,
            Command::Golden => return Err(RunError::Input("`golden` does not take a document".into())),
        };
        match v {
            Value::Object(m) => Ok(m),
            _ => unreachable!("command reports are objects"),
        }
    }

    fn shape(p: &PeriodLattice) -> Value {
        json!({ "n": p.dim(), "rank": p.rank(), "m": p.m() })
    }

    fn toroidal(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let cert = toroidal_certificate(&p);
        Ok(json!({
            "verdict": cert.toroidal,
            "shape": Self::shape(&p),
            "certificate": {
                "conditions": cert
                    .conditions
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "character_lattice": lattice_json(&cert.character_lattice),
                "sigma": cert.sigma.as_deref().map(ints),
                "span_deficient": cert.span_deficient,
            },
        }))
    }

    fn max_cx(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        let s = standard_splitting(&p)?;
        let lattice = subgroup_lattice(&s.cm, &p);
        Ok(json!({
            "verdict": s.cm.dim() / 2,
            "shape": Self::shape(&p),
            "real_span": real_subspace_json(&s.real_span, t),
            "cm": complex_subspace_json(&s.cm, t)?,
            "w": real_subspace_json(&s.w, t),
            "cm_lattice": lattice_json(&lattice),
            "cm_generators": strings(&p.sub_matrix(lattice.basis()), t),
        }))
    }

    fn closure(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        let (name, e) = self.subspace(&p, true)?;
        let c = closure_of(&e, &p);
        Ok(json!({
            "verdict": c.is_closed,
            "subspace": { "name": name, "span": complex_subspace_json(&e, t)? },
            "closure": real_subspace_json(&c.subspace, t),
            "closure_is_real_span": c.subspace == p.real_span(),
            "discrete_part": lattice_json(&c.discrete),
            "characters": lattice_json(&c.characters),
        }))
    }

    fn subgroup(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        let (name, e) = self.subspace(&p, true)?;
        let d = e.complex_dim()?;
        let lattice = subgroup_lattice(&e, &p);
        let ambient_generators = p.sub_matrix(lattice.basis());
        let closed = closure_of(&e, &p).is_closed;
        let toroidal = d > 0 && toroidal_certificate_of(&ambient_generators, d).toroidal;
        let mut out = json!({
            "verdict": { "closed": closed, "toroidal": toroidal },
            "subspace": { "name": name, "span": complex_subspace_json(&e, t)? },
            "lattice": lattice_json(&lattice),
            "ambient_generators": strings(&ambient_generators, t),
        });
        let Some((basis, y)) = self.intrinsic(&p, &lattice, d)? else {
            out["period"] = Value::Null;
            out["inclusion"] = Value::Null;
            out["comparison"] = Value::Null;
            return Ok(out);
        };
        out["coordinate_basis"] = strings(&basis, t);
        out["period"] = strings(y.matrix(), t);
        let check = verify_homomorphism(&basis, &y, &p)?;
        out["inclusion"] = json!({
            "ok": check.ok,
            "rational_rep": check.rational_rep.as_ref().map(IntMatrix::to_strings),
            "nonzero": check.rational_rep.as_ref().is_some_and(|c| !c.is_zero()),
        });
        out["comparison"] = match &self.opts.compare {
            None => Value::Null,
            Some(other) => self.compare(&y, other)?,
        };
        Ok(out)
    }

    /// `E ∩ Γ` written as a period matrix in a basis of `E` made of lattice
    /// points, when those points span `E`.
    fn intrinsic(
        &self,
        p: &PeriodLattice,
        lattice: &IntLattice,
        d: usize,
    ) -> Result<Option<(Mat<Scalar>, PeriodLattice)>, RunError> {
        let n = p.dim();
        let points: Vec<Vec<Scalar>> = lattice.basis_vectors().iter().map(|v| p.point(v)).collect();
        let mut chosen: Vec<Vec<Scalar>> = Vec::new();
        for z in &points {
            if chosen.len() == d {
                break;
            }
            let mut trial = chosen.clone();
            trial.push(z.clone());
            if linalg::rank(&linalg::from_columns(&trial, n)) == trial.len() {
                chosen = trial;
            }
        }
        if d == 0 || chosen.len() < d {
            return Ok(None);
        }
        let basis = linalg::from_columns(&chosen, n);
        let mut cols = Vec::with_capacity(points.len());
        for z in &points {
            let c = linalg::solve(&basis, z, d).ok_or_else(|| {
                RunError::Core(toroidal_core::Error::InternalInconsistency("lattice point outside its subspace".into()))
            })?;
            cols.push(c);
        }
        let y = PeriodLattice::new(self.t().clone(), linalg::from_columns(&cols, d))?;
        Ok(Some((basis, y)))
    }

    /// Unimodular column equivalence `Y = P' C` with a named matrix `P'`.
    fn compare(&self, y: &PeriodLattice, other: &str) -> Result<Value, RunError> {
        let m = self.named_matrix(other)?;
        if m.rows.len() != y.dim() || m.cols != y.rank() {
            return Ok(json!({ "name": other, "equivalent": false, "transform": null, "reason": "shape differs" }));
        }
        let q = PeriodLattice::new(self.t().clone(), m.rows.clone())?;
        let cols: Option<Vec<Vec<BigInt>>> = (0..y.rank()).map(|j| lattice_coordinates(&y.generator(j), &q)).collect();
        let Some(cols) = cols else {
            return Ok(json!({ "name": other, "equivalent": false, "transform": null, "reason": "a generator is not in the lattice" }));
        };
        let c = IntMatrix::from_columns(&cols, y.rank());
        let det = c.det();
        Ok(json!({
            "name": other,
            "equivalent": is_unit(&det),
            "transform": c.to_strings(),
            "det": det.to_string(),
        }))
    }

    fn line_intersect(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        if let Some(name) = &self.opts.vector {
            let d = self.doc.vector(name).ok_or_else(|| RunError::Input(format!("no vector named `{name}`")))?;
            let lambda = self.points(d.coords, &d.vectors, &p)?.remove(0);
            let li = line_lattice_intersection(&lambda, &p)?;
            return Ok(json!({
                "verdict": li.rank,
                "vector": name,
                "line_generator": vector_strings(&li.line_generator, t),
                "lattice": lattice_json(&li.lattice),
            }));
        }
        let h = self.height()?;
        let dirs = primitive_vectors(p.rank(), h);
        let results: Vec<Result<(usize, bool), toroidal_core::Error>> = dirs
            .par_iter()
            .map(|a| {
                let a = toroidal_core::intlattice::big_vec(a);
                let li = line_lattice_intersection(&p.point(&a), &p)?;
                Ok((li.rank, li.lattice == IntLattice::from_vectors(&[a], p.rank())))
            })
            .collect();
        let mut histogram = Map::new();
        let mut exceptions = Vec::new();
        let mut generated = 0usize;
        for (a, r) in dirs.iter().zip(results) {
            let (rank, by_a) = r?;
            let key = rank.to_string();
            let count = histogram.get(&key).and_then(Value::as_u64).unwrap_or(0);
            histogram.insert(key, json!(count + 1));
            if by_a {
                generated += 1;
            } else {
                exceptions.push(json!({ "a": a.iter().map(ToString::to_string).collect::<Vec<_>>(), "rank": rank }));
            }
        }
        let all = exceptions.is_empty();
        Ok(json!({
            "verdict": if all { "every_line_meets_lattice_in_its_generator" } else { "exceptional_lines_found" },
            "height": h,
            "lines": dirs.len(),
            "rank_histogram": histogram,
            "generated_by_direction": generated,
            "exceptions": exceptions,
        }))
    }

    fn candidate_json(c: &SubtorusCandidate, p: &PeriodLattice, t: &SymbolTable) -> Result<Value, RunError> {
        Ok(json!({
            "source": format!("{:?}", c.source),
            "generators": c.generators.iter().map(|v| ints(v)).collect::<Vec<_>>(),
            "span": complex_subspace_json(&c.subspace, t)?,
            "lattice": lattice_json(&c.lattice),
            "ambient_generators": strings(&p.sub_matrix(c.lattice.basis()), t),
            "toroidal": c.toroidal.toroidal,
            "closed": c.closure.is_closed,
            "closure_real_dim": c.closure.subspace.dim(),
            "is_subtorus": c.is_subtorus,
        }))
    }

    fn subtori(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        let h = self.height()?;
        let d = self.opts.dim.ok_or_else(|| RunError::Input("--dim is required".into()))?;
        if d == 0 || d >= p.dim() {
            return Err(RunError::Input(format!("--dim must lie in 1..{}", p.dim())));
        }
        let found = find_subtori(&p, d, h)?;
        let closed_toroidal = found.iter().filter(|c| c.is_closed_toroidal()).count();
        let candidates = found.iter().map(|c| Self::candidate_json(c, &p, t)).collect::<Result<Vec<_>, _>>()?;
        Ok(json!({
            "verdict": if closed_toroidal > 0 { "counterexample" } else { "no_closed_toroidal_subgroup_up_to_H" },
            "height": h,
            "dim": d,
            "closed_toroidal": closed_toroidal,
            "candidates": candidates,
        }))
    }

    fn simple_cert(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        let h = self.height()?;
        let cert = geometric_simplicity_certificate(&p, h)?;
        let candidates = cert.candidates.iter().map(|c| Self::candidate_json(c, &p, t)).collect::<Result<Vec<_>, _>>()?;
        let nonclosed = cert
            .candidates
            .iter()
            .find(|c| c.toroidal.toroidal && !c.closure.is_closed)
            .map(|c| Self::candidate_json(c, &p, t))
            .transpose()?;
        let counterexample = cert.counterexample.as_ref().map(|c| Self::candidate_json(c, &p, t)).transpose()?;
        Ok(json!({
            "verdict": cert.verdict.as_str(),
            "height": h,
            "dimension_range": cert.dimension_range,
            "counterexample": counterexample,
            "witness_subgroup_nonclosed": nonclosed,
            "candidates": candidates,
        }))
    }

    fn ample_json(a: &AmpleCertificate, t: &SymbolTable) -> Value {
        json!({
            "pairing": a.a.to_strings(),
            "cm_basis": a.cm_basis.iter().map(|v| vector_strings(v, t)).collect::<Vec<_>>(),
            "minors": a.minors.iter().map(|m| json!({
                "value": m.value.fmt_with(t.names()),
                "at_witness": m.at_witness.as_ref().map(ToString::to_string),
                "interval_certified": m.interval_certified,
            })).collect::<Vec<_>>(),
        })
    }

    fn decompose(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        let form = self.form()?;
        let h = self.height()?;
        let ample = check_ample(&form, &p)?;
        let dec = decompose(&p, &form, h)?;
        let mut factors = Vec::new();
        let mut certificates = Vec::new();
        for (k, f) in dec.factors.iter().enumerate() {
            let ft = f.period.symbols();
            factors.push(json!({
                "dim": f.dim,
                "period": strings(f.period.matrix(), ft),
                "form": strings(&f.form.h, ft),
                "embedding": strings(&f.embedding, t),
                "lattice": lattice_json(&f.lattice),
                "toroidal": f.toroidal,
            }));
            let c = &f.certificate;
            certificates.push(json!({
                "factor": k,
                "verdict": c.verdict.as_str(),
                "height": c.height_bound,
                "dimension_range": c.dimension_range,
                "candidates": c.candidates.len(),
                "nonclosed_toroidal": c.candidates.iter().filter(|x| x.toroidal.toroidal && !x.closure.is_closed).count(),
            }));
        }
        let steps: Vec<Value> = dec
            .steps
            .iter()
            .map(|s| {
                let st = &s.step;
                Ok(json!({
                    "path": s.path,
                    "gamma1": lattice_json(&st.gamma1),
                    "gamma2": lattice_json(&st.gamma2),
                    "lambda": lattice_json(&st.lambda),
                    "v1": complex_subspace_json(&st.v1, t)?,
                    "v2": complex_subspace_json(&st.v2, t)?,
                    "isogeny_order": st.isogeny_order.to_string(),
                }))
            })
            .collect::<Result<_, RunError>>()?;
        Ok(json!({
            "verdict": dec.factors.len(),
            "height": h,
            "ample": Self::ample_json(&ample, t),
            "factors": factors,
            "steps": steps,
            "total_order": dec.total_order.to_string(),
            "certificates": certificates,
        }))
    }

    fn subgroup_check_json(s: &SubgroupCheck, t: &SymbolTable) -> Result<Value, RunError> {
        Ok(json!({
            "span": complex_subspace_json(&s.subspace, t)?,
            "lattice": lattice_json(&s.lattice),
            "closed": s.closed,
            "toroidal": s.toroidal,
        }))
    }

    fn endo_json(phi: &Mat<Scalar>, p: &PeriodLattice, t: &SymbolTable) -> Result<Value, RunError> {
        let r = endo_injectivity(phi, p)?;
        let inverse = match endq_inverse(&r.rational_rep, p) {
            Ok((num, d)) => json!({ "numerator": num.to_strings(), "denominator": d.to_string() }),
            Err(toroidal_core::Error::NotInvertible) => Value::Null,
            Err(e) => return Err(e.into()),
        };
        Ok(json!({
            "analytic": strings(phi, t),
            "rational_rep": r.rational_rep.to_strings(),
            "injective": r.injective,
            "kernel": complex_subspace_json(&r.kernel, t)?,
            "kernel_lattice": lattice_json(&r.kernel_lattice),
            "image": complex_subspace_json(&r.image, t)?,
            "image_lattice": lattice_json(&r.image_lattice),
            "rank_sum_full": r.rank_sum_full,
            "intersection_trivial": r.intersection_trivial,
            "real_span_splits": r.real_span_splits,
            "kernel_subgroup": r.kernel_subgroup.as_ref().map(|s| Self::subgroup_check_json(s, t)).transpose()?,
            "image_subgroup": r.image_subgroup.as_ref().map(|s| Self::subgroup_check_json(s, t)).transpose()?,
            "q_inverse": inverse,
        }))
    }

    fn endo(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        if let Some(name) = &self.opts.map {
            let m = self.named_matrix(name)?;
            let e = Self::endo_json(&m.rows, &p, t)?;
            return Ok(json!({ "verdict": e["injective"].clone(), "map": name, "endomorphism": e }));
        }
        let h = self.height()?;
        let list = bounded_endomorphisms(&p, h)?;
        let mut out = Vec::new();
        let mut nonzero_injective = true;
        for c in list.iter().filter(|c| !c.is_zero()) {
            let phi = endo_from_rational(c, &p)?;
            let e = Self::endo_json(&phi, &p, t)?;
            nonzero_injective &= e["injective"].as_bool().unwrap_or(false);
            out.push(e);
        }
        Ok(json!({
            "verdict": if nonzero_injective { "every_nonzero_endomorphism_injective" } else { "noninjective_endomorphism_found" },
            "height": h,
            "count": list.len(),
            "nonzero": out,
        }))
    }

    fn isogeny_order(&mut self) -> Result<Value, RunError> {
        let p = self.lattice()?;
        let t = self.t();
        let form = self.form()?;
        let (name, v1) = self.subspace(&p, false)?;
        let st = build_complement(&p, &v1, &form)?;
        let sp = &st.splittings;
        Ok(json!({
            "verdict": st.isogeny_order.to_string(),
            "subspace": name,
            "gamma1": lattice_json(&st.gamma1),
            "gamma2": lattice_json(&st.gamma2),
            "lambda": lattice_json(&st.lambda),
            "v1": complex_subspace_json(&st.v1, t)?,
            "v2": complex_subspace_json(&st.v2, t)?,
            "generator_order": st.order.to_strings(),
            "a1": st.a1.a1.to_strings(),
            "selection": {
                "kernel": lattice_json(&st.selection.kernel),
                "vectors": st.selection.vectors.iter().map(|v| ints(v)).collect::<Vec<_>>(),
                "bottom_minor": st.selection.minor.to_string(),
                "bottom_minor_nonzero": !st.selection.minor.is_zero(),
            },
            "quotient": {
                "elementary_divisors": ints(&st.quotient.elementary_divisors),
                "free_rank": st.quotient.free_rank,
            },
            "splittings": {
                "w1_splits": sp.w1_splits,
                "e_splits": sp.e_splits,
                "lambda_dims_match": sp.lambda_dims_match,
                "v2_agrees": sp.v2_agrees,
            },
            "x1_period": strings(st.x1.period.matrix(), st.x1.period.symbols()),
            "x2_period": strings(st.x2.period.matrix(), st.x2.period.symbols()),
            "isogeny_order": st.isogeny_order.to_string(),
        }))
    }
}
