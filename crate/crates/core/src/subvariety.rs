//! Line–lattice intersections, bounded subtorus search, simplicity
//! certificates, and homomorphism checks.
//!
//! The search enumerates `d`-tuples of primitive lattice vectors. For a tuple
//! `a_1 < ... < a_d` the subspace `E = span(P a_k)` meets `Γ` in
//! `{b : every (d+1)-minor of [P a_1 .. P a_d | P b] vanishes}`. Those minors
//! are multilinear in the `a_k` and `b`, so the coefficient tensor is expanded
//! once into integer channels (one per monomial and real/imaginary part) and
//! reduced modulo a prime. A tuple is kept only when the modular rank of the
//! conditions on `b` leaves room for `rank(E ∩ Γ) >= d + 1`; modular rank never
//! exceeds rational rank, so no true candidate is lost. Survivors are then
//! verified exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intlattice::{big_vec, integer_kernel, IntLattice, IntMatrix};
use crate::linalg::{self, Mat};
use crate::scalar::decompose::{linear_conditions, monomial_decompose};
use crate::scalar::{gcd::lcm, Monomial, Poly, Scalar};
use crate::torgroup::{
    closure_of, cm_of, realify_vector, subgroup_lattice, toroidal_certificate,
    toroidal_certificate_of, ClosureResult, PeriodLattice, Subspace, ToroidalCertificate,
};

/// `L ∩ Γ` for the complex line `L = C λ`, in Γ-coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LineIntersection {
    pub line_generator: Vec<Scalar>,
    pub lattice: IntLattice,
    pub rank: usize,
}

/// Rational conditions on `a` for `P a` to be proportional to `lambda`.
fn proportionality_conditions(lambda: &[Scalar], p: &PeriodLattice) -> Mat<BigRational> {
    let n = p.dim();
    let m = p.matrix();
    let mut rows = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            let row: Vec<Scalar> = (0..p.rank())
                .map(|j| &(&m[s][j] * &lambda[t]) - &(&m[t][j] * &lambda[s]))
                .collect();
            rows.push(row);
        }
    }
    linear_conditions(&rows)
}

pub fn line_lattice_intersection(lambda: &[Scalar], p: &PeriodLattice) -> Result<LineIntersection> {
    if lambda.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} coordinates, lattice lives in C^{}",
            lambda.len(),
            p.dim()
        )));
    }
    if lambda.iter().all(Scalar::is_zero) {
        return Err(Error::ZeroDirection);
    }
    let conditions = proportionality_conditions(lambda, p);
    let lattice = if conditions.is_empty() {
        IntLattice::full(p.rank())
    } else {
        integer_kernel(&conditions, p.rank())
    };
    let rank = lattice.rank();
    if rank > 2 {
        return Err(Error::InternalInconsistency(format!(
            "a complex line meets the lattice in rank {rank}"
        )));
    }
    Ok(LineIntersection { line_generator: lambda.to_vec(), lattice, rank })
}

/// Primitive integer vectors of length `n` with `max |a_i| <= h`, first nonzero
/// entry positive, in lexicographic order.
pub fn primitive_vectors(n: usize, h: u32) -> Vec<Vec<i64>> {
    let h = h as i64;
    let mut out = Vec::new();
    let mut cur = vec![-h; n];
    loop {
        let first = cur.iter().find(|&&x| x != 0);
        if matches!(first, Some(&x) if x > 0) && cur.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1 {
            out.push(cur.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < h {
                cur[k] += 1;
                for x in cur.iter_mut().skip(k + 1) {
                    *x = -h;
                }
                break;
            }
        }
    }
}

/// How a candidate subspace was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CandidateSource {
    /// Complex span of enumerated lattice vectors.
    LatticeSpan,
    /// Complex span of the lattice vectors inside the maximal complex subspace.
    MaximalComplex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubtorusCandidate {
    pub source: CandidateSource,
    /// Lattice vectors whose complex span is the subspace.
    pub generators: Vec<Vec<BigInt>>,
    pub subspace: Subspace,
    pub complex_dim: usize,
    /// `E ∩ Γ` in Γ-coordinates.
    pub lattice: IntLattice,
    pub toroidal: ToroidalCertificate,
    pub closure: ClosureResult,
    /// `rank(E ∩ Γ) = 2 d`, i.e. `E / (E ∩ Γ)` is compact.
    pub is_subtorus: bool,
}

impl SubtorusCandidate {
    pub fn is_closed_toroidal(&self) -> bool {
        self.toroidal.toroidal && self.closure.is_closed
    }
}

/// The Mersenne prime 2^31 - 1, so reductions need only shifts and masks.
const PRIME: i64 = 2_147_483_647;

/// Reduce `0 <= x < 2^62` modulo the prime.
fn fold(x: u64) -> i64 {
    let p = PRIME as u64;
    let y = (x & p) + (x >> 31);
    let y = (y & p) + (y >> 31);
    (if y >= p { y - p } else { y }) as i64
}

/// Reduce a signed value with `|x| < 2^61`.
fn modp(x: i64) -> i64 {
    const SHIFT: i64 = PRIME << 29;
    fold((x + SHIFT) as u64)
}

fn mulmod(a: i64, b: i64) -> i64 {
    fold(a as u64 * b as u64)
}

fn bigint_mod(x: &BigInt) -> i64 {
    x.mod_floor(&BigInt::from(PRIME)).to_i64().expect("residue fits")
}

/// Minor coefficients reduced mod p, laid out `[j_1]..[j_{d-1}][q][j_d][l]`
/// where `q` runs over (row subset, channel) pairs.
struct MinorTensor {
    n_gens: usize,
    d: usize,
    rows: usize,
    data: Vec<i64>,
}

impl MinorTensor {
    fn build(p: &PeriodLattice, d: usize) -> MinorTensor {
        let n = p.dim();
        let big_n = p.rank();
        // clear denominators so every entry is a polynomial
        let mut den = Poly::one();
        for x in p.matrix().iter().flatten() {
            for f in [&x.re, &x.im] {
                if !f.denom().is_one() {
                    den = lcm(&den, f.denom());
                }
            }
        }
        let scale = Scalar::from_poly(den);
        let m: Mat<Scalar> =
            p.matrix().iter().map(|r| r.iter().map(|x| x * &scale).collect()).collect();
        let subsets = row_subsets(n, d + 1);
        let tuples = index_tuples(big_n, d);
        // det of rows R of [γ_J, γ_l] for every R, J, l
        let mut dets: Vec<Scalar> = Vec::with_capacity(subsets.len() * tuples.len() * big_n);
        for rs in &subsets {
            for t in &tuples {
                for l in 0..big_n {
                    let mut cols: Vec<usize> = t.clone();
                    cols.push(l);
                    let sub: Mat<Scalar> =
                        rs.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect();
                    dets.push(linalg::det(&sub));
                }
            }
        }
        let mut channels: BTreeSet<(Monomial, bool)> = BTreeSet::new();
        let mut den_lcm = BigInt::one();
        for x in &dets {
            for (imag, f) in [(false, &x.re), (true, &x.im)] {
                for (mono, c) in f.numer().terms() {
                    channels.insert((mono.clone(), imag));
                    den_lcm = den_lcm.lcm(c.denom());
                }
            }
        }
        let channels: Vec<(Monomial, bool)> = channels.into_iter().collect();
        let ch_index: BTreeMap<&(Monomial, bool), usize> =
            channels.iter().enumerate().map(|(k, c)| (c, k)).collect();
        let n_ch = channels.len().max(1);
        let rows = subsets.len() * n_ch;
        let prefix = big_n.pow(d as u32 - 1);
        let mut data = vec![0i64; prefix * rows * big_n * big_n];
        let scale_q = BigRational::from_integer(den_lcm);
        for (ri, _) in subsets.iter().enumerate() {
            for (ti, t) in tuples.iter().enumerate() {
                let (head, jd) = t.split_at(d - 1);
                let pre = head.iter().fold(0, |acc, &j| acc * big_n + j);
                for l in 0..big_n {
                    let x = &dets[(ri * tuples.len() + ti) * big_n + l];
                    for (imag, f) in [(false, &x.re), (true, &x.im)] {
                        for (mono, c) in f.numer().terms() {
                            let ch = ch_index[&(mono.clone(), imag)];
                            let q = ch * subsets.len() + ri;
                            let v = (c * &scale_q).to_integer();
                            let idx = ((pre * rows + q) * big_n + jd[0]) * big_n + l;
                            data[idx] = bigint_mod(&v);
                        }
                    }
                }
            }
        }
        MinorTensor { n_gens: big_n, d, rows, data }
    }

    /// Contract the leading index with `a`.
    fn contract(&self, block: &[i64], a: &[i64]) -> Vec<i64> {
        let len = block.len() / self.n_gens;
        let mut out = vec![0i64; len];
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0 {
                continue;
            }
            let src = &block[j * len..(j + 1) * len];
            for (o, &s) in out.iter_mut().zip(src) {
                *o += aj * s;
            }
        }
        for o in out.iter_mut() {
            *o = modp(*o);
        }
        out
    }

    /// Whether the conditions on `b` given by the last factor `a` have modular
    /// rank below `limit`.
    fn low_rank(&self, s: &[i64], a: &[i64], limit: usize, scratch: &mut Scratch) -> bool {
        let big_n = self.n_gens;
        let Scratch { pivots, cols, row } = scratch;
        cols.clear();
        pivots.clear();
        for q in 0..self.rows {
            let block = &s[q * big_n * big_n..(q + 1) * big_n * big_n];
            row.iter_mut().for_each(|x| *x = 0);
            for (chunk, &aj) in block.chunks_exact(big_n).zip(a) {
                for (x, &t) in row.iter_mut().zip(chunk) {
                    *x += aj * t;
                }
            }
            for x in row.iter_mut() {
                *x = modp(*x);
            }
            for (k, &pc) in cols.iter().enumerate() {
                let f = row[pc];
                if f != 0 {
                    let pr = &pivots[k * big_n..(k + 1) * big_n];
                    let g = pr[pc];
                    for (x, &y) in row.iter_mut().zip(pr) {
                        *x = modp(mulmod(*x, g) - mulmod(f, y));
                    }
                }
            }
            if let Some(pc) = row.iter().position(|&x| x != 0) {
                cols.push(pc);
                if cols.len() >= limit {
                    return false;
                }
                pivots.extend_from_slice(row);
            }
        }
        true
    }
}

/// Reusable buffers for [`MinorTensor::low_rank`].
struct Scratch {
    pivots: Vec<i64>,
    cols: Vec<usize>,
    row: Vec<i64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { pivots: Vec::with_capacity(n * n), cols: Vec::with_capacity(n), row: vec![0; n] }
    }
}

fn row_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn index_tuples(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |j| {
                    let mut t2 = t.clone();
                    t2.push(j);
                    t2
                })
            })
            .collect();
    }
    out
}

/// Tuples of indices into `vecs` that survive the modular filter.
fn flagged_tuples(tensor: &MinorTensor, vecs: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let d = tensor.d;
    let limit = tensor.n_gens - d;
    let starts: Vec<usize> = (0..vecs.len()).collect();
    let per_start: Vec<Vec<Vec<usize>>> = starts
        .par_iter()
        .map(|&i| {
            let mut found = Vec::new();
            let mut prefix = vec![i];
            let mut scratch = Scratch::new(tensor.n_gens);
            if d == 1 {
                if tensor.low_rank(&tensor.data, &vecs[i], limit, &mut scratch) {
                    found.push(prefix);
                }
                return found;
            }
            let s = tensor.contract(&tensor.data, &vecs[i]);
            descend(tensor, vecs, &s, &mut prefix, limit, &mut scratch, &mut found);
            found
        })
        .collect();
    per_start.into_iter().flatten().collect()
}

fn descend(
    tensor: &MinorTensor,
    vecs: &[Vec<i64>],
    s: &[i64],
    prefix: &mut Vec<usize>,
    limit: usize,
    scratch: &mut Scratch,
    found: &mut Vec<Vec<usize>>,
) {
    let last = *prefix.last().expect("nonempty prefix");
    let remaining = tensor.d - prefix.len();
    for k in last + 1..vecs.len() {
        prefix.push(k);
        if remaining == 1 {
            if tensor.low_rank(s, &vecs[k], limit, scratch) {
                found.push(prefix.clone());
            }
        } else {
            let s2 = tensor.contract(s, &vecs[k]);
            descend(tensor, vecs, &s2, prefix, limit, scratch, found);
        }
        prefix.pop();
    }
}

fn exact_candidate(
    p: &PeriodLattice,
    generators: Vec<Vec<BigInt>>,
    d: usize,
    source: CandidateSource,
) -> Option<SubtorusCandidate> {
    let points: Vec<Vec<Scalar>> = generators.iter().map(|a| p.point(a)).collect();
    let subspace = Subspace::complex_span(p.dim(), &points);
    if subspace.dim() != 2 * d {
        return None;
    }
    let lattice = subgroup_lattice(&subspace, p);
    if lattice.rank() < d + 1 {
        return None;
    }
    let toroidal = toroidal_certificate_of(&p.sub_matrix(lattice.basis()), d);
    let closure = closure_of(&subspace, p);
    let is_subtorus = lattice.rank() == 2 * d;
    Some(SubtorusCandidate {
        source,
        generators,
        subspace,
        complex_dim: d,
        lattice,
        toroidal,
        closure,
        is_subtorus,
    })
}

/// Complex span of `C_Γ^m ∩ Γ` as a candidate, when it has dimension `d`.
fn maximal_complex_candidate(p: &PeriodLattice, d: usize) -> Option<SubtorusCandidate> {
    let cm = cm_of(p);
    let lat = subgroup_lattice(&cm, p);
    if lat.is_zero() {
        return None;
    }
    exact_candidate(p, lat.basis_vectors(), d, CandidateSource::MaximalComplex)
}

/// Canonical sort key of a candidate.
pub fn candidate_key(c: &SubtorusCandidate, p: &PeriodLattice) -> Vec<Vec<String>> {
    c.subspace.canonical_strings(p.symbols())
}

/// Complex subspaces of dimension `d` spanned by lattice vectors of height at
/// most `h` that meet `Γ` in rank at least `d + 1`, plus the span of
/// `C_Γ^m ∩ Γ`. Sorted by canonical subspace key, without duplicates.
pub fn find_subtori(p: &PeriodLattice, d: usize, h: u32) -> Result<Vec<SubtorusCandidate>> {
    if d == 0 || d >= p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subtorus dimension {d} must satisfy 1 <= d < {}",
            p.dim()
        )));
    }
    let vecs = primitive_vectors(p.rank(), h);
    let tensor = MinorTensor::build(p, d);
    let flagged = flagged_tuples(&tensor, &vecs);
    let mut found: Vec<SubtorusCandidate> = Vec::new();
    if let Some(c) = maximal_complex_candidate(p, d) {
        found.push(c);
    }
    for tuple in flagged {
        let gens: Vec<Vec<BigInt>> = tuple.iter().map(|&k| big_vec(&vecs[k])).collect();
        if found.iter().any(|c| gens.iter().all(|g| c.lattice.contains(g))) {
            continue;
        }
        if let Some(c) = exact_candidate(p, gens, d, CandidateSource::LatticeSpan) {
            found.push(c);
        }
    }
    let mut keyed: Vec<(Vec<Vec<String>>, SubtorusCandidate)> =
        found.into_iter().map(|c| (candidate_key(&c, p), c)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.source.cmp(&b.1.source)));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed.into_iter().map(|(_, c)| c).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimplicityVerdict {
    NoClosedToroidalSubgroupUpToH,
    Counterexample,
}

impl SimplicityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            SimplicityVerdict::NoClosedToroidalSubgroupUpToH => "no_closed_toroidal_subgroup_up_to_H",
            SimplicityVerdict::Counterexample => "counterexample",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplicityCertificate {
    pub height_bound: u32,
    pub dimension_range: Vec<usize>,
    pub verdict: SimplicityVerdict,
    pub counterexample: Option<SubtorusCandidate>,
    /// Every candidate examined, by dimension.
    pub candidates: Vec<SubtorusCandidate>,
}

/// Search every proper dimension for a closed toroidal subgroup at height `h`.
///
/// A negative verdict only covers subgroups generated at height `h`.
pub fn geometric_simplicity_certificate(p: &PeriodLattice, h: u32) -> Result<SimplicityCertificate> {
    let cert = toroidal_certificate(p);
    if !cert.toroidal {
        let sigma = cert.sigma.map(|s| format!("{s:?}")).unwrap_or_else(|| "span".into());
        return Err(Error::NotToroidal(sigma));
    }
    let dims: Vec<usize> = (1..p.dim()).collect();
    let mut candidates = Vec::new();
    let mut counterexample = None;
    for &d in &dims {
        for c in find_subtori(p, d, h)? {
            if counterexample.is_none() && c.is_closed_toroidal() {
                counterexample = Some(c.clone());
            }
            candidates.push(c);
        }
        if counterexample.is_some() {
            break;
        }
    }
    let verdict = if counterexample.is_some() {
        SimplicityVerdict::Counterexample
    } else {
        SimplicityVerdict::NoClosedToroidalSubgroupUpToH
    };
    Ok(SimplicityCertificate { height_bound: h, dimension_range: dims, verdict, counterexample, candidates })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomomorphismCheck {
    pub ok: bool,
    /// `C` with `Φ P_src = P_dst C`, when `ok`.
    pub rational_rep: Option<IntMatrix>,
    /// First source generator whose image is not a lattice point.
    pub failing_generator: Option<usize>,
}

/// Coordinates of `v` in the generators of `p`, if `v` is a lattice point.
pub fn lattice_coordinates(v: &[Scalar], p: &PeriodLattice) -> Option<Vec<BigInt>> {
    let real = p.realified();
    let target = realify_vector(v);
    let x = linalg::solve(&real, &target, p.rank())?;
    x.iter()
        .map(|c| c.constant_value().filter(BigRational::is_integer).map(|q| q.to_integer()))
        .collect()
}

pub fn verify_homomorphism(
    phi: &Mat<Scalar>,
    src: &PeriodLattice,
    dst: &PeriodLattice,
) -> Result<HomomorphismCheck> {
    if phi.len() != dst.dim() || phi.iter().any(|r| r.len() != src.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "map must be {} x {}",
            dst.dim(),
            src.dim()
        )));
    }
    let mut cols = Vec::with_capacity(src.rank());
    for j in 0..src.rank() {
        let image = linalg::mat_vec(phi, &src.generator(j));
        match lattice_coordinates(&image, dst) {
            Some(c) => cols.push(c),
            None => {
                return Ok(HomomorphismCheck {
                    ok: false,
                    rational_rep: None,
                    failing_generator: Some(j),
                })
            }
        }
    }
    let c = IntMatrix::from_columns(&cols, dst.rank());
    Ok(HomomorphismCheck { ok: true, rational_rep: Some(c), failing_generator: None })
}

/// Monomial basis of a line's proportionality conditions, for reporting.
pub fn line_condition_monomials(lambda: &[Scalar], p: &PeriodLattice) -> Vec<Monomial> {
    let n = p.dim();
    let m = p.matrix();
    let mut rows = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            rows.push(
                (0..p.rank())
                    .map(|j| &(&m[s][j] * &lambda[t]) - &(&m[t][j] * &lambda[s]))
                    .collect::<Vec<_>>(),
            );
        }
    }
    monomial_decompose(&rows).basis
}
