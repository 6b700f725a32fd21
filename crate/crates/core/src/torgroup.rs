//! Period lattices, real spans over Q(r), toroidality, and closures of `E + Γ`.
//!
//! A vector `z` in C^n is realified as `(re z_1, ..., re z_n, im z_1, ..., im z_n)`
//! and the complex structure is `J(x, y) = (-y, x)`. Linear algebra runs over the
//! real field F = Q(r1, ..., rs); since the symbols are algebraically independent
//! reals, F-ranks agree with R-ranks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intlattice::{integer_kernel, IntLattice, IntMatrix};
use crate::linalg::{self, Mat};
use crate::scalar::decompose::{linear_conditions, real_linear_conditions, RatMatrix};
use crate::scalar::{RatFunc, Scalar, SymbolTable};

/// Realified coordinates of a complex vector.
pub fn realify_vector(z: &[Scalar]) -> Vec<RatFunc> {
    z.iter().map(|x| x.re.clone()).chain(z.iter().map(|x| x.im.clone())).collect()
}

/// Complex vector from realified coordinates.
pub fn complexify_vector(v: &[RatFunc]) -> Vec<Scalar> {
    let n = v.len() / 2;
    (0..n).map(|k| Scalar::new(v[k].clone(), v[n + k].clone())).collect()
}

/// The complex structure `J(x, y) = (-y, x)`.
pub fn j_map(v: &[RatFunc]) -> Vec<RatFunc> {
    let n = v.len() / 2;
    v[n..].iter().map(|y| -y).chain(v[..n].iter().cloned()).collect()
}

/// `P a` for an integer coefficient vector.
pub fn combine(m: &Mat<Scalar>, a: &[BigInt]) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            row.iter().zip(a).fold(Scalar::zero(), |acc, (x, c)| {
                if c.is_zero() || x.is_zero() {
                    acc
                } else {
                    &acc + &x.scale(&BigRational::from_integer(c.clone()))
                }
            })
        })
        .collect()
}

/// Realified `2n x k` matrix of a complex `n x k` matrix.
pub fn realify_matrix(m: &Mat<Scalar>) -> Mat<RatFunc> {
    let re = m.iter().map(|r| r.iter().map(|x| x.re.clone()).collect());
    let im = m.iter().map(|r| r.iter().map(|x| x.im.clone()).collect());
    re.chain(im).collect()
}

/// The discrete subgroup of C^n generated by the columns of an `n x N` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodLattice {
    symbols: SymbolTable,
    matrix: Mat<Scalar>,
    n: usize,
    rank: usize,
}

impl PeriodLattice {
    /// Validate `matrix` (n rows, N columns) as a period matrix.
    ///
    /// The columns must be linearly independent over R (so the group is
    /// discrete of rank N) and must span C^n over C.
    pub fn new(symbols: SymbolTable, matrix: Mat<Scalar>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("period matrix has no rows".into()));
        }
        let rank = linalg::cols_of(&matrix);
        if matrix.iter().any(|r| r.len() != rank) {
            return Err(Error::DimensionMismatch("ragged period matrix".into()));
        }
        if rank < n {
            return Err(Error::DimensionMismatch(format!(
                "{n} x {rank} period matrix has fewer generators than rows"
            )));
        }
        let relations = integer_kernel(&linear_conditions(&matrix), rank);
        if let Some(rel) = relations.basis_vectors().first() {
            let text: Vec<String> = rel.iter().map(ToString::to_string).collect();
            return Err(Error::RankDeficient(format!(
                "integer relation ({}) among the generators",
                text.join(", ")
            )));
        }
        if linalg::rank(&realify_matrix(&matrix)) < rank {
            return Err(Error::RankDeficient(
                "generators are dependent over R, so the group is not discrete".into(),
            ));
        }
        if linalg::rank(&matrix) < n {
            return Err(Error::RankDeficient("generators do not span C^n over C".into()));
        }
        Ok(PeriodLattice { symbols, matrix, n, rank })
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Rank `n + m` of the lattice.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `m = rank - n`.
    pub fn m(&self) -> usize {
        self.rank - self.n
    }

    pub fn matrix(&self) -> &Mat<Scalar> {
        &self.matrix
    }

    pub fn generator(&self, j: usize) -> Vec<Scalar> {
        self.matrix.iter().map(|r| r[j].clone()).collect()
    }

    /// `P a` for `a` in Z^N.
    pub fn point(&self, a: &[BigInt]) -> Vec<Scalar> {
        combine(&self.matrix, a)
    }

    /// Period matrix `P B` of the sublattice spanned by the columns of `b`.
    pub fn sub_matrix(&self, b: &IntMatrix) -> Mat<Scalar> {
        let cols: Vec<Vec<Scalar>> = b.columns().iter().map(|c| self.point(c)).collect();
        linalg::from_columns(&cols, self.n)
    }

    pub fn realified(&self) -> Mat<RatFunc> {
        realify_matrix(&self.matrix)
    }

    pub fn real_span(&self) -> Subspace {
        real_span(self)
    }

    /// Same lattice with generators `P U` for a unimodular `U`.
    pub fn change_basis(&self, u: &IntMatrix) -> Result<PeriodLattice> {
        if u.rows() != self.rank || u.cols() != self.rank || !u.det().magnitude().is_one() {
            return Err(Error::DimensionMismatch("basis change must be unimodular".into()));
        }
        Ok(PeriodLattice {
            symbols: self.symbols.clone(),
            matrix: self.sub_matrix(u),
            n: self.n,
            rank: self.rank,
        })
    }
}

pub fn realify(p: &PeriodLattice) -> Mat<RatFunc> {
    p.realified()
}

/// A subspace of F^{2n} stored by its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Mat<RatFunc>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} in {}; {:?})", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vec<RatFunc>]) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length mismatch");
        let (basis, _) = linalg::rref(&vectors.to_vec());
        Subspace { ambient, basis }
    }

    /// Real span of complex vectors and their `i`-multiples.
    pub fn complex_span(n: usize, vectors: &[Vec<Scalar>]) -> Self {
        let mut real = Vec::with_capacity(2 * vectors.len());
        for z in vectors {
            let v = realify_vector(z);
            real.push(j_map(&v));
            real.push(v);
        }
        Self::span(2 * n, &real)
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: linalg::identity(ambient) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Mat<RatFunc> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("rref row is nonzero"))
            .collect()
    }

    pub fn contains(&self, v: &[RatFunc]) -> bool {
        let mut rest = v.to_vec();
        for (row, p) in self.basis.iter().zip(self.pivots()) {
            if rest[p].is_zero() {
                continue;
            }
            let f = rest[p].clone();
            for (x, y) in rest.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        rest.iter().all(RatFunc::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Self::span(self.ambient, &vs)
    }

    /// Linear functionals (as rows) vanishing on the subspace; a basis of the annihilator.
    pub fn annihilator(&self) -> Mat<RatFunc> {
        if self.basis.is_empty() {
            return linalg::identity(self.ambient);
        }
        linalg::kernel(&self.basis, self.ambient)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let mut eqs = self.annihilator();
        eqs.extend(other.annihilator());
        if eqs.is_empty() {
            return Subspace::full(self.ambient);
        }
        let vs = linalg::kernel(&eqs, self.ambient);
        Self::span(self.ambient, &vs)
    }

    pub fn j_image(&self) -> Subspace {
        let vs: Vec<Vec<RatFunc>> = self.basis.iter().map(|v| j_map(v)).collect();
        Self::span(self.ambient, &vs)
    }

    pub fn is_j_invariant(&self) -> bool {
        self.basis.iter().all(|v| self.contains(&j_map(v)))
    }

    /// Complex dimension of a J-invariant subspace.
    pub fn complex_dim(&self) -> Result<usize> {
        if !self.is_j_invariant() {
            return Err(Error::NotJInvariant);
        }
        Ok(self.dim() / 2)
    }

    /// A basis over C of a J-invariant subspace, chosen greedily from the echelon rows.
    pub fn complex_basis(&self) -> Result<Vec<Vec<Scalar>>> {
        if !self.is_j_invariant() {
            return Err(Error::NotJInvariant);
        }
        let mut chosen: Vec<Vec<RatFunc>> = Vec::new();
        let mut span = Subspace::zero(self.ambient);
        for v in &self.basis {
            if span.contains(v) {
                continue;
            }
            chosen.push(v.clone());
            span = span.sum(&Subspace::span(self.ambient, &[v.clone(), j_map(v)]));
        }
        Ok(chosen.iter().map(|v| complexify_vector(v)).collect())
    }

    /// Real complement of `self` inside `outer` by greedy leftmost selection
    /// from `outer`'s echelon basis.
    pub fn complement_in(&self, outer: &Subspace) -> Subspace {
        let mut span = self.clone();
        let mut chosen = Vec::new();
        for v in &outer.basis {
            if !span.contains(v) {
                chosen.push(v.clone());
                span = span.sum(&Subspace::span(self.ambient, &[v.clone()]));
            }
        }
        Self::span(self.ambient, &chosen)
    }

    /// J-invariant complement of a J-invariant `self` inside a J-invariant `outer`.
    pub fn complex_complement_in(&self, outer: &Subspace) -> Subspace {
        let mut span = self.clone();
        let mut chosen = Vec::new();
        for v in &outer.basis {
            if !span.contains(v) {
                let pair = [v.clone(), j_map(v)];
                chosen.extend(pair.iter().cloned());
                span = span.sum(&Subspace::span(self.ambient, &pair));
            }
        }
        Self::span(self.ambient, &chosen)
    }

    /// Basis rows formatted with the symbol names; a canonical key.
    pub fn canonical_strings(&self, symbols: &SymbolTable) -> Vec<Vec<String>> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| x.fmt_with(symbols.names())).collect())
            .collect()
    }
}

/// F-span of the realified generators.
pub fn real_span(p: &PeriodLattice) -> Subspace {
    let cols = linalg::columns(&p.realified());
    Subspace::span(2 * p.dim(), &cols)
}

/// `s ∩ J(s)`.
pub fn max_complex_subspace(s: &Subspace) -> Subspace {
    s.intersect(&s.j_image())
}

/// Maximal complex subspace of the real span of the generators.
pub fn cm_of(p: &PeriodLattice) -> Subspace {
    max_complex_subspace(&real_span(p))
}

/// Evidence for or against toroidality of the group generated by a matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToroidalCertificate {
    pub toroidal: bool,
    /// Rational conditions whose integer kernel is the character lattice.
    #[serde(serialize_with = "ser_rat_matrix")]
    pub conditions: RatMatrix,
    /// Integer vectors `σ` in the C-row space of the period matrix.
    pub character_lattice: IntLattice,
    /// A nonzero `σ`, when one exists.
    #[serde(serialize_with = "ser_opt_ints")]
    pub sigma: Option<Vec<BigInt>>,
    /// True when the generators do not span the ambient space over C.
    pub span_deficient: bool,
}

pub(crate) fn ser_rat_matrix<S: serde::Serializer>(
    m: &RatMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Vec<String>> =
        m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    strs.serialize(s)
}

pub(crate) fn ser_opt_ints<S: serde::Serializer>(
    v: &Option<Vec<BigInt>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>()).serialize(s)
}

/// Character criterion for a group generated by the columns of `m` (`dim x k`)
/// inside C^dim: toroidal iff the generators span C^dim and no nonzero integer
/// vector lies in the C-row space of `m`.
pub fn toroidal_certificate_of(m: &Mat<Scalar>, dim: usize) -> ToroidalCertificate {
    let k = linalg::cols_of(m);
    let span_deficient = linalg::rank(m) < dim;
    let kernel = if m.is_empty() { linalg::identity(k) } else { linalg::kernel(m, k) };
    let conditions = linear_conditions(&kernel);
    let character_lattice = if kernel.is_empty() {
        IntLattice::full(k)
    } else {
        integer_kernel(&conditions, k)
    };
    let sigma = character_lattice.basis_vectors().into_iter().next();
    ToroidalCertificate {
        toroidal: sigma.is_none() && !span_deficient,
        conditions,
        character_lattice,
        sigma,
        span_deficient,
    }
}

pub fn toroidal_certificate(p: &PeriodLattice) -> ToroidalCertificate {
    toroidal_certificate_of(p.matrix(), p.dim())
}

pub fn is_toroidal(p: &PeriodLattice) -> bool {
    toroidal_certificate(p).toroidal
}

/// Closure of `E + G` for `G` generated by realified columns.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureResult {
    /// Identity component of the closure.
    pub subspace: Subspace,
    /// Complement in Z^N of the generators lying in the identity component.
    pub discrete: IntLattice,
    /// Integer vectors `σ` vanishing on the identity component's preimage.
    pub characters: IntLattice,
    pub is_closed: bool,
}

/// Closure of `E + Σ Z g_j` for realified generators `gens` (`2n x k`).
///
/// The group need not be discrete or independent. With `Y` the annihilator of
/// `E` and `M = Y gens`, the characters are `Σ = Z^k ∩ rowspace(M)`; the identity
/// component of the closure is `E + gens · (Σ^⊥ ⊗ R)`.
pub fn closure_of_generators(e: &Subspace, gens: &Mat<RatFunc>) -> ClosureResult {
    let ambient = e.ambient_dim();
    let k = linalg::cols_of(gens);
    let y = e.annihilator();
    let projected = if y.is_empty() { Vec::new() } else { linalg::mat_mul(&y, gens) };
    let characters = if projected.iter().all(|r| r.iter().all(RatFunc::is_zero)) {
        IntLattice::full(k)
    } else {
        let kernel = linalg::kernel(&projected, k);
        if kernel.is_empty() {
            IntLattice::full(k)
        } else {
            integer_kernel(&real_linear_conditions(&kernel), k)
        }
    };
    let sigma_rows: Mat<BigRational> = characters
        .basis_vectors()
        .iter()
        .map(|v| v.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let free: Vec<Vec<BigRational>> =
        if sigma_rows.is_empty() { linalg::identity(k) } else { linalg::kernel(&sigma_rows, k) };
    let mut vs: Vec<Vec<RatFunc>> = e.basis().clone();
    for a in &free {
        let v: Vec<RatFunc> = gens
            .iter()
            .map(|row| {
                row.iter().zip(a).fold(RatFunc::zero(), |acc, (x, c)| {
                    if c.is_zero() {
                        acc
                    } else {
                        &acc + &x.scale(c)
                    }
                })
            })
            .collect();
        vs.push(v);
    }
    let subspace = Subspace::span(ambient, &vs);
    let is_closed = e.contains_subspace(&subspace);
    let inside = generator_lattice_in(&subspace, gens);
    let discrete = complement_lattice_of(&inside);
    ClosureResult { subspace, discrete, characters, is_closed }
}

pub fn closure_of(e: &Subspace, p: &PeriodLattice) -> ClosureResult {
    closure_of_generators(e, &p.realified())
}

/// `{a in Z^k : gens a ∈ E}`.
fn generator_lattice_in(e: &Subspace, gens: &Mat<RatFunc>) -> IntLattice {
    let k = linalg::cols_of(gens);
    let y = e.annihilator();
    if y.is_empty() {
        return IntLattice::full(k);
    }
    let rows = linalg::mat_mul(&y, gens);
    if rows.iter().all(|r| r.iter().all(RatFunc::is_zero)) {
        return IntLattice::full(k);
    }
    integer_kernel(&real_linear_conditions(&rows), k)
}

/// A lattice `D` with `L ⊕ D = Z^k` for a saturated `L`.
fn complement_lattice_of(l: &IntLattice) -> IntLattice {
    let k = l.ambient_rank();
    let u = l.complete_to_basis().expect("subgroup lattices are saturated");
    IntLattice::from_generators(&u.select_cols(l.rank()..k))
}

/// `{a ∈ Z^N : P a ∈ E}`, saturated by construction.
pub fn subgroup_lattice(e: &Subspace, p: &PeriodLattice) -> IntLattice {
    generator_lattice_in(e, &p.realified())
}

/// `R_Γ = C_Γ^m ⊕ W` and `V = C_Γ^m ⊕ W ⊕ J W`.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardSplitting {
    pub real_span: Subspace,
    pub cm: Subspace,
    pub w: Subspace,
}

pub fn standard_splitting(p: &PeriodLattice) -> Result<StandardSplitting> {
    let span = real_span(p);
    let cm = max_complex_subspace(&span);
    let w = cm.complement_in(&span);
    let total = cm.sum(&w).sum(&w.j_image());
    if cm.dim() != 2 * p.m() || w.dim() != p.dim() - p.m() || total.dim() != 2 * p.dim() {
        return Err(Error::DegenerateSpan(format!(
            "dim C_m = {}, dim W = {}, dim(C_m + W + JW) = {} for n = {}, m = {}",
            cm.dim(),
            w.dim(),
            total.dim(),
            p.dim(),
            p.m()
        )));
    }
    Ok(StandardSplitting { real_span: span, cm, w })
}
