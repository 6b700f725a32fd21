//! Ample Riemann forms, complementary subvarieties, isogeny decomposition,
//! and endomorphism checks.
//!
//! A form is an `n x n` Hermitian matrix `H` with `H(z, w) = z^T H conj(w)`.
//! Its imaginary part `A(γ_i, γ_j) = Im H(γ_i, γ_j)` must be integral on the
//! lattice and `H` must be positive definite on `C_Γ^m`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::intlattice::{integer_kernel, quotient, IntLattice, IntMatrix, QuotientStructure};
use crate::linalg::{self, Mat};
use crate::scalar::decompose::linear_conditions;
use crate::scalar::sturm;
use crate::scalar::{RatFunc, Scalar, SymbolTable};
use crate::subvariety::{
    find_subtori, verify_homomorphism, SimplicityCertificate, SimplicityVerdict, SubtorusCandidate,
};
use crate::torgroup::{
    closure_of, max_complex_subspace, realify_vector, standard_splitting, subgroup_lattice,
    toroidal_certificate, toroidal_certificate_of, PeriodLattice, Subspace,
};

/// Rational values of the symbols used to certify signs, plus an optional
/// interval `[lo, hi]` for one symbol.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Witness {
    pub values: Vec<BigRational>,
    pub interval: Option<(usize, BigRational, BigRational)>,
}

impl Witness {
    /// Witness assigning every symbol of `symbols`, by name.
    pub fn from_assignments(symbols: &SymbolTable, pairs: &[(String, BigRational)]) -> Result<Self> {
        let mut values = Vec::with_capacity(symbols.len());
        for name in symbols.names() {
            let v = pairs
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::MissingWitnessValue(name.clone()))?;
            values.push(v);
        }
        if let Some((n, _)) = pairs.iter().find(|(n, _)| symbols.index_of(n).is_none()) {
            return Err(Error::InvalidSymbols(format!("witness assigns unknown symbol `{n}`")));
        }
        Ok(Witness { values, interval: None })
    }

    pub fn with_interval(mut self, var: usize, lo: BigRational, hi: BigRational) -> Self {
        self.interval = Some((var, lo, hi));
        self
    }
}

/// A Hermitian form on C^n together with the witness used for positivity.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannForm {
    pub h: Mat<Scalar>,
    pub witness: Witness,
}

impl RiemannForm {
    pub fn new(h: Mat<Scalar>, witness: Witness) -> Self {
        RiemannForm { h, witness }
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }
}

/// `z^T H conj(w)`.
pub fn hermitian_pairing(h: &Mat<Scalar>, z: &[Scalar], w: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (zi, row) in z.iter().zip(h) {
        if zi.is_zero() {
            continue;
        }
        for (hij, wj) in row.iter().zip(w) {
            if hij.is_zero() || wj.is_zero() {
                continue;
            }
            acc = &acc + &(&(zi * hij) * &wj.conj());
        }
    }
    acc
}

/// Gram matrix `G[k][l] = H(b_k, b_l)`.
pub fn gram_matrix(h: &Mat<Scalar>, basis: &[Vec<Scalar>]) -> Mat<Scalar> {
    basis.iter().map(|b| basis.iter().map(|c| hermitian_pairing(h, b, c)).collect()).collect()
}

/// One leading principal minor of the form restricted to `C_Γ^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorCheck {
    pub value: RatFunc,
    /// Value at the witness point; `None` when the minor is constant.
    pub at_witness: Option<BigRational>,
    /// Whether the sign was also certified on the whole witness interval.
    pub interval_certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmpleCertificate {
    /// `A(γ_i, γ_j) = Im H(γ_i, γ_j)`, alternating and integral.
    pub a: IntMatrix,
    /// Complex basis of `C_Γ^m` on which positivity was checked.
    pub cm_basis: Vec<Vec<Scalar>>,
    pub minors: Vec<MinorCheck>,
}

fn check_hermitian(h: &Mat<Scalar>, n: usize) -> Result<()> {
    if h.len() != n || h.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("form must be {n} x {n}")));
    }
    for i in 0..n {
        for j in i..n {
            if h[i][j] != h[j][i].conj() {
                return Err(Error::NotHermitian(i, j));
            }
        }
    }
    Ok(())
}

/// Integer matrix of `Im H` on pairs of generators.
pub fn pairing_matrix(form: &RiemannForm, p: &PeriodLattice) -> Result<IntMatrix> {
    check_hermitian(&form.h, p.dim())?;
    let k = p.rank();
    let gens: Vec<Vec<Scalar>> = (0..k).map(|j| p.generator(j)).collect();
    let mut a = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let im = hermitian_pairing(&form.h, &gens[i], &gens[j]).im;
            let value = im.constant_value().filter(BigRational::is_integer).ok_or_else(|| {
                Error::NonIntegralPairing { i, j, value: im.fmt_with(p.symbols().names()) }
            })?;
            let v = value.to_integer();
            a[(j, i)] = -v.clone();
            a[(i, j)] = v;
        }
    }
    Ok(a)
}

fn sign_certified_on(f: &RatFunc, var: usize, lo: &BigRational, hi: &BigRational) -> Option<i8> {
    let num = f.numer().to_dense(var)?;
    let den = f.denom().to_dense(var)?;
    let sn = sturm::constant_sign_on(&num, lo, hi)?;
    let sd = sturm::constant_sign_on(&den, lo, hi)?;
    Some(sn * sd)
}

/// Check that `form` is an ample Riemann form for `p`.
///
/// Positivity holds for the actual (unknown) symbol values only under the
/// assumption that they behave like the witness; single-symbol minors are
/// additionally certified on the witness interval when one is given.
pub fn check_ample(form: &RiemannForm, p: &PeriodLattice) -> Result<AmpleCertificate> {
    let a = pairing_matrix(form, p)?;
    let names = p.symbols().names();
    let cm_basis = crate::torgroup::cm_of(p).complex_basis()?;
    let gram = gram_matrix(&form.h, &cm_basis);
    let mut minors = Vec::with_capacity(gram.len());
    for k in 1..=gram.len() {
        let lead: Mat<Scalar> = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
        let det = linalg::det(&lead);
        if !det.im.is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "leading minor {k} of a Hermitian matrix is not real"
            )));
        }
        let value = det.re;
        let describe = || value.fmt_with(names);
        let (positive, at_witness) = match value.constant_value() {
            Some(c) => (c.is_positive(), None),
            None => {
                if form.witness.values.len() < names.len() {
                    let missing = names[form.witness.values.len()].clone();
                    return Err(Error::MissingWitnessValue(missing));
                }
                let v = value.evaluate(&form.witness.values)?;
                (v.is_positive(), Some(v))
            }
        };
        if !positive {
            return Err(Error::NotPositiveOnCm(format!("leading minor {k} = {} is not positive", describe())));
        }
        let mut interval_certified = at_witness.is_none();
        if let (Some(_), Some((var, lo, hi))) = (&at_witness, &form.witness.interval) {
            let single = value.numer().vars().iter().chain(value.denom().vars().iter()).all(|v| v == var);
            if single {
                match sign_certified_on(&value, *var, lo, hi) {
                    Some(1) => interval_certified = true,
                    _ => {
                        return Err(Error::NotPositiveOnCm(format!(
                            "leading minor {k} = {} changes sign or vanishes on [{lo}, {hi}]",
                            describe()
                        )))
                    }
                }
            }
        }
        minors.push(MinorCheck { value, at_witness, interval_certified });
    }
    Ok(AmpleCertificate { a, cm_basis, minors })
}

/// A subvariety `V_i / (V_i ∩ Γ)` written in its own coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    /// `V_i ∩ Γ` in the parent's Γ-coordinates.
    pub lattice: IntLattice,
    /// Ambient vectors (lattice points) forming a C-basis of `V_i`.
    pub basis: Vec<Vec<Scalar>>,
    /// Period matrix of `V_i ∩ Γ` in that basis.
    pub period: PeriodLattice,
    /// The restricted form `B^T H conj(B)`.
    pub form: RiemannForm,
}

/// Restrict `p` and `form` to the J-invariant subspace `v`.
pub fn restrict(p: &PeriodLattice, form: &RiemannForm, v: &Subspace) -> Result<Factor> {
    let d = v.complex_dim()?;
    let n = p.dim();
    let lattice = subgroup_lattice(v, p);
    let points: Vec<Vec<Scalar>> = lattice.basis_vectors().iter().map(|l| p.point(l)).collect();
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    for z in &points {
        if basis.len() == d {
            break;
        }
        let mut trial = basis.clone();
        trial.push(z.clone());
        if linalg::rank(&linalg::from_columns(&trial, n)) == trial.len() {
            basis = trial;
        }
    }
    if basis.len() < d {
        return Err(Error::NotClosedSubvariety(format!(
            "V ∩ Γ spans only {} of {d} complex dimensions",
            basis.len()
        )));
    }
    let b = linalg::from_columns(&basis, n);
    let mut cols = Vec::with_capacity(points.len());
    for z in &points {
        let c = linalg::solve(&b, z, d).ok_or_else(|| {
            Error::InternalInconsistency("lattice point of V lies outside its C-span".into())
        })?;
        cols.push(c);
    }
    let period = PeriodLattice::new(p.symbols().clone(), linalg::from_columns(&cols, d))?;
    let h = gram_matrix(&form.h, &basis);
    Ok(Factor { lattice, basis, period, form: RiemannForm::new(h, form.witness.clone()) })
}

/// `A_1` and the dimension data it must be consistent with.
#[derive(Clone, Debug, PartialEq)]
pub struct A1Data {
    pub a1: IntMatrix,
    pub k1: usize,
    pub n1: usize,
    pub m1: usize,
    pub r1: usize,
}

/// Rows `γ_1..γ_{k_1}` of `A` after changing generators to the columns of
/// `order`, whose first `k_1` columns must be a basis of `gamma1`.
pub fn build_a1(
    form: &RiemannForm,
    p: &PeriodLattice,
    order: &IntMatrix,
    gamma1: &IntLattice,
) -> Result<A1Data> {
    let big_n = p.rank();
    if order.rows() != big_n || order.cols() != big_n || !order.det().abs().is_one() {
        return Err(Error::OrderingInvalid("generator change is not unimodular".into()));
    }
    let k1 = gamma1.rank();
    let head = IntLattice::from_generators(&order.select_cols(0..k1));
    if head != *gamma1 {
        return Err(Error::OrderingInvalid(format!(
            "the first {k1} generators do not generate the sublattice"
        )));
    }
    let a = pairing_matrix(form, p)?;
    let a1 = order.transpose().mul(&a).mul(order).select_rows(0..k1);
    let pts: Vec<Vec<Scalar>> = gamma1.basis_vectors().iter().map(|l| p.point(l)).collect();
    let n1 = Subspace::complex_span(p.dim(), &pts).dim() / 2;
    let real: Vec<_> = pts.iter().map(|z| realify_vector(z)).collect();
    let m1 = max_complex_subspace(&Subspace::span(2 * p.dim(), &real)).dim() / 2;
    let r1 = a1.rank();
    if r1 % 2 != 0 || r1 < 2 * m1 || r1 > k1 {
        return Err(Error::InternalInconsistency(format!(
            "rank A_1 = {r1} is incompatible with k_1 = {k1}, m_1 = {m1}"
        )));
    }
    Ok(A1Data { a1, k1, n1, m1, r1 })
}

/// Kernel vectors of `A_1` spanning `Λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementSelection {
    /// Integer kernel `S_1` of `A_1`.
    pub kernel: IntLattice,
    /// Indices into the kernel basis of the selected vectors.
    pub selection: Vec<usize>,
    pub vectors: Vec<Vec<BigInt>>,
    /// Determinant of the bottom `ℓ x ℓ` block of the selected vectors.
    pub minor: BigInt,
    pub lambda: IntLattice,
}

/// Select `ℓ = N - k_1` kernel vectors of `A_1` whose bottom block is invertible.
///
/// The greedy pass over the kernel basis reaches the largest possible bottom
/// rank, so a short selection means no valid choice exists.
pub fn complement_lattice(a1: &IntMatrix, k1: usize) -> Result<ComplementSelection> {
    let big_n = a1.cols();
    if k1 > big_n {
        return Err(Error::OrderingInvalid(format!("k_1 = {k1} exceeds rank {big_n}")));
    }
    let ell = big_n - k1;
    let kernel = crate::intlattice::integer_kernel_int(a1);
    let mut selection = Vec::new();
    let mut vectors: Vec<Vec<BigInt>> = Vec::new();
    let mut bottoms: Vec<Vec<BigInt>> = Vec::new();
    for (idx, v) in kernel.basis_vectors().into_iter().enumerate() {
        if selection.len() == ell {
            break;
        }
        let mut trial = bottoms.clone();
        trial.push(v[k1..].to_vec());
        if IntMatrix::from_rows(&trial).rank() == trial.len() {
            bottoms = trial;
            selection.push(idx);
            vectors.push(v);
        }
    }
    if selection.len() < ell {
        return Err(Error::NoValidSelection(format!(
            "kernel of A_1 gives only {} of {ell} independent bottom blocks",
            selection.len()
        )));
    }
    let minor = if ell == 0 { BigInt::one() } else { IntMatrix::from_columns(&bottoms, ell).det() };
    let lambda = IntLattice::from_vectors(&vectors, big_n);
    Ok(ComplementSelection { kernel, selection, vectors, minor, lambda })
}

/// Which of the intermediate splittings hold for the deterministic complements.
///
/// Only dimension identities follow from the construction; the subspace
/// identities depend on how the complements are chosen and are reported.
#[derive(Clone, Debug, PartialEq)]
pub struct SplittingReport {
    /// `W_1 = (W_1 ∩ E) ⊕ (W_1 ∩ W)`.
    pub w1_splits: bool,
    /// `E = E_0 ⊕ (W_1 ∩ E) ⊕ J(W_1 ∩ E)`.
    pub e_splits: bool,
    /// `dim R_Λ = dim E_0 + dim (W_1 ∩ E) + dim F`.
    pub lambda_dims_match: bool,
    /// `E_0 ⊕ (W_1 ∩ E) ⊕ J(W_1 ∩ E) ⊕ F ⊕ JF` equals `V_2`.
    pub v2_agrees: bool,
}

/// One application of the complement construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionStep {
    pub gamma1: IntLattice,
    pub v1: Subspace,
    pub gamma2: IntLattice,
    pub v2: Subspace,
    pub lambda: IntLattice,
    pub isogeny_order: BigInt,
    pub quotient: QuotientStructure,
    /// Generator change putting a basis of `Γ_1` first.
    pub order: IntMatrix,
    pub a1: A1Data,
    pub selection: ComplementSelection,
    pub splittings: SplittingReport,
    pub x1: Factor,
    pub x2: Factor,
}

fn lattice_real_span(p: &PeriodLattice, l: &IntLattice) -> Subspace {
    let real: Vec<_> = l.basis_vectors().iter().map(|v| realify_vector(&p.point(v))).collect();
    Subspace::span(2 * p.dim(), &real)
}

fn inconsistent(what: &str) -> Error {
    Error::InternalInconsistency(what.to_string())
}

/// Build `X_2` with `X_1 × X_2 → X` an isogeny, for the closed quasi-abelian
/// subvariety `X_1 = V_1 / (V_1 ∩ Γ)`.
pub fn build_complement(p: &PeriodLattice, v1: &Subspace, form: &RiemannForm) -> Result<DecompositionStep> {
    let n = p.dim();
    let big_n = p.rank();
    if v1.ambient_dim() != 2 * n {
        return Err(Error::DimensionMismatch(format!("subspace must live in R^{}", 2 * n)));
    }
    if !v1.is_j_invariant() {
        return Err(Error::NotJInvariant);
    }
    check_ample(form, p)?;
    if !closure_of(v1, p).is_closed {
        return Err(Error::NotClosedSubvariety("V_1 + Γ is not closed".into()));
    }
    let x1 = restrict(p, form, v1)?;
    let cert = toroidal_certificate(&x1.period);
    if !cert.toroidal {
        return Err(Error::NotClosedSubvariety("V_1 ∩ Γ is not toroidal in V_1".into()));
    }
    check_ample(&x1.form, &x1.period).map_err(|e| Error::FormNotAmpleOnFactor(e.to_string()))?;
    let gamma1 = x1.lattice.clone();
    let order = gamma1.complete_to_basis().map_err(|e| Error::OrderingInvalid(e.to_string()))?;
    let a1 = build_a1(form, p, &order, &gamma1)?;
    let selection = complement_lattice(&a1.a1, a1.k1)?;
    let ell = big_n - a1.k1;
    let lambda = selection.lambda.image(&order)?;

    let split = standard_splitting(p)?;
    let real1 = lattice_real_span(p, &gamma1);
    let cm1 = max_complex_subspace(&real1);
    let w1 = cm1.complement_in(&real1);
    if !split.cm.contains_subspace(&cm1) || !split.real_span.contains_subspace(&real1) {
        return Err(inconsistent("C_{Γ_1}^{m_1} ⊕ W_1 is not inside R_Γ"));
    }
    let e = cm1.complex_complement_in(&split.cm);
    let w1e = w1.intersect(&e);
    let w1w = w1.intersect(&split.w);
    let f = w1w.complement_in(&split.w);
    let pair = w1e.sum(&w1e.j_image());
    let e0 = pair.complex_complement_in(&e);
    let real_lambda = lattice_real_span(p, &lambda);

    if real_lambda.dim() != ell
        || !real_lambda.intersect(&real1).is_zero()
        || real_lambda.dim() + real1.dim() != big_n
    {
        return Err(inconsistent("R_Γ is not R_Λ ⊕ R_{Γ_1}"));
    }
    let lambda_points: Vec<Vec<Scalar>> = lambda.basis_vectors().iter().map(|l| p.point(l)).collect();
    let v2 = Subspace::complex_span(n, &lambda_points);
    if v2.dim() != 2 * (n - a1.n1) || !v1.intersect(&v2).is_zero() || v1.dim() + v2.dim() != 2 * n {
        return Err(inconsistent("V_1 ⊕ V_2 is not V"));
    }
    let chosen_v2 = e0.sum(&pair).sum(&f).sum(&f.j_image());
    let splittings = SplittingReport {
        w1_splits: w1e.dim() + w1w.dim() == w1.dim(),
        e_splits: pair.dim() == 2 * w1e.dim() && e0.dim() + pair.dim() == e.dim(),
        lambda_dims_match: e0.dim() + w1e.dim() + f.dim() == ell,
        v2_agrees: chosen_v2 == v2,
    };

    let gamma2 = subgroup_lattice(&v2, p);
    if gamma2.rank() != ell {
        return Err(inconsistent("rank Γ_2 differs from rank Λ"));
    }
    if lattice_real_span(p, &gamma2) != real_lambda {
        return Err(inconsistent("R_Λ differs from R_{Γ_2}"));
    }
    let quotient = quotient(&IntLattice::full(big_n), &gamma1.sum(&gamma2)?)?;
    let isogeny_order = quotient.order().ok_or_else(|| inconsistent("Γ / (Γ_1 + Γ_2) is infinite"))?;
    if !closure_of(&v2, p).is_closed {
        return Err(inconsistent("V_2 + Γ is not closed"));
    }
    let x2 = restrict(p, form, &v2)?;
    check_ample(&x2.form, &x2.period).map_err(|e| Error::FormNotAmpleOnFactor(e.to_string()))?;
    Ok(DecompositionStep {
        gamma1,
        v1: v1.clone(),
        gamma2,
        v2,
        lambda,
        isogeny_order,
        quotient,
        order,
        a1,
        selection,
        splittings,
        x1,
        x2,
    })
}

/// A factor of the decomposition, placed back into the original `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecomposedFactor {
    pub dim: usize,
    pub period: PeriodLattice,
    pub form: RiemannForm,
    /// Columns spanning the factor's subspace in the original coordinates.
    pub embedding: Mat<Scalar>,
    /// The factor's lattice in the original Γ-coordinates.
    pub lattice: IntLattice,
    pub toroidal: bool,
    /// Bounded search for closed toroidal subgroups of the factor.
    pub certificate: SimplicityCertificate,
}

/// A split performed while decomposing; `path` locates the factor that was split
/// (`""` for `X`, then `1`/`2` per level).
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub path: String,
    pub step: DecompositionStep,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub height_bound: u32,
    pub factors: Vec<DecomposedFactor>,
    pub steps: Vec<StepRecord>,
    pub total_order: BigInt,
}

/// Canonical ordering key of a factor: dimension, then period matrix text.
pub fn factor_key(f: &DecomposedFactor) -> (usize, Vec<Vec<String>>) {
    let names = f.period.symbols().names();
    let text = f.period.matrix().iter().map(|r| r.iter().map(|x| x.fmt_with(names)).collect()).collect();
    (f.dim, text)
}

struct Placement {
    path: String,
    embedding: Mat<Scalar>,
    lattice: IntMatrix,
}

fn compose(parent: &Placement, child: &Factor, tag: char) -> Placement {
    let b = linalg::from_columns(&child.basis, parent.embedding[0].len());
    let embedding = linalg::mat_mul(&parent.embedding, &b);
    Placement {
        path: format!("{}{tag}", parent.path),
        embedding,
        lattice: parent.lattice.mul(child.lattice.basis()),
    }
}

fn leaf_certificate(p: &PeriodLattice, h: u32, candidates: Vec<SubtorusCandidate>) -> SimplicityCertificate {
    let counterexample = candidates.iter().find(|c| c.is_closed_toroidal()).cloned();
    let verdict = if counterexample.is_some() {
        SimplicityVerdict::Counterexample
    } else {
        SimplicityVerdict::NoClosedToroidalSubgroupUpToH
    };
    SimplicityCertificate {
        height_bound: h,
        dimension_range: (1..p.dim()).collect(),
        verdict,
        counterexample,
        candidates,
    }
}

type Pieces = (Vec<DecomposedFactor>, Vec<StepRecord>);

fn decompose_rec(p: &PeriodLattice, form: &RiemannForm, h: u32, at: Placement) -> Result<Pieces> {
    let mut examined = Vec::new();
    for d in 1..p.dim() {
        for c in find_subtori(p, d, h)? {
            if c.is_closed_toroidal() {
                match build_complement(p, &c.subspace, form) {
                    Ok(step) => {
                        let left = compose(&at, &step.x1, '1');
                        let right = compose(&at, &step.x2, '2');
                        let (a, b) = rayon::join(
                            || decompose_rec(&step.x1.period, &step.x1.form, h, left),
                            || decompose_rec(&step.x2.period, &step.x2.form, h, right),
                        );
                        let (mut fa, mut sa) = a?;
                        let (fb, sb) = b?;
                        fa.extend(fb);
                        sa.extend(sb);
                        sa.push(StepRecord { path: at.path.clone(), step });
                        return Ok((fa, sa));
                    }
                    Err(e) if e.is_internal() => return Err(e),
                    Err(_) => {}
                }
            }
            examined.push(c);
        }
    }
    let factor = DecomposedFactor {
        dim: p.dim(),
        period: p.clone(),
        form: form.clone(),
        embedding: at.embedding,
        lattice: IntLattice::from_generators(&at.lattice),
        toroidal: toroidal_certificate(p).toroidal,
        certificate: leaf_certificate(p, h, examined),
    };
    Ok((vec![factor], Vec::new()))
}

/// Split `X` recursively along closed toroidal subgroups found at height `h`.
///
/// Factors that yield no split are only known to have no closed toroidal
/// subgroup generated at height `h`.
pub fn decompose(p: &PeriodLattice, form: &RiemannForm, h: u32) -> Result<Decomposition> {
    check_ample(form, p)?;
    let n = p.dim();
    let top = Placement {
        path: String::new(),
        embedding: linalg::identity(n),
        lattice: IntMatrix::identity(p.rank()),
    };
    let (mut factors, mut steps) = decompose_rec(p, form, h, top)?;
    factors.sort_by_cached_key(factor_key);
    steps.sort_by(|a, b| a.path.cmp(&b.path));
    let total_order = steps.iter().fold(BigInt::one(), |acc, s| acc * &s.step.isogeny_order);
    Ok(Decomposition { height_bound: h, factors, steps, total_order })
}

/// Indices of `n` columns of `P` independent over K, chosen left to right.
fn independent_columns(p: &PeriodLattice) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for j in 0..p.rank() {
        let mut trial = chosen.clone();
        trial.push(j);
        let cols: Vec<Vec<Scalar>> = trial.iter().map(|&k| p.generator(k)).collect();
        if linalg::rank(&linalg::from_columns(&cols, p.dim())) == trial.len() {
            chosen = trial;
        }
        if chosen.len() == p.dim() {
            break;
        }
    }
    chosen
}

/// The analytic representation `Φ` with `Φ P = P C`, if `C` has one.
pub fn endo_from_rational(c: &IntMatrix, p: &PeriodLattice) -> Result<Mat<Scalar>> {
    let big_n = p.rank();
    if c.rows() != big_n || c.cols() != big_n {
        return Err(Error::DimensionMismatch(format!("rational representation must be {big_n} x {big_n}")));
    }
    let n = p.dim();
    let j = independent_columns(p);
    let pc = p.sub_matrix(c);
    let pj: Mat<Scalar> = p.matrix().iter().map(|r| j.iter().map(|&k| r[k].clone()).collect()).collect();
    let pcj: Mat<Scalar> = pc.iter().map(|r| j.iter().map(|&k| r[k].clone()).collect()).collect();
    let inv = linalg::inverse(&pj).ok_or_else(|| inconsistent("selected columns are singular"))?;
    let phi = linalg::mat_mul(&pcj, &inv);
    let lhs = linalg::mat_mul(&phi, p.matrix());
    for col in 0..big_n {
        if (0..n).any(|i| lhs[i][col] != pc[i][col]) {
            return Err(Error::AnalyticInconsistent(format!(
                "no linear map sends the generators to P C: column {col} disagrees"
            )));
        }
    }
    Ok(phi)
}

/// `{C : Φ P = P C for some Φ}` as a lattice in Z^{N^2}, `C` flattened by rows.
pub fn endomorphism_lattice(p: &PeriodLattice) -> IntLattice {
    let big_n = p.rank();
    let n = p.dim();
    let j = independent_columns(p);
    let pj: Mat<Scalar> = p.matrix().iter().map(|r| j.iter().map(|&k| r[k].clone()).collect()).collect();
    let inv = linalg::inverse(&pj).expect("independent columns");
    let q = linalg::mat_mul(&inv, p.matrix());
    let pm = p.matrix();
    let mut rows = Vec::new();
    for col in (0..big_n).filter(|c| !j.contains(c)) {
        for prow in pm.iter().take(n) {
            let mut row = vec![Scalar::zero(); big_n * big_n];
            for (a, pa) in prow.iter().enumerate() {
                if pa.is_zero() {
                    continue;
                }
                row[a * big_n + col] = &row[a * big_n + col] + pa;
                for (t, &jt) in j.iter().enumerate() {
                    let coeff = pa * &q[t][col];
                    row[a * big_n + jt] = &row[a * big_n + jt] - &coeff;
                }
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return IntLattice::full(big_n * big_n);
    }
    integer_kernel(&linear_conditions(&rows), big_n * big_n)
}

const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Every rational representation with entries bounded by `bound` in absolute value.
pub fn bounded_endomorphisms(p: &PeriodLattice, bound: u32) -> Result<Vec<IntMatrix>> {
    let big_n = p.rank();
    let lat = endomorphism_lattice(p);
    let r = lat.rank();
    let width = 2 * u64::from(bound) + 1;
    if width.checked_pow(r as u32).is_none_or(|c| c > ENUMERATION_LIMIT) {
        return Err(Error::Overflow);
    }
    let basis = lat.basis();
    let pivots: Vec<usize> = (0..r)
        .map(|t| (0..basis.rows()).find(|&i| !basis[(i, t)].is_zero()).expect("nonzero column"))
        .collect();
    let b = BigInt::from(bound);
    let mut out = Vec::new();
    let mut digits = vec![-(bound as i64); r];
    'outer: loop {
        let mut x: Vec<BigInt> = Vec::with_capacity(r);
        let mut ok = true;
        for t in 0..r {
            let mut rest = BigInt::from(digits[t]);
            for (s, xs) in x.iter().enumerate() {
                rest -= &basis[(pivots[t], s)] * xs;
            }
            let (quo, rem) = rest.div_rem(&basis[(pivots[t], t)]);
            if !rem.is_zero() {
                ok = false;
                break;
            }
            x.push(quo);
        }
        if ok {
            let flat = basis.mul_vec(&x);
            if flat.iter().all(|v| v.abs() <= b) {
                let rows: Vec<Vec<BigInt>> = flat.chunks(big_n).map(<[BigInt]>::to_vec).collect();
                out.push(IntMatrix::from_rows_with_cols(&rows, big_n));
            }
        }
        for d in digits.iter_mut() {
            if *d < bound as i64 {
                *d += 1;
                continue 'outer;
            }
            *d = -(bound as i64);
        }
        break;
    }
    out.sort_by_key(|m| m.to_strings());
    Ok(out)
}

/// A subgroup `U / (U ∩ Γ)` with its closedness and toroidality.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupCheck {
    pub subspace: Subspace,
    pub lattice: IntLattice,
    pub closed: bool,
    pub toroidal: bool,
}

fn subgroup_check(v: &Subspace, p: &PeriodLattice) -> Result<SubgroupCheck> {
    let d = v.complex_dim()?;
    let lattice = subgroup_lattice(v, p);
    let closed = closure_of(v, p).is_closed;
    let toroidal = d > 0 && toroidal_certificate_of(&p.sub_matrix(lattice.basis()), d).toroidal;
    Ok(SubgroupCheck { subspace: v.clone(), lattice, closed, toroidal })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectivityReport {
    pub injective: bool,
    pub rational_rep: IntMatrix,
    /// Kernel `K` of `Φ`.
    pub kernel: Subspace,
    pub kernel_lattice: IntLattice,
    /// `Φ(Γ)` in Γ-coordinates.
    pub image_lattice: IntLattice,
    /// `W = Φ(C^n)`.
    pub image: Subspace,
    /// `rank(K ∩ Γ + Φ(Γ)) = rank Γ`.
    pub rank_sum_full: bool,
    /// `(K ∩ Γ) ∩ Φ(Γ) = 0`.
    pub intersection_trivial: bool,
    /// `R_Γ = (K ∩ R_Γ) ⊕ (W ∩ R_Γ)`.
    pub real_span_splits: bool,
    /// `K / (K ∩ Γ)` when `K ≠ 0`: a closed toroidal subgroup on split inputs.
    pub kernel_subgroup: Option<SubgroupCheck>,
    pub image_subgroup: Option<SubgroupCheck>,
}

/// Kernel of an endomorphism and, when it is nonzero, the subgroups it exhibits.
pub fn endo_injectivity(phi: &Mat<Scalar>, p: &PeriodLattice) -> Result<InjectivityReport> {
    let check = verify_homomorphism(phi, p, p)?;
    let c = match (check.ok, check.rational_rep) {
        (true, Some(c)) => c,
        _ => {
            let j = check.failing_generator.unwrap_or(0);
            return Err(Error::NotEndomorphism(format!("image of generator {j} is not a lattice point")));
        }
    };
    let n = p.dim();
    let big_n = p.rank();
    let ker_vecs = linalg::kernel(phi, n);
    let kernel = Subspace::complex_span(n, &ker_vecs);
    let image_cols = linalg::columns(phi);
    let image = Subspace::complex_span(n, &image_cols);
    let kernel_lattice = subgroup_lattice(&kernel, p);
    let image_lattice = IntLattice::from_generators(&c);
    let rank_sum_full = kernel_lattice.sum(&image_lattice)?.rank() == big_n;
    let intersection_trivial = kernel_lattice.intersect(&image_lattice)?.is_zero();
    let span = p.real_span();
    let kr = kernel.intersect(&span);
    let wr = image.intersect(&span);
    let real_span_splits = kr.intersect(&wr).is_zero() && kr.dim() + wr.dim() == span.dim();
    let injective = kernel.is_zero();
    let (kernel_subgroup, image_subgroup) = if injective {
        (None, None)
    } else {
        (Some(subgroup_check(&kernel, p)?), Some(subgroup_check(&image, p)?))
    };
    Ok(InjectivityReport {
        injective,
        rational_rep: c,
        kernel,
        kernel_lattice,
        image_lattice,
        image,
        rank_sum_full,
        intersection_trivial,
        real_span_splits,
        kernel_subgroup,
        image_subgroup,
    })
}

/// `(C_num, d)` with `C C_num = d I` and `d` minimal, so `C^{-1} = C_num / d` in End_Q.
pub fn endq_inverse(c: &IntMatrix, p: &PeriodLattice) -> Result<(IntMatrix, BigInt)> {
    endo_from_rational(c, p)?;
    if c.det().is_zero() {
        return Err(Error::NotInvertible);
    }
    let inv = linalg::inverse(&c.to_rational()).ok_or(Error::NotInvertible)?;
    let d = inv.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scale = BigRational::from_integer(d.clone());
    let rows: Vec<Vec<BigInt>> =
        inv.iter().map(|r| r.iter().map(|x| (x * &scale).to_integer()).collect()).collect();
    let num = IntMatrix::from_rows_with_cols(&rows, c.cols());
    let mut expect = IntMatrix::identity(c.rows());
    for i in 0..c.rows() {
        expect[(i, i)] = d.clone();
    }
    if c.mul(&num) != expect {
        return Err(inconsistent("C C_num differs from d I"));
    }
    Ok((num, d))
}
