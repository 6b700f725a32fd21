use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid symbol table: {0}")]
    InvalidSymbols(String),
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error("a denominator vanishes at the witness point ({0})")]
    PoleAtWitness(String),
    #[error("witness does not assign symbol `{0}`")]
    MissingWitnessValue(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sublattice is not contained in the lattice")]
    NotASublattice,
    #[error("lattice is not saturated in the ambient lattice")]
    NotSaturated,
    #[error("generators are not independent over R: {0}")]
    RankDeficient(String),
    #[error("degenerate span: {0}")]
    DegenerateSpan(String),
    #[error("line direction is zero")]
    ZeroDirection,
    #[error("period lattice is not toroidal (character {0})")]
    NotToroidal(String),
    #[error("form is not Hermitian at entry ({0}, {1})")]
    NotHermitian(usize, usize),
    #[error("imaginary part of the form is not integral on generators ({i}, {j}): {value}")]
    NonIntegralPairing { i: usize, j: usize, value: String },
    #[error("form is not positive definite on the maximal complex subspace: {0}")]
    NotPositiveOnCm(String),
    #[error("invalid generator ordering: {0}")]
    OrderingInvalid(String),
    #[error("no valid complement selection: {0}")]
    NoValidSelection(String),
    #[error("subgroup is not a closed quasi-abelian subvariety: {0}")]
    NotClosedSubvariety(String),
    #[error("subspace is not invariant under multiplication by i")]
    NotJInvariant,
    #[error("restricted form is not ample on the factor: {0}")]
    FormNotAmpleOnFactor(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("rational representation has no analytic representation: {0}")]
    AnalyticInconsistent(String),
    #[error("map is not an endomorphism: {0}")]
    NotEndomorphism(String),
    #[error("matrix is not invertible over Q")]
    NotInvertible,
    #[error("integer overflow in bounded search; use a smaller height")]
    Overflow,
}

impl Error {
    /// Errors that signal a failed proof obligation rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::InternalInconsistency(_) | Error::NoValidSelection(_) | Error::DegenerateSpan(_)
        )
    }
}
