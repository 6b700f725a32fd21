//! Exact computations with toroidal groups and quasi-abelian varieties.
//!
//! Inputs are period matrices with entries in Q(i)(r1, ..., rs), where the
//! symbols are formally real and algebraically independent.

pub mod error;
pub mod intlattice;
pub mod linalg;
pub mod riemann;
pub mod scalar;
pub mod subvariety;
pub mod torgroup;

pub use error::{Error, Result};
pub use riemann::{RiemannForm, Witness};
pub use intlattice::{IntLattice, IntMatrix, QuotientStructure};
pub use scalar::{Monomial, Poly, RatFunc, Scalar, SymbolTable};
pub use torgroup::{PeriodLattice, Subspace};
