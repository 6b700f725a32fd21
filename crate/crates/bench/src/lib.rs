//! Period lattices shared by the benchmarks.

use toroidal_core::scalar::expr::parse_scalar;
use toroidal_core::{PeriodLattice, SymbolTable};

/// Build a lattice from symbol names and rows of expressions.
pub fn lattice(names: &[&str], rows: &[&[&str]]) -> PeriodLattice {
    let t = SymbolTable::new(names.iter().copied()).expect("symbols");
    let m = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_scalar(s, &t).expect("expression")).collect())
        .collect();
    PeriodLattice::new(t, m).expect("period matrix")
}

/// Toroidal surface with no elliptic curves of small height.
pub fn quartic() -> PeriodLattice {
    lattice(&["r"], &[&["1", "0", "i*r^3", "r"], &["0", "1", "r", "i"]])
}

/// Three-dimensional toroidal group of rank five with a non-closed C^2 factor.
pub fn rank_five() -> PeriodLattice {
    lattice(
        &["r1", "r2"],
        &[&["0", "1", "0", "i*r1^3", "r1"], &["0", "0", "1", "r1", "i"], &["1", "0", "0", "0", "r2"]],
    )
}
