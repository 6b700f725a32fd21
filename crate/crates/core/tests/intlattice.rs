use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use toroidal_core::intlattice::{big_vec, hnf, integer_kernel, integer_kernel_int, quotient, snf, IntLattice, IntMatrix};
use toroidal_core::linalg;

fn ints(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn arb_matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, c), r).prop_map(|rows| IntMatrix::from_rows(&rows))
    })
}

fn arb_fixed(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-bound..=bound, cols), rows).prop_map(|r| IntMatrix::from_rows(&r))
}

/// Unimodular matrix built from elementary column operations.
fn arb_unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut u = IntMatrix::identity(n);
        for (i, j, k, neg) in ops {
            if i != j {
                let add = u.col(j).iter().map(|x| x * k).collect::<Vec<_>>();
                for (r, x) in add.into_iter().enumerate() {
                    u[(r, i)] = &u[(r, i)] + x;
                }
            } else if neg {
                for r in 0..n {
                    u[(r, i)] = -u[(r, i)].clone();
                }
            }
        }
        u
    })
}

/// Membership by solving over Q and checking integrality, independent of HNF.
fn solves_integrally(basis: &IntMatrix, v: &[BigInt]) -> bool {
    let rhs: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    match linalg::solve(&basis.to_rational(), &rhs, basis.cols()) {
        Some(x) => x.iter().all(|c| c.is_integer()),
        None => false,
    }
}

/// Reduction mod `m` of every combination `a*c1 + b*c2` with `0 <= a, b < m`.
fn residues_mod(cols: &[Vec<BigInt>], m: i64) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![vec![BigInt::zero(); cols[0].len()]];
    for c in cols {
        let mut next = Vec::new();
        for v in &stack {
            for a in 0..m {
                next.push(v.iter().zip(c).map(|(x, y)| x + y * a).collect::<Vec<_>>());
            }
        }
        stack = next;
    }
    for v in stack {
        out.insert(v.iter().map(|x| i64::try_from(x.mod_floor(&BigInt::from(m))).unwrap()).collect());
    }
    out
}

#[test]
fn hnf_generates_the_same_lattice_mod_50() {
    let m = ints(&[&[2, 4], &[0, 3]]);
    let h = hnf(&m);
    assert_eq!(residues_mod(&m.columns(), 50), residues_mod(&h.h.columns(), 50));
    assert_eq!(h.pivots, vec![0, 1]);
}

#[test]
fn snf_of_diagonal_matches_coset_count() {
    let s = snf(&ints(&[&[2, 0], &[0, 3]]));
    assert_eq!(s.cokernel.elementary_divisors, big_vec(&[1, 6]));
    // Z^2 / (2Z x 3Z): classes are determined by (x mod 2, y mod 3).
    let classes: BTreeSet<(i64, i64)> =
        (-10..10).flat_map(|x: i64| (-10..10).map(move |y: i64| (x.rem_euclid(2), y.rem_euclid(3)))).collect();
    assert_eq!(BigInt::from(classes.len()), s.cokernel.order().unwrap());
    let id = snf(&IntMatrix::identity(3));
    assert_eq!(id.cokernel.elementary_divisors, big_vec(&[1, 1, 1]));
}

#[test]
fn kernel_of_a1_matches_exhaustive_search() {
    let q = |n: i64| BigRational::from_integer(n.into());
    let a1 = vec![vec![q(0), q(-1), q(-1)], vec![q(1), q(0), q(0)]];
    let k = integer_kernel(&a1, 3);
    let mut found = Vec::new();
    for x in -3..=3i64 {
        for y in -3..=3i64 {
            for z in -3..=3i64 {
                if -y - z == 0 && x == 0 && (x, y, z) != (0, 0, 0) {
                    found.push(big_vec(&[x, y, z]));
                }
            }
        }
    }
    // Every solution is a multiple of the saturated generator.
    assert!(found.iter().all(|v| k.contains(v)));
    assert_eq!(k, IntLattice::from_vectors(&[big_vec(&[0, 1, -1])], 3));
}

#[test]
fn sum_then_intersect_with_diagonal() {
    let a = IntLattice::from_vectors(&[big_vec(&[2, 0])], 2);
    let b = IntLattice::from_vectors(&[big_vec(&[0, 3])], 2);
    let diag = IntLattice::from_vectors(&[big_vec(&[1, 1])], 2);
    let got = a.sum(&b).unwrap().intersect(&diag).unwrap();
    for k in -30..=30i64 {
        let in_sum = k % 2 == 0 && k % 3 == 0;
        assert_eq!(got.contains(&big_vec(&[k, k])), in_sum, "k = {k}");
    }
    assert_eq!(diag.intersect(&diag).unwrap(), diag);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hnf_is_canonical_and_unimodular(m in arb_matrix(4, 5, 6)) {
        let h = hnf(&m);
        let r = h.h.cols();
        let mu = m.mul(&h.u);
        prop_assert_eq!(mu.select_cols(0..r), h.h.clone());
        prop_assert!(mu.select_cols(r..m.cols()).is_zero());
        prop_assert!(h.u.det().abs().is_one());
        prop_assert_eq!(r, m.rank());
        for (j, &p) in h.pivots.iter().enumerate() {
            prop_assert!(h.h[(p, j)].is_positive());
            prop_assert!((0..p).all(|i| h.h[(i, j)].is_zero()));
            for k in 0..j {
                let x = &h.h[(p, k)];
                prop_assert!(!x.is_negative() && x < &h.h[(p, j)]);
            }
            if j > 0 {
                prop_assert!(h.pivots[j - 1] < p);
            }
        }
    }

    #[test]
    fn hnf_ignores_column_basis_changes(m in arb_matrix(3, 4, 5), seed in arb_unimodular(4)) {
        let n = m.cols();
        let u = seed.select_rows(0..n).select_cols(0..n);
        prop_assume!(u.det().abs().is_one());
        prop_assert_eq!(hnf(&m.mul(&u)).h, hnf(&m).h);
    }

    #[test]
    fn lattice_membership_agrees_with_rational_solve(m in arb_matrix(3, 3, 5), coeffs in prop::collection::vec(-4i64..=4, 3), noise in prop::collection::vec(-4i64..=4, 3)) {
        let l = IntLattice::from_generators(&m);
        let mut coeffs = coeffs;
        coeffs.truncate(m.cols());
        let inside = m.mul_vec(&big_vec(&coeffs));
        prop_assert!(l.contains(&inside));
        let v: Vec<BigInt> = inside.iter().zip(big_vec(&noise[..m.rows()])).map(|(a, b)| a + b).collect();
        prop_assert_eq!(l.contains(&v), solves_integrally(l.basis(), &v));
    }

    #[test]
    fn snf_divisors_survive_unimodular_multiplication(m3 in arb_fixed(3, 3, 6), u in arb_unimodular(3), v in arb_unimodular(3)) {
        let s = snf(&m3);
        prop_assert_eq!(s.u.mul(&m3).mul(&s.v), s.d.clone());
        let d = &s.cokernel.elementary_divisors;
        prop_assert!(d.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        let other = snf(&u.transpose().mul(&m3).mul(&v));
        prop_assert_eq!(other.cokernel, s.cokernel);
    }

    #[test]
    fn kernel_is_exact_and_saturated(m in arb_matrix(3, 5, 4)) {
        let k = integer_kernel_int(&m);
        prop_assert_eq!(k.rank(), m.cols() - m.rank());
        for v in k.basis_vectors() {
            prop_assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        }
        prop_assert_eq!(k.saturate(), k.clone());
        prop_assert!(k.is_saturated());
    }

    #[test]
    fn quotient_order_matches_box_count(m in arb_fixed(3, 3, 2)) {
        let det = m.det().abs();
        prop_assume!(!det.is_zero() && det <= BigInt::from(12));
        let small = IntLattice::from_generators(&m);
        let order = quotient(&IntLattice::full(3), &small).unwrap().order().unwrap();
        // d Z^3 lies in the sublattice, so the box [0, d)^3 holds d^3 / order lattice points.
        let d = i64::try_from(&det).unwrap();
        let mut inside = 0i64;
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    if solves_integrally(&m, &big_vec(&[x, y, z])) {
                        inside += 1;
                    }
                }
            }
        }
        prop_assert_eq!(&order, &BigInt::from(d * d * d / inside));
        prop_assert_eq!(order, det);
    }

    #[test]
    fn sum_and_intersection_bounds(a in arb_fixed(3, 2, 4), b in arb_fixed(3, 2, 4)) {
        let la = IntLattice::from_generators(&a);
        let lb = IntLattice::from_generators(&b);
        let s = la.sum(&lb).unwrap();
        let i = la.intersect(&lb).unwrap();
        prop_assert!(s.contains_lattice(&la) && s.contains_lattice(&lb));
        prop_assert!(la.contains_lattice(&i) && lb.contains_lattice(&i));
        prop_assert_eq!(s.rank() + i.rank(), la.rank() + lb.rank());
        prop_assert!(la.saturate().contains_lattice(&la));
    }
}

#[test]
fn saturation_divides_content() {
    let l = IntLattice::from_vectors(&[big_vec(&[2, 4])], 2);
    assert_eq!(l.saturate(), IntLattice::from_vectors(&[big_vec(&[1, 2])], 2));
}
