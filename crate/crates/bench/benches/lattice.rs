use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toroidal_bench::{quartic, rank_five};
use toroidal_core::intlattice::{big_vec, hnf, snf, IntMatrix};
use toroidal_core::scalar::gcd::gcd;
use toroidal_core::scalar::expr::parse_scalar;
use toroidal_core::subvariety::{find_subtori, line_lattice_intersection, primitive_vectors};
use toroidal_core::torgroup::{closure_of, cm_of};
use toroidal_core::SymbolTable;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
    let m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-50..=50)).collect()).collect();
    IntMatrix::from_rows(&m)
}

fn normal_forms(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut g = c.benchmark_group("normal_forms");
    for n in [4usize, 8, 12] {
        let m = random_matrix(&mut rng, n, n + 2);
        g.bench_with_input(BenchmarkId::new("hnf", n), &m, |b, m| b.iter(|| hnf(black_box(m))));
        g.bench_with_input(BenchmarkId::new("snf", n), &m, |b, m| b.iter(|| snf(black_box(m))));
    }
    g.finish();
}

fn polynomial_gcd(c: &mut Criterion) {
    let t = SymbolTable::new(["r", "s"]).unwrap();
    let poly = |s: &str| parse_scalar(s, &t).unwrap().re.numer().clone();
    let common = poly("r^3 - 2*r*s + s^2 + 7");
    let a = &common * &poly("r^4 + s^3 - r");
    let b = &common * &poly("s^4 - 3*r^2*s + 1");
    c.bench_function("gcd_bivariate", |bn| bn.iter(|| gcd(black_box(&a), black_box(&b))));
}

fn subvarieties(c: &mut Criterion) {
    let q = quartic();
    let dirs = primitive_vectors(4, 3);
    c.bench_function("line_sweep_quartic_h3", |b| {
        b.iter(|| {
            for a in &dirs {
                black_box(line_lattice_intersection(&q.point(&big_vec(a)), &q).unwrap());
            }
        })
    });
    c.bench_function("find_subtori_quartic_d1_h10", |b| b.iter(|| find_subtori(black_box(&q), 1, 10).unwrap()));
    let p = rank_five();
    let cm = cm_of(&p);
    c.bench_function("closure_rank_five_cm", |b| b.iter(|| closure_of(black_box(&cm), &p)));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = normal_forms, polynomial_gcd, subvarieties
}
criterion_main!(benches);
