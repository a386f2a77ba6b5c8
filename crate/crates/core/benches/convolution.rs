//! Compares the integer convolution strategies on one table row and the
//! polynomial multiplication strategies on dense rational polynomials.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mapgenus::cubic::{build_h_table, HTable};
use mapgenus::exact::{rational, DensePolynomial, IntConvolution, MulStrategy};

fn next_row(c: &mut Criterion) {
    let mut group = c.benchmark_group("h_table_row");
    group.sample_size(10);
    for n in [60usize, 120] {
        let table = build_h_table(n, None).unwrap();
        for (name, strategy) in [
            ("schoolbook", IntConvolution::Schoolbook),
            ("karatsuba", IntConvolution::Karatsuba),
            ("kronecker", IntConvolution::Kronecker),
        ] {
            group.bench_with_input(BenchmarkId::new(name, n + 1), &table, |b, t: &HTable| {
                b.iter(|| {
                    let mut t = t.clone();
                    t.push_next_row(strategy).unwrap();
                    black_box(t)
                })
            });
        }
    }
    group.finish();
}

fn poly_mul(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_poly_mul");
    let p = DensePolynomial::new((1..=64).map(|i| rational(i * i + 1, i + 2)).collect());
    for (name, strategy) in [
        ("schoolbook", MulStrategy::Schoolbook),
        ("karatsuba", MulStrategy::Karatsuba),
    ] {
        group.bench_function(name, |b| b.iter(|| black_box(p.mul_with(&p, strategy))));
    }
    group.finish();
}

criterion_group!(benches, next_row, poly_mul);
criterion_main!(benches);
