//! Criterion benchmarks for the hot paths: cyclotomic construction,
//! signature computation, tiling verification, and a small fill-out.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use tiling_core::{cyclo, fillout, zset, zset::ResidueSet};

fn bench_cyclotomic(c: &mut Criterion) {
    c.bench_function("cyclotomic 1..=300 (cold cache each pass)", |b| {
        b.iter_batched(
            cyclo::clear_cache,
            |()| {
                for n in 1..=300u64 {
                    cyclo::cyclotomic(n).unwrap();
                }
            },
            BatchSize::PerIteration,
        )
    });
}

fn bench_signature(c: &mut Criterion) {
    let a = ResidueSet::parse(144, "0,17,20,23,28,29,40,48,53,59,65,68,76,88,89,95,96,101,116,124,125,131,136,137").unwrap();
    c.bench_function("signature of a 24-element set in Z_144", |b| {
        b.iter(|| cyclo::signature(&a).unwrap())
    });
}

fn bench_verify(c: &mut Criterion) {
    let a = ResidueSet::parse(144, "0,17,20,23,28,29,40,48,53,59,65,68,76,88,89,95,96,101,116,124,125,131,136,137").unwrap();
    let b_set = ResidueSet::parse(144, "0,32,58,90,112,122").unwrap();
    c.bench_function("verify a 24 x 6 tiling of Z_144", |b| {
        b.iter(|| zset::verify_tiling(&a, &b_set).unwrap())
    });
}

fn bench_fillout(c: &mut Criterion) {
    let a = ResidueSet::parse(36, "0,4,8,9,13,17").unwrap();
    c.bench_function("fill out a 6-element tile of Z_36", |b| {
        b.iter(|| fillout::explore(&a).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_cyclotomic, bench_signature, bench_verify, bench_fillout
}
criterion_main!(benches);
