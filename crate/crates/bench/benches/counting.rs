use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num::BigInt;
use vpf_core::arrangement::enumerate_chambers;
use vpf_core::formula::{partition_quasipoly, volume_polynomial};
use vpf_core::oracle::count_points;
use vpf_core::System;

fn ivec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn a2(mult: u32) -> System {
    System::new(2, vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1])], vec![mult; 3]).unwrap()
}

fn rank3() -> System {
    System::new(
        3,
        vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1]), ivec(&[1, 1, 0]), ivec(&[0, 1, 1])],
        vec![1; 5],
    )
    .unwrap()
}

fn bench_chambers(c: &mut Criterion) {
    let sys = rank3();
    c.bench_function("enumerate_chambers_rank3", |b| {
        b.iter(|| enumerate_chambers(black_box(&sys)).unwrap())
    });
}

fn bench_formula(c: &mut Criterion) {
    let sys = a2(2);
    let chambers = enumerate_chambers(&sys).unwrap();
    c.bench_function("partition_quasipoly_a2_mult2", |b| {
        b.iter(|| partition_quasipoly(black_box(&sys), &chambers[0]).unwrap())
    });
}

fn bench_volume(c: &mut Criterion) {
    let sys = rank3();
    let chambers = enumerate_chambers(&sys).unwrap();
    c.bench_function("volume_polynomial_rank3", |b| {
        b.iter(|| volume_polynomial(black_box(&sys), &chambers[0]).unwrap())
    });
}

fn bench_count(c: &mut Criterion) {
    let sys = a2(2);
    let lam = ivec(&[40, 25]);
    c.bench_function("count_points_a2_mult2", |b| {
        b.iter(|| count_points(black_box(&sys), black_box(&lam)).unwrap())
    });
}

criterion_group!(benches, bench_chambers, bench_formula, bench_volume, bench_count);
criterion_main!(benches);
