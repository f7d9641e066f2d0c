use std::hint::black_box;

use clusterdouble::cluster::{mutation, Space};
use clusterdouble::intertwiner::{default_tests, verify_relation_numeric};
use clusterdouble::qdilog::{quantum_dilog, Planck};
use clusterdouble::quantum::relations::verify_quantum_relation;
use clusterdouble::suites::parse_complex;
use clusterdouble_bench::{disc, polygon, random_feed};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn mutations(c: &mut Criterion) {
    let mut group = c.benchmark_group("mutation");
    for rank in [3, 5, 8] {
        let feed = random_feed(rank, 7);
        for space in [Space::X, Space::D] {
            group.bench_with_input(BenchmarkId::new(format!("{space:?}"), rank), &feed, |b, f| b.iter(|| mutation(space, black_box(f), 0).unwrap()));
        }
    }
    group.finish();
}

fn polygon_relations(c: &mut Criterion) {
    let mut group = c.benchmark_group("polygon_relation");
    for p in [1, 2, 3] {
        let t = polygon(p);
        group.bench_with_input(BenchmarkId::new("classical_D", p), &t, |b, t| b.iter(|| t.substitution(Space::D).unwrap().is_identity()));
    }
    let t = polygon(1);
    group.sample_size(10);
    group.bench_function("quantum_X_matrix_models", |b| b.iter(|| verify_quantum_relation(black_box(&t), Space::X, &[5, 7], 1).unwrap()));
    group.finish();
}

fn dilogarithm(c: &mut Criterion) {
    let z = parse_complex("0.4+0.2i").unwrap();
    let mut group = c.benchmark_group("quantum_dilog");
    for hbar in [0.3, 1.0, 1.7] {
        let planck = Planck::new(hbar).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(hbar), &planck, |b, &p| b.iter(|| quantum_dilog(black_box(z), p).unwrap()));
    }
    group.finish();
}

fn intertwiner(c: &mut Criterion) {
    let t = polygon(1);
    let tests = default_tests(2).unwrap();
    let mut group = c.benchmark_group("intertwiner_pentagon");
    group.sample_size(10);
    for n in [128, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| verify_relation_numeric(&t, 0.7, &tests, n).unwrap()));
    }
    group.finish();
}

fn flips(c: &mut Criterion) {
    let t = disc(12);
    let edge = t.flippable_edges()[3];
    c.bench_function("surface_flip_disc12", |b| b.iter(|| black_box(&t).flip(edge).unwrap()));
    c.bench_function("surface_pentagon_word", |b| b.iter(|| disc(7).pentagon_word(0, 1).unwrap().transformation().unwrap()));
}

criterion_group!(benches, mutations, polygon_relations, dilogarithm, intertwiner, flips);
criterion_main!(benches);
