use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zdgraph_algo::*;

const RINGS: &[&str] = &["M2(3)", "M3(2)", "M2(2)xM2(2)", "M2(2)xM2(3)"];

fn graph_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_graph");
    group.sample_size(10);
    for s in RINGS {
        let r = parse_ring_spec(s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(s), &r, |b, r| {
            b.iter(|| build_graph(black_box(r), &GraphOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn graph_analyze(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    for s in RINGS {
        let g = build_graph(&parse_ring_spec(s).unwrap(), &GraphOptions::default()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(s), &g, |b, g| b.iter(|| analyze(black_box(g)).unwrap()));
    }
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("formulas");
    let big = parse_ring_spec("M4(9)xM3(8)xM2(7)xM5(2)").unwrap();
    group.bench_function("wiener_semisimple", |b| b.iter(|| wiener_semisimple(black_box(&big)).unwrap()));
    group.bench_function("wiener_simple n=6 q=101", |b| b.iter(|| wiener_simple(black_box(6), black_box(101)).unwrap()));
    group.bench_function("polynomial n=3", |b| b.iter(|| wiener_simple_polynomial(black_box(3)).unwrap()));
    group.finish();
}

criterion_group!(benches, graph_build, graph_analyze, closed_forms);
criterion_main!(benches);
