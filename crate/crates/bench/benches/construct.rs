use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polynet::verifier::{check_indicator, SamplingPlan};
use polynet::{difference_indicator, polytope_gate, union_indicator, Space};
use polynet_bench::{hexagon_minus_pentagon, regular_polygon, two_triangles, unit_simplex};
use std::hint::black_box;

fn gates(c: &mut Criterion) {
    let mut g = c.benchmark_group("gate");
    for k in [3, 6, 12, 24] {
        let poly = regular_polygon(k, 1.0);
        g.bench_with_input(BenchmarkId::new("polygon", k), &poly, |b, p| {
            b.iter(|| polytope_gate(black_box(p), 0.1).unwrap())
        });
    }
    g.sample_size(10);
    for d in [3, 4] {
        let s = unit_simplex(d);
        g.bench_with_input(BenchmarkId::new("simplex", d), &s, |b, p| {
            b.iter(|| polytope_gate(black_box(p), 0.05).unwrap())
        });
    }
    g.finish();
}

fn indicators(c: &mut Criterion) {
    let tri = two_triangles();
    c.bench_function("union/two_triangles", |b| {
        b.iter(|| union_indicator(black_box(&tri), 0.5).unwrap())
    });
    let Space::Difference(plan) = hexagon_minus_pentagon() else {
        unreachable!()
    };
    c.bench_function("difference/hexagon_pentagon", |b| {
        b.iter(|| difference_indicator(black_box(&plan), 0.5).unwrap())
    });
}

fn verify(c: &mut Criterion) {
    let tri = two_triangles();
    let net = union_indicator(&tri, 0.5).unwrap().network;
    let space = Space::Union(tri);
    let plan = SamplingPlan::new(&space, 0.5, 2500, 1);
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("two_triangles_10k", |b| {
        b.iter(|| check_indicator(&net, &space, 0.5, black_box(&plan)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, gates, indicators, verify);
criterion_main!(benches);
