use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lrw::{LrwParams, VertexId, Walker};
use lrw_bench::{planted, powerlaw};
use std::hint::black_box;

fn explore(c: &mut Criterion) {
    let mut group = c.benchmark_group("explore");
    let params = LrwParams::default();
    for (name, lg) in [
        ("planted_128", planted(4.0, 1)),
        ("powerlaw_2048", powerlaw(2048, 1)),
    ] {
        let mut walker = Walker::new(&lg.graph, params);
        group.bench_function(BenchmarkId::new("seed0", name), |b| {
            b.iter(|| walker.explore(black_box(VertexId(0))))
        });
    }
    group.finish();
}

fn single_step(c: &mut Criterion) {
    let lg = powerlaw(2048, 2);
    let params = LrwParams::default();
    let mut walker = Walker::new(&lg.graph, params);
    // A mid-walk vector with realistic support.
    let mut x = lrw::SparseProbVector::point(VertexId(3));
    for _ in 0..5 {
        x = walker.iterate(&x);
    }
    c.bench_function("iterate/powerlaw_2048", |b| {
        b.iter(|| walker.iterate(black_box(&x)))
    });
}

criterion_group!(benches, explore, single_step);
criterion_main!(benches);
