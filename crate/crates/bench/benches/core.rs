use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use snirkit::baselines::{row_normalized, LogDet};
use snirkit::netcore::{betweenness, harmonic, GeneratorSpec};
use snirkit::snir::{forward_addition, screen_candidates, DesignContext};
use snirkit::{fit, FitConfig};
use snirkit_bench::sbm_dataset;

fn generators(c: &mut Criterion) {
    let mut g = c.benchmark_group("generate");
    for spec in [GeneratorSpec::er(15000, 1), GeneratorSpec::sbm(2500, 1), GeneratorSpec::powerlaw(5000, 1)] {
        let name = family(&spec);
        g.bench_function(BenchmarkId::new(name, spec.n), |b| b.iter(|| spec.generate().unwrap()));
    }
    g.finish();
}

fn family(spec: &GeneratorSpec) -> &'static str {
    match spec.kind {
        snirkit::netcore::GeneratorKind::Er { .. } => "er",
        snirkit::netcore::GeneratorKind::Sbm { .. } => "sbm",
        snirkit::netcore::GeneratorKind::PowerLaw { .. } => "powerlaw",
    }
}

fn selection(c: &mut Criterion) {
    let mut g = c.benchmark_group("snir");
    g.sample_size(20);
    for n in [1000, 2500] {
        let d = sbm_dataset(n);
        let cfg = FitConfig::default();
        let m = screen_candidates(&d.graph, &cfg.screen).unwrap();
        let ctx = DesignContext::new(&d.graph, &d.y, &m).unwrap();
        let k = cfg.resolve_k(n, ctx.m_size(), ctx.mc_size());
        g.bench_with_input(BenchmarkId::new("forward_addition", n), &ctx, |b, ctx| {
            b.iter(|| forward_addition(black_box(&ctx.design), k).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("fit", n), &d, |b, d| b.iter(|| fit(&d.graph, black_box(&d.y), &cfg).unwrap()));
    }
    g.finish();
}

fn centrality(c: &mut Criterion) {
    let mut g = c.benchmark_group("centrality");
    g.sample_size(10);
    let d = sbm_dataset(2000);
    g.bench_function("betweenness/2000", |b| b.iter(|| betweenness(black_box(&d.graph))));
    g.bench_function("harmonic/2000", |b| b.iter(|| harmonic(black_box(&d.graph))));
    g.finish();
}

fn sar(c: &mut Criterion) {
    let mut g = c.benchmark_group("sar");
    let d = sbm_dataset(2500);
    let w = row_normalized(&d.graph);
    g.bench_function("logdet_setup/2500", |b| b.iter(|| LogDet::new(d.graph.n(), black_box(&w))));
    let ld = LogDet::new(d.graph.n(), &w);
    g.bench_function("logdet_eval/2500", |b| b.iter(|| ld.eval(black_box(0.3))));
    g.finish();
}

criterion_group!(benches, generators, selection, centrality, sar);
criterion_main!(benches);
