use criterion::{criterion_group, criterion_main, Criterion};
use hsbm_bench::four_leaf;
use hsbm_core::clustering::FixedDepth;
use hsbm_core::population::analytic_spectrum;
use hsbm_core::{recursive_bipartition, sample_graph, SampleSpec};

fn sampling(c: &mut Criterion) {
    let model = four_leaf(250);
    c.bench_function("sample_n1000", |b| {
        b.iter(|| sample_graph(&SampleSpec::new(&model, 3)))
    });
}

fn recursion(c: &mut Criterion) {
    let model = four_leaf(250);
    let g = sample_graph(&SampleSpec::new(&model, 3));
    let mut group = c.benchmark_group("recursion");
    group.sample_size(10);
    group.bench_function("depth2_n1000", |b| {
        b.iter(|| recursive_bipartition(&g, &FixedDepth, 2).unwrap())
    });
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let model = four_leaf(100);
    c.bench_function("analytic_spectrum_n400", |b| {
        b.iter(|| analytic_spectrum(&model).unwrap())
    });
}

criterion_group!(benches, sampling, recursion, spectrum);
criterion_main!(benches);
