use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tdface::classifiers::Metric;
use tdface::dataset::{split_first_k, synth_corpus};
use tdface::eval::{evaluate_features, sweep_spread, ClassifierSpec, FeatureBase, FeatureCache, Selection};
use tdface::transforms::{TransformKind, ZonalMask};
use tdface::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn benches(c: &mut Criterion) {
    let corpus = synth_corpus(0, 40, 10, 112, 92).unwrap();
    let split = split_first_k(&corpus, 5).unwrap();
    let dct = FeatureBase::transform(TransformKind::Dct);
    let sel = Selection::Mask {
        mask: ZonalMask::rectangular(10).unwrap(),
    };
    let cache = FeatureCache::build(&split, dct, Execution::Parallel).unwrap();
    let (gallery, probes) = cache.select(&sel, Execution::Parallel).unwrap();

    let mut g = c.benchmark_group("dct_corpus");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| FeatureCache::build(black_box(&split), dct, e).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("eigenbasis_and_projection");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| FeatureCache::build(black_box(&split), FeatureBase::Klt, e).unwrap())
        });
    }
    g.finish();

    let nn = ClassifierSpec::Nn { metric: Metric::Mad };
    let mut g = c.benchmark_group("nn_mad_identification");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| evaluate_features(black_box(&gallery), &probes, &nn, e).unwrap())
        });
    }
    g.finish();

    let pnn = ClassifierSpec::Pnn { spread: 1.0 };
    let spreads: Vec<f64> = (1..=10).map(|i| i as f64 / 5.0).collect();
    let mut g = c.benchmark_group("pnn_spread_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| sweep_spread(black_box(&gallery), &probes, &pnn, &spreads, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(pipeline, benches);
criterion_main!(pipeline);
