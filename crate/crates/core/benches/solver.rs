use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use netrecon_core::bounds::Bounds;
use netrecon_core::extension::{minimal_valid_extensions, ExtensionOptions};
use netrecon_core::pipeline::{solve, SolveOptions};
use netrecon_core::reconstruct::{enumerate_structures, Emission, SearchConfig};
use netrecon_core::synth::{partially_observed, simulated, SynthConfig};
use netrecon_core::{fixtures, ExperimentGraph};

fn dense() -> ExperimentGraph {
    let cfg = SynthConfig {
        reactions: 16,
        merge_chance: 0.6,
        max_chain: 24,
        ..SynthConfig::scale()
    };
    simulated(1, &cfg).0
}

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", false), ("parallel", true)]
}

fn enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for (name, g) in [("fig2", fixtures::fig2()), ("dense", dense())] {
        for (mode, parallel) in modes() {
            let mut cfg = SearchConfig::new(Bounds::basic(&g));
            cfg.emission = Emission::AllOrders;
            cfg.parallel = parallel;
            group.bench_with_input(BenchmarkId::new(mode, name), &g, |b, g| {
                b.iter(|| enumerate_structures(black_box(g), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn extensions(c: &mut Criterion) {
    let cfg = SynthConfig {
        reactions: 16,
        merge_chance: 0.6,
        ..SynthConfig::scale()
    };
    let (hidden, _) = partially_observed(2, &cfg, 1);
    let mut group = c.benchmark_group("extensions");
    for (name, g) in [("fig1", fixtures::fig1()), ("partial", hidden)] {
        for (mode, parallel) in modes() {
            let opts = ExtensionOptions {
                parallel,
                ..ExtensionOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(mode, name), &g, |b, g| {
                b.iter(|| minimal_valid_extensions(black_box(g), &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    let g = fixtures::fig1();
    for (mode, parallel) in modes() {
        let opts = SolveOptions {
            parallel,
            ..SolveOptions::default()
        };
        group.bench_function(BenchmarkId::new(mode, "fig1"), |b| b.iter(|| solve(black_box(&g), &opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, enumerate, extensions, pipeline);
criterion_main!(benches);
