//! Compares the rayon-backed execution path against the always-sequential
//! twin on the two workloads that dominate experiment wall time: replicated
//! field generation and replicated window functionals.
//!
//! Both paths produce identical results (outputs are collected in index
//! order); the benchmark quantifies the speedup so the `parallel` default
//! can be justified with data. Run with `cargo bench -p rfclt-core`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rfclt_core::config::GeneratorSpec;
use rfclt_core::exec::{map_indexed, map_indexed_seq};
use rfclt_core::functionals::{phi_n, FuncSpec};

/// Replicated Voronoi volume-fraction fields: each replicate samples a
/// planar Poisson process and rasterizes nearest-nucleus cells, the most
/// expensive generator in the crate.
fn bench_voronoi_generation(c: &mut Criterion) {
    let spec = GeneratorSpec::Voronoi {
        intensity: 1.0,
        spacing: 0.25,
        guard: None,
    };
    let generator = spec.build(16.0).expect("valid generator");
    let replicates = 16;

    let mut group = c.benchmark_group("voronoi_generation");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", replicates), |b| {
        b.iter(|| {
            let fields = map_indexed(replicates, |r| {
                generator.generate(11, r as u64 + 1).expect("generates")
            });
            black_box(fields)
        })
    });
    group.bench_function(BenchmarkId::new("sequential", replicates), |b| {
        b.iter(|| {
            let fields = map_indexed_seq(replicates, |r| {
                generator.generate(11, r as u64 + 1).expect("generates")
            });
            black_box(fields)
        })
    });
    group.finish();
}

/// Replicated normalized window functionals on pre-generated fields: pure
/// per-replicate arithmetic, the core of every CLT experiment.
fn bench_window_functionals(c: &mut Criterion) {
    let spec = GeneratorSpec::GaussMa {
        kernel_side: 1.0,
        dim: 2,
        spacing: 0.25,
    };
    let generator = spec.build(32.0).expect("valid generator");
    let replicates = 32;
    let fields = map_indexed(replicates, |r| {
        generator.generate(5, r as u64 + 1).expect("generates")
    });
    let f = FuncSpec::MeixnerPoly {
        degree: 2,
        system: rfclt_core::meixner::PolySystemSpec::from_system(
            &rfclt_core::meixner::PolySystem::normal(1.0).expect("valid system"),
        ),
    }
    .compile()
    .expect("compiles");

    let mut group = c.benchmark_group("window_functionals");
    group.bench_function(BenchmarkId::new("parallel", replicates), |b| {
        b.iter(|| {
            let phis = map_indexed(fields.len(), |r| {
                phi_n(&fields[r], &f, 0.0)
            });
            black_box(phis)
        })
    });
    group.bench_function(BenchmarkId::new("sequential", replicates), |b| {
        b.iter(|| {
            let phis = map_indexed_seq(fields.len(), |r| {
                phi_n(&fields[r], &f, 0.0)
            });
            black_box(phis)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_voronoi_generation, bench_window_functionals);
criterion_main!(benches);
