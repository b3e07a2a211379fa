//! Sequential vs. rayon execution for the three data-parallel hot paths:
//! shot sampling of one setting, acquisition of the full quorum, and the
//! bootstrap over reconstructed-marginal CHSH values.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pdolab::bell::reconstructed_marginal_chsh;
use pdolab::sim::{sample_stream, Axis, Carrier, Measurement, MeasurementTimeline};
use pdolab::tomography::{acquire, build_quorum, Acquisition, Source};
use pdolab::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn shot_sampling(c: &mut Criterion) {
    let state = pdolab::pdo::werner(0.952).unwrap();
    let t = MeasurementTimeline::measurements(
        state,
        &[
            Measurement::new(Carrier::B, 1, Axis::z()),
            Measurement::new(Carrier::A, 1, Axis::x()),
            Measurement::new(Carrier::A, 2, Axis::x()),
        ],
    )
    .unwrap();
    let mut group = c.benchmark_group("sample_stream");
    for shots in [100_000u64, 1_000_000] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, shots), &shots, |b, &shots| {
                b.iter(|| black_box(sample_stream(&t, shots, 7, 0, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn quorum_acquisition(c: &mut Criterion) {
    let plan = build_quorum(20_000);
    let source = Source::with_visibility(0.952);
    let mut group = c.benchmark_group("acquire_quorum");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(acquire(&plan, &source, Acquisition::Sampled { seed: 3 }, exec).unwrap()))
        });
    }
    group.finish();
}

fn bootstrap(c: &mut Criterion) {
    let data = acquire(
        &build_quorum(10_000),
        &Source::with_visibility(0.952),
        Acquisition::Sampled { seed: 11 },
        Execution::Parallel,
    )
    .unwrap();
    let mut group = c.benchmark_group("bootstrap_c13");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(reconstructed_marginal_chsh(&data, (0, 2), 100, 5, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, shot_sampling, quorum_acquisition, bootstrap);
criterion_main!(benches);
