use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use privdiffuse::distributions::{sample_bessel, BesselParams};
use privdiffuse::process::TraceSampler;
use privdiffuse::simulator::{NetworkSource, PRESET_NODES, PRESET_RADIUS};
use privdiffuse::trials::{collect_trials_with, map_blocks_with, Execution};
use privdiffuse::RandomStream;

fn executions() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Execution::Parallel));
    v
}

/// Mean squared norm of X(eps) over many traces: the workload of the
/// variance-law check.
fn trace_moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("trace_moments");
    group.sample_size(10);
    for &n in &[1usize, 20] {
        let trials = 50_000;
        group.throughput(Throughput::Elements(trials as u64));
        let sampler = TraceSampler::new(n).unwrap();
        for (name, exec) in executions() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                let stream = RandomStream::new(7);
                b.iter(|| {
                    let sums = map_blocks_with(exec, &stream, trials, |s, len| {
                        let mut acc = 0.0;
                        for _ in 0..len {
                            let t = sampler.sample(0.5, 2.0, s).unwrap();
                            acc += t.evaluate(1.0).unwrap().iter().map(|v| v * v).sum::<f64>();
                        }
                        acc
                    });
                    black_box(sums.iter().sum::<f64>() / trials as f64)
                })
            });
        }
    }
    group.finish();
}

fn jump_counts(c: &mut Criterion) {
    let mut group = c.benchmark_group("jump_counts");
    group.sample_size(10);
    let trials = 100_000;
    group.throughput(Throughput::Elements(trials as u64));
    let sampler = TraceSampler::new(2).unwrap();
    for (name, exec) in executions() {
        group.bench_function(name, |b| {
            let stream = RandomStream::new(11);
            b.iter(|| {
                let counts = collect_trials_with(exec, &stream, trials, |s| {
                    sampler.sample(0.5, 15.0, s).unwrap().total_jumps()
                });
                black_box(counts)
            })
        });
    }
    group.finish();
}

fn bessel_draws(c: &mut Criterion) {
    let mut group = c.benchmark_group("bessel_draw");
    for &n in &[1u32, 2, 20] {
        let params = BesselParams::new(n, 0.7).unwrap();
        // Build the quantile table outside the timed loop.
        sample_bessel(params, &mut RandomStream::new(0)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &params, |b, &p| {
            let mut s = RandomStream::new(3);
            b.iter(|| black_box(sample_bessel(p, &mut s).unwrap()))
        });
    }
    group.finish();
}

fn resistance(c: &mut Criterion) {
    let g = NetworkSource::generate(PRESET_NODES, PRESET_RADIUS, 1).unwrap().network;
    c.bench_function("resistance_n150", |b| b.iter(|| black_box(g.resistance_distances(0).unwrap())));
}

criterion_group!(benches, trace_moments, jump_counts, bessel_draws, resistance);
criterion_main!(benches);
