use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use srrw_core::groups::{GroupElement, GroupSpec, StepDistribution};
use srrw_core::mc;
use srrw_core::sampler::{Sampler, SrrwConfig, TransformSpec};

fn lattice_walk() -> Sampler {
    let spec = GroupSpec::Lattice(2);
    let mu = StepDistribution::lazy(&spec, 0.5).unwrap();
    Sampler::new(&SrrwConfig::new(spec, 0.5, mu, TransformSpec::Identity).unwrap()).unwrap()
}

fn executors(c: &mut Criterion) {
    let sampler = lattice_walk();
    let origin = GroupElement::Lattice(vec![0, 0]);
    let n = 256;
    let mut group = c.benchmark_group("return_to_origin");
    for trials in [16_384u64, 65_536] {
        group.throughput(Throughput::Elements(trials));
        let trial = |acc: &mut u64, scratch: &mut _, rng: &mut _| {
            let s = sampler.final_position(n, rng, scratch)?;
            *acc += (s == origin) as u64;
            Ok::<_, srrw_core::sampler::SamplerError>(())
        };
        group.bench_with_input(BenchmarkId::new("sequential", trials), &trials, |b, &t| {
            b.iter(|| mc::run_trials_sequential(t, 7, || 0u64, || sampler.scratch(), trial, |a, b| *a += b).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", trials), &trials, |b, &t| {
            b.iter(|| mc::run_trials_parallel(t, 7, || 0u64, || sampler.scratch(), trial, |a, b| *a += b).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = executors
}
criterion_main!(benches);
