use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fockchain::parallel::{par_map, seq_map};
use fockchain::{expand_preset, run, ExperimentConfig};

fn short_sweep() -> Vec<ExperimentConfig> {
    let mut cfgs = expand_preset("fig6c-sweep").unwrap();
    for c in &mut cfgs {
        c.integrator.t_end = 2.0;
        c.integrator.dt = 2e-3;
    }
    cfgs
}

fn sweep(c: &mut Criterion) {
    let cfgs = short_sweep();
    let mut group = c.benchmark_group("fig6c_sweep_t2");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("map", "parallel"), |b| {
        b.iter(|| par_map(&cfgs, |cfg| run(cfg).unwrap().summary.c_max))
    });
    group.bench_function(BenchmarkId::new("map", "sequential"), |b| {
        b.iter(|| seq_map(&cfgs, |cfg| run(cfg).unwrap().summary.c_max))
    });
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
