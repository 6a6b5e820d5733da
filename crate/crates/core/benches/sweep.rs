use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stabphase::codes::CodeFamily;
use stabphase::harness::{run_sweep, run_sweep_sequential, SweepConfig};
use stabphase::noise::ErrorModelKind;

fn configs() -> Vec<(&'static str, SweepConfig)> {
    let toric = SweepConfig::toric(vec![8], vec![0.3, 0.6, 0.9], 16, 1);
    let mut rcc = SweepConfig::toric(vec![32], vec![0.2, 0.6], 16, 2);
    rcc.family = CodeFamily::Rcc;
    rcc.model = ErrorModelKind::LongRange;
    rcc.q = 2;
    vec![("toric_L8", toric), ("rcc_N32", rcc)]
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, config) in configs() {
        group.bench_with_input(BenchmarkId::new("parallel", name), &config, |b, cfg| {
            b.iter(|| run_sweep(cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", name), &config, |b, cfg| {
            b.iter(|| run_sweep_sequential(cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
