//! Sequential vs parallel throughput of the experiment kernels.
//!
//! `short_gauss_experiment` and `reference_theta_sample` fan out over
//! residues / sample points; both policies produce bit-identical output, so
//! the comparison is purely about wall-clock.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gausslab::distexp::{reference_theta_sample, short_gauss_experiment, ExperimentConfig};
use gausslab::expsums::{classical_gauss_sum_direct_with, RootTable, WeightFunction};
use gausslab::numtheory::{coprime_residues, TorusSet};
use gausslab::ExecPolicy;

fn policies() -> Vec<(&'static str, ExecPolicy)> {
    vec![
        ("sequential", ExecPolicy::Sequential),
        ("parallel", ExecPolicy::Parallel),
    ]
}

fn bench_short_experiment(c: &mut Criterion) {
    let mut group = c.benchmark_group("short_gauss_experiment");
    group.sample_size(10);
    for (name, exec) in policies() {
        let mut cfg = ExperimentConfig::theorem1(1, 1009);
        cfg.exec = exec;
        group.bench_with_input(BenchmarkId::new(name, cfg.q), &cfg, |b, cfg| {
            b.iter(|| short_gauss_experiment(cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_reference_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("reference_theta_sample");
    group.sample_size(10);
    let f = WeightFunction::unit_indicator();
    for (name, exec) in policies() {
        group.bench_function(BenchmarkId::new(name, "20k_x_N229"), |b| {
            b.iter(|| reference_theta_sample(&f, 229, 20_000, 7, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_gauss_sum_scan(c: &mut Criterion) {
    // single-threaded kernel cost: the full p-scan at one modulus
    let q = 1009u64;
    let table = RootTable::new(q);
    let ps = coprime_residues(q, &TorusSet::full());
    c.bench_function("classical_gauss_scan_q1009", |b| {
        b.iter(|| {
            ps.iter()
                .map(|&p| {
                    classical_gauss_sum_direct_with(&table, p as i64)
                        .unwrap()
                        .value
                })
                .sum::<gausslab::Complex>()
        })
    });
}

criterion_group!(
    benches,
    bench_short_experiment,
    bench_reference_sampling,
    bench_gauss_sum_scan
);
criterion_main!(benches);
