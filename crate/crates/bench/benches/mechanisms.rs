use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use frugal_bench::{gnp_cover, groups, layered};
use frugal_core::benchmarks::{compute_mu, compute_nu};
use frugal_core::mechanisms::{run_mechanism, MechanismKind};
use frugal_core::DEFAULT_ENUMERATION_CAP;

fn mechanisms(c: &mut Criterion) {
    let mut group = c.benchmark_group("mechanism");
    for k in 1..=3 {
        let inst = layered(k, 3, 7);
        group.bench_with_input(BenchmarkId::new("kpath", k), &inst, |b, inst| {
            b.iter(|| run_mechanism(&inst.system, inst.costs(), MechanismKind::KPath).unwrap())
        });
    }
    for n in [8, 12, 16] {
        let inst = gnp_cover(n, 7);
        for kind in [MechanismKind::VertexCover, MechanismKind::VertexCoverApprox] {
            group.bench_with_input(BenchmarkId::new(kind.name(), n), &inst, |b, inst| {
                b.iter(|| run_mechanism(&inst.system, inst.costs(), kind).unwrap())
            });
        }
    }
    let inst = groups(&[2, 3, 1, 2, 3], 2, 7);
    group.bench_function("r-out-of-k", |b| {
        b.iter(|| run_mechanism(&inst.system, inst.costs(), MechanismKind::ROutOfK).unwrap())
    });
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for k in 1..=3 {
        let inst = layered(k, 2, 7);
        group.bench_with_input(BenchmarkId::new("nu", k), &inst, |b, inst| {
            b.iter(|| compute_nu(&inst.system, inst.costs(), DEFAULT_ENUMERATION_CAP).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("mu", k), &inst, |b, inst| {
            b.iter(|| compute_mu(&inst.system, inst.costs(), DEFAULT_ENUMERATION_CAP).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, mechanisms, oracles);
criterion_main!(benches);
