use cavity_bench::{gold_on_glass, pec_lorentz};
use cavity_core::{casimir_energy_t0, free_energy_t, integrand_xi, QuadratureSpec};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn integrand(c: &mut Criterion) {
    let cfg = gold_on_glass(100e-9, 0.0);
    let spec = QuadratureSpec::default();
    let xi = cfg.reference_frequency();
    c.bench_function("integrand_xi gold/glass", |b| {
        b.iter(|| integrand_xi(black_box(&cfg), black_box(xi), &spec).unwrap())
    });
}

fn energies(c: &mut Criterion) {
    let mut group = c.benchmark_group("energy");
    group.sample_size(10);
    let spec = QuadratureSpec::default();
    let pec = pec_lorentz(100e-9);
    group.bench_function("T=0 pec lorentz", |b| {
        b.iter(|| casimir_energy_t0(black_box(&pec), &spec).unwrap())
    });
    let gold = gold_on_glass(100e-9, 0.0);
    group.bench_function("T=0 gold/glass", |b| {
        b.iter(|| casimir_energy_t0(black_box(&gold), &spec).unwrap())
    });
    let warm = gold_on_glass(1e-6, 300.0);
    group.bench_function("T=300K gold/glass 1um", |b| {
        b.iter(|| free_energy_t(black_box(&warm), &spec).unwrap())
    });
    group.finish();
}

criterion_group!(benches, integrand, energies);
criterion_main!(benches);
