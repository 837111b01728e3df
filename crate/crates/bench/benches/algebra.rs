use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dunkl_core::identities::run_oracle_suite;
use dunkl_core::oracle::OracleConfig;
use dunkl_core::{check, Builders, FieldCtx, Filter, HkForm, SuiteOptions};

fn ctx(k: usize) -> Arc<FieldCtx> {
    Arc::new(FieldCtx::new(k).unwrap())
}

fn dphi_squared(c: &mut Criterion) {
    let mut g = c.benchmark_group("dphi_squared");
    for k in [2, 3, 5, 8] {
        let d = Builders::new(&ctx(k)).dphi();
        g.bench_with_input(BenchmarkId::from_parameter(k), &d, |b, d| b.iter(|| d * d));
    }
    g.finish();
}

fn extended_hamiltonian(c: &mut Criterion) {
    let mut g = c.benchmark_group("hk_ext_via_dr");
    g.sample_size(20);
    for k in [3, 4, 6] {
        let b = Builders::new(&ctx(k));
        g.bench_with_input(BenchmarkId::from_parameter(k), &b, |bch, b| bch.iter(|| b.hk_ext(HkForm::ViaDr)));
    }
    g.finish();
}

fn integral_check(c: &mut Criterion) {
    let mut g = c.benchmark_group("integral_commutes");
    g.sample_size(10);
    for k in [3, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| check("integral_commutes", k).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_hk_two_forms");
    g.sample_size(10);
    let cfg = OracleConfig::default();
    let f = Filter::parse("hk_two_forms").unwrap();
    for k in [3, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| run_oracle_suite(&[k], &f, &SuiteOptions::default(), &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, dphi_squared, extended_hamiltonian, integral_check, oracle);
criterion_main!(benches);
