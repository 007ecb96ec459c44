//! Rayon-dispatched kernels against their sequential twins.
//!
//! The public API routes through the rayon pool when the `parallel`
//! feature is on; the `*_seq` twins always run single-threaded. Outputs
//! are bit-identical, only wall time differs.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use moufang_core::constructions::{construct_kn_243_56, construct_kn_243_57};
use moufang_core::quasigroup::{check_distributive, check_distributive_seq};
use moufang_core::search::fingerprints;
use moufang_core::{build_distributive_from_psi, central_automorphism_group};

fn bench_moufang_identity(c: &mut Criterion) {
    let l = construct_kn_243_56();
    let mut g = c.benchmark_group("moufang_identity_order_243");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| assert!(l.moufang_violation().is_none()))
    });
    g.bench_function("serial", |b| {
        b.iter(|| assert!(l.moufang_violation_seq().is_none()))
    });
    g.finish();
}

fn bench_distributivity(c: &mut Criterion) {
    let l = construct_kn_243_57();
    let mut autc = central_automorphism_group(&l).expect("central search");
    let jautc = moufang_core::j_central_coset(&l, &mut autc).expect("aip holds");
    let psi = moufang_core::orthoautomorphisms(&l, &jautc)
        .into_iter()
        .next()
        .expect("orthoautomorphism exists");
    let q = build_distributive_from_psi(&l, &psi).expect("orthoautomorphism");
    let mut g = c.benchmark_group("distributive_identity_order_243");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| assert!(check_distributive(&q))));
    g.bench_function("serial", |b| b.iter(|| assert!(check_distributive_seq(&q))));
    g.finish();
}

fn bench_fingerprints(c: &mut Criterion) {
    let l = construct_kn_243_56();
    let mut g = c.benchmark_group("fingerprints_order_243");
    g.sample_size(10);
    g.bench_function("two_rounds", |b| {
        b.iter_batched(|| l.clone(), |t| fingerprints(&t, 2), BatchSize::LargeInput)
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_moufang_identity,
    bench_distributivity,
    bench_fingerprints
);
criterion_main!(benches);
