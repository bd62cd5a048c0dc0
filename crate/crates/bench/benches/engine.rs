//! End-to-end benchmarks across the pipeline layers: root-system and Weyl
//! construction, PBW straightening, family building, single-weight
//! cohomology, and table assembly.

use criterion::{criterion_group, criterion_main, Criterion};

use bgg_core::{
    assemble, bgg_cohomology_via_varpi, build_parabolic, build_vjk, dominant_spectrum,
    AssembleMode, BlockSpec, BruhatGraph, PbwCtx, RootSystem, Series, Weight, WeylGroup,
};

fn bench_rootsystem(c: &mut Criterion) {
    c.bench_function("rootsystem_build_b3", |b| {
        b.iter(|| RootSystem::build(Series::B, 3).unwrap())
    });
    c.bench_function("weyl_and_bruhat_b3", |b| {
        let rs = RootSystem::build(Series::B, 3).unwrap();
        b.iter(|| {
            let wg = WeylGroup::build(&rs);
            BruhatGraph::build(&rs, &wg)
        })
    });
}

fn bench_pbw(c: &mut Criterion) {
    let rs = RootSystem::build(Series::G, 2).unwrap();
    let wg = WeylGroup::build(&rs);
    let lam = Weight(vec![2, 1]);
    c.bench_function("singular_vectors_g2", |b| {
        b.iter(|| {
            // A fresh context each pass so memoization does not trivialize
            // the measurement.
            let ctx = PbwCtx::new(&rs);
            for w in 0..wg.order() {
                let _ = ctx.singular_vector(&wg, &lam, w);
            }
        })
    });
}

fn bench_family(c: &mut Criterion) {
    let rs = RootSystem::build(Series::A, 2).unwrap();
    let pd = build_parabolic(&rs, &[0]).unwrap();
    c.bench_function("build_vjk_p2_j2_k2", |b| {
        b.iter(|| build_vjk(&pd, 2, 2).unwrap())
    });
}

fn bench_cohomology(c: &mut Criterion) {
    let rs = RootSystem::build(Series::A, 2).unwrap();
    let wg = WeylGroup::build(&rs);
    let bg = BruhatGraph::build(&rs, &wg);
    let pd = build_parabolic(&rs, &[0]).unwrap();
    let fam = build_vjk(&pd, 1, 4).unwrap();
    let lams = dominant_spectrum(&rs, &wg, &fam.v);
    c.bench_function("cohomology_p2_tangent_family", |b| {
        b.iter(|| {
            for lam in &lams {
                let _ = bgg_cohomology_via_varpi(&rs, &wg, &bg, &fam, lam).unwrap();
            }
        })
    });
}

fn bench_assemble(c: &mut Criterion) {
    let block = BlockSpec {
        series: Series::A,
        rank: 2,
        levi: vec![0],
    };
    c.bench_function("assemble_p2_s3_half", |b| {
        b.iter(|| assemble(&block, 3, AssembleMode::HalfTau).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_rootsystem, bench_pbw, bench_family, bench_cohomology, bench_assemble
}
criterion_main!(benches);
