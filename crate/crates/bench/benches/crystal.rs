use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use weylwalk_core::cartan::CartanDatum;
use weylwalk_core::{CrystalGraph, RootSystem, Weight};

fn generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("crystal_generation");
    for (label, kappa) in [("C2", vec![2, 1]), ("A3", vec![1, 1, 1]), ("G2", vec![1, 1]), ("B3", vec![1, 0, 1])] {
        let datum = CartanDatum::from_label(label).unwrap();
        let kappa = Weight(kappa);
        group.bench_with_input(BenchmarkId::new(label, &kappa), &kappa, |b, k| {
            b.iter(|| CrystalGraph::straight(&datum, black_box(k)).unwrap().len())
        });
    }
    group.finish();
}

fn f_dp(c: &mut Criterion) {
    let sys = RootSystem::from_label("C2").unwrap();
    let m = sys.irreducible(&Weight(vec![1, 0])).unwrap();
    let zero = Weight(vec![0, 0]);
    let mut group = c.benchmark_group("f_multiplicities");
    for ell in [8usize, 16, 32] {
        group.bench_with_input(BenchmarkId::from_parameter(ell), &ell, |b, &ell| {
            b.iter(|| m.f_multiplicities(&zero, black_box(ell)).unwrap().len())
        });
    }
    group.finish();
}

fn weyl_group(c: &mut Criterion) {
    c.bench_function("weyl_group_F4", |b| {
        let datum = CartanDatum::from_label("F4").unwrap();
        b.iter(|| weylwalk_core::WeylGroup::generate(black_box(&datum)).unwrap().len())
    });
}

criterion_group!(benches, generate, f_dp, weyl_group);
criterion_main!(benches);
