use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C64;
use pointspec::model::{DeltaModel, Model, Potential, SpectralParameter};
use pointspec::oracle::{verify_eigenvalue, FdGrid};
use pointspec::spectrum::{find_eigenvalues, find_exceptional_points, SearchRegion};
use pointspec::weyl::weyl_scalar;

fn bump() -> Potential {
    let nodes: Vec<f64> = (0..=40).map(|j| -1.0 + 0.05 * j as f64).collect();
    let values = nodes.iter().map(|&x| (1.0 - x * x) * C64::new(0.8, 0.3 * x)).collect();
    Potential::sampled(nodes, values).unwrap()
}

fn weyl(c: &mut Criterion) {
    let k = SpectralParameter::from_k(C64::new(0.7, 0.4)).unwrap();
    let exp = Potential::exp_even(C64::new(0.0, 0.5), 0.25).unwrap();
    let sampled = bump();
    c.bench_function("weyl_scalar_exp_even", |b| {
        b.iter(|| weyl_scalar(black_box(&k), &exp, 1e-10).unwrap())
    });
    c.bench_function("weyl_scalar_sampled", |b| {
        b.iter(|| weyl_scalar(black_box(&k), &sampled, 1e-10).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let region = SearchRegion::default();
    let well = Model::Delta(DeltaModel::new(C64::new(-2.0, 0.0), Potential::Zero));
    c.bench_function("find_eigenvalues_delta_well", |b| {
        b.iter(|| find_eigenvalues(black_box(&well), &region, 1e-10).unwrap())
    });
    let q = Potential::exp_even(C64::new(0.0, 0.5), 0.25).unwrap();
    let small = SearchRegion::new(-3.0, 3.0, 1e-3, 3.0).unwrap();
    c.bench_function("exceptional_points_exp_even", |b| {
        b.iter(|| find_exceptional_points(black_box(&q), &small, 1e-10).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let m = DeltaModel::new(C64::new(-2.0, 0.0), Potential::Zero);
    let grid = FdGrid::new(20.0, 2001).unwrap();
    c.bench_function("verify_delta_well_n2001", |b| {
        b.iter(|| verify_eigenvalue(black_box(&m), C64::new(-1.0, 0.0), &grid, None).unwrap())
    });
}

criterion_group!(benches, weyl, search, oracle);
criterion_main!(benches);
