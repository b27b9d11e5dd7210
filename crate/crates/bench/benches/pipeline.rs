//! Wall-clock coverage of the expensive paths: quadrature sweeps,
//! moment accumulation, pencil assembly, and both eigensolvers.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use cmc_index::closed_spectrum;
use cmc_index::fem;
use cmc_index::quad::{self, QuadratureSpec};
use cmc_index::support;
use cmc_index::AnalyticFamily;
use cmc_index_bench::{generic_torus, tall_minimal_torus};

fn bench_closed_enumeration(c: &mut Criterion) {
    let family = tall_minimal_torus();
    c.bench_function("closed_spectrum_minimal_n8", |b| {
        b.iter(|| {
            let modes = closed_spectrum::stability_modes(black_box(&family), 1.0).unwrap();
            closed_spectrum::index_count(&modes, 1e-9).unwrap()
        })
    });
}

fn bench_quadrature_area(c: &mut Criterion) {
    let family = AnalyticFamily::round_sphere(3, 0.9).unwrap();
    let spec = QuadratureSpec::with_points(48);
    c.bench_function("quadrature_area_sphere3_48", |b| {
        b.iter(|| quad::area(black_box(&family), black_box(&spec)).unwrap())
    });
}

fn bench_family_moments(c: &mut Criterion) {
    let family = generic_torus();
    let spec = QuadratureSpec::with_points(64);
    c.bench_function("family_moments_torus_64", |b| {
        b.iter(|| support::family_moments(black_box(&family), black_box(&spec)).unwrap())
    });
}

fn bench_assemble(c: &mut Criterion) {
    let family = generic_torus();
    let mesh = fem::build_mesh(48, 48).unwrap();
    c.bench_function("assemble_pencil_48x48", |b| {
        b.iter(|| fem::assemble(black_box(&family), black_box(&mesh)).unwrap())
    });
}

fn bench_eigensolvers(c: &mut Criterion) {
    let family = generic_torus();
    let small = fem::assemble(&family, &fem::build_mesh(20, 20).unwrap()).unwrap();
    c.bench_function("eigen_dense_20x20", |b| {
        b.iter(|| fem::eigen_solve(black_box(&small), 11, fem::SolveMethod::Dense).unwrap())
    });
    let large = fem::assemble(&family, &fem::build_mesh(40, 40).unwrap()).unwrap();
    c.bench_function("eigen_shift_invert_40x40", |b| {
        b.iter(|| fem::eigen_solve(black_box(&large), 11, fem::SolveMethod::ShiftInvert).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_closed_enumeration,
        bench_quadrature_area,
        bench_family_moments,
        bench_assemble,
        bench_eigensolvers
}
criterion_main!(benches);
