//! Benchmarks for the numeric kernels: eigensolves, matrix exponentials,
//! norms and the scenario pipeline building blocks.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semilab_core::eventual::{geometric_grid, minimal_positivity_time, DEFAULT_EPS};
use semilab_core::linalg::{expm, spectral_norm, sym_eig, sym_tridiag_eigenvalues};
use semilab_core::scenarios::{
    lorentzian_well_potential, nonlocal_laplace_interval, schrodinger_1d,
};
use semilab_core::semigroup::equilibrium_projection;

fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    0.5 * (&raw + raw.transpose())
}

fn bench_sym_eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("sym_eig");
    for &n in &[60usize, 120, 240] {
        let a = random_symmetric(n, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| sym_eig(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn bench_tridiagonal_eigenvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("tridiag_eigenvalues");
    for &n in &[500usize, 2000] {
        let diag = vec![-2.0; n];
        let off = vec![1.0; n - 1];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| sym_tridiag_eigenvalues(black_box(&diag), black_box(&off)).unwrap())
        });
    }
    group.finish();
}

fn bench_expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    let n = 120;
    let sym = random_symmetric(n, 11);
    group.bench_function("symmetric_120", |b| {
        b.iter(|| expm(black_box(&sym), 1.0).unwrap())
    });
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let general = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    group.bench_function("general_120", |b| {
        b.iter(|| expm(black_box(&general), 1.0).unwrap())
    });
    group.finish();
}

fn bench_spectral_norm(c: &mut Criterion) {
    let a = random_symmetric(200, 17);
    c.bench_function("spectral_norm_200", |b| {
        b.iter(|| spectral_norm(black_box(&a)))
    });
}

fn bench_scenarios(c: &mut Criterion) {
    c.bench_function("schrodinger_projection_2000", |b| {
        b.iter(|| {
            let g = schrodinger_1d(lorentzian_well_potential, 20.0, 2000).unwrap();
            equilibrium_projection(black_box(&g)).unwrap()
        })
    });
    c.bench_function("endpoint_coupling_scan_100", |b| {
        let g = nonlocal_laplace_interval(100).unwrap();
        let grid = geometric_grid(1e-4, 10.0, 24);
        b.iter(|| minimal_positivity_time(black_box(&g), &grid, DEFAULT_EPS).unwrap())
    });
}

criterion_group!(
    benches,
    bench_sym_eig,
    bench_tridiagonal_eigenvalues,
    bench_expm,
    bench_spectral_norm,
    bench_scenarios
);
criterion_main!(benches);
