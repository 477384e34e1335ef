//! Benchmarks for the numerical hot paths: diagonalization, portrait
//! evaluation, coefficient extraction, reconstruction, and sampling.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use qportrait::measure::measure_series_stream;
use qportrait::multiqubit::{
    counter_distribution, pauli_coefficients, reconstruct_from_distributions, AxisSetting,
};
use qportrait::linalg::hermitian_eig;
use qportrait::qudit::{portrait_distribution, resolution_of_identity};
use qportrait::random::{random_density, random_hermitian, random_roi};

fn bench_hermitian_eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eig");
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    for dim in [2, 4, 8, 16] {
        let matrix = random_hermitian(dim, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &matrix, |b, m| {
            b.iter(|| hermitian_eig(m).unwrap())
        });
    }
    group.finish();
}

fn bench_resolution_of_identity(c: &mut Criterion) {
    let mut group = c.benchmark_group("resolution_of_identity");
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    for dim in [2, 4, 8] {
        let rho = random_density(dim, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &rho, |b, r| {
            b.iter(|| resolution_of_identity(r.matrix()).unwrap())
        });
    }
    group.finish();
}

fn bench_portrait_distribution(c: &mut Criterion) {
    let mut group = c.benchmark_group("portrait_distribution");
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for dim in [2, 4, 8] {
        let rho = random_density(dim, &mut rng);
        let roi = random_roi(dim, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &(rho, roi), |b, (r, bank)| {
            b.iter(|| portrait_distribution(r, bank).unwrap())
        });
    }
    group.finish();
}

fn bench_pauli_coefficients(c: &mut Criterion) {
    let mut group = c.benchmark_group("pauli_coefficients");
    let mut rng = ChaCha12Rng::seed_from_u64(4);
    for qubits in [2, 3, 4] {
        let rho = random_density(1 << qubits, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(qubits), &rho, |b, r| {
            b.iter(|| pauli_coefficients(r).unwrap())
        });
    }
    group.finish();
}

fn bench_reconstruction(c: &mut Criterion) {
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let qubits = 2;
    let rho = random_density(1 << qubits, &mut rng);
    let distributions: Vec<(AxisSetting, Vec<f64>)> = AxisSetting::all(qubits)
        .into_iter()
        .map(|setting| {
            let distribution = counter_distribution(&rho, &setting.configuration()).unwrap();
            (setting, distribution)
        })
        .collect();
    c.bench_function("reconstruct_from_distributions/2", |b| {
        b.iter(|| reconstruct_from_distributions(&distributions, qubits, false).unwrap())
    });
}

fn bench_measurement_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("measure_series_stream");
    let mut rng = ChaCha12Rng::seed_from_u64(6);
    let rho = random_density(4, &mut rng);
    let roi = random_roi(4, &mut rng);
    for shots in [1000usize, 10000] {
        group.bench_with_input(BenchmarkId::from_parameter(shots), &shots, |b, &k| {
            b.iter(|| measure_series_stream(&rho, &roi, k, "bench", 42, 0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_hermitian_eig,
    bench_resolution_of_identity,
    bench_portrait_distribution,
    bench_pauli_coefficients,
    bench_reconstruction,
    bench_measurement_sampling
);
criterion_main!(benches);
