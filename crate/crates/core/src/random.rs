//! Seeded random matrices, states, and counter banks.
//!
//! Everything here is driven by an explicit RNG so that property tests and
//! benchmarks replay bit-for-bit. Unitaries are Haar-distributed (QR of a
//! Ginibre matrix with the positive-diagonal convention); densities are
//! normalized Wishart matrices, full-rank almost surely.

use crate::linalg::{inner, vector_norm, CMatrix};
use crate::qudit::{resolution_of_identity, DensityMatrix, PureState, ResolutionOfIdentity};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;

/// One standard normal variate (Box-Muller).
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

fn normal_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Ginibre matrix: iid standard complex normal entries.
pub fn random_matrix(dim: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| normal_complex(rng))
}

/// Random Hermitian matrix `(G + G')/2`.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> CMatrix {
    random_matrix(dim, rng).hermitize()
}

/// Haar-distributed unitary: modified Gram-Schmidt of a Ginibre matrix,
/// which fixes the R factor's diagonal real positive.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = random_matrix(dim, rng);
    let mut columns: Vec<Vec<Complex64>> = (0..dim).map(|j| g.column(j)).collect();
    for j in 0..dim {
        for i in 0..j {
            let overlap = inner(&columns[i], &columns[j]);
            for k in 0..dim {
                let prev = columns[i][k];
                columns[j][k] -= overlap * prev;
            }
        }
        let norm = vector_norm(&columns[j]);
        assert!(norm > 0.0, "Ginibre matrix is singular");
        for k in 0..dim {
            columns[j][k] /= norm;
        }
    }
    CMatrix::from_fn(dim, dim, |i, j| columns[j][i])
}

/// Uniformly random pure state.
pub fn random_pure(dim: usize, rng: &mut impl Rng) -> PureState {
    let amplitudes: Vec<Complex64> = (0..dim).map(|_| normal_complex(rng)).collect();
    PureState::normalized(amplitudes).expect("normal vector has positive norm")
}

/// Full-rank random density matrix `GG'/tr(GG')`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = random_matrix(dim, rng);
    let w = g.mul(&g.adjoint());
    let trace = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / trace)).expect("Wishart matrix is a valid state")
}

/// Random rank-1 counter bank: the eigenbasis of a random Hermitian
/// matrix, which is nondegenerate almost surely.
pub fn random_roi(dim: usize, rng: &mut impl Rng) -> ResolutionOfIdentity {
    resolution_of_identity(&random_hermitian(dim, rng)).expect("Hermitian by construction")
}

/// Uniformly random point on the unit sphere.
pub fn random_director(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-6 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::series_rng;
    use crate::qudit::portrait_distribution;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = series_rng(1);
        for dim in 2..=6 {
            let u = random_unitary(dim, &mut rng);
            assert!(u.unitarity_deviation() < 1e-12, "dim {dim}");
        }
    }

    #[test]
    fn random_density_is_valid_and_full_rank() {
        let mut rng = series_rng(2);
        let rho = random_density(5, &mut rng);
        let eigen = rho.eigenvalues().unwrap();
        assert!(eigen.iter().all(|&v| v > 1e-8));
        assert!((eigen.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_roi_carries_valid_portraits() {
        let mut rng = series_rng(3);
        let roi = random_roi(4, &mut rng);
        let rho = random_density(4, &mut rng);
        let p = portrait_distribution(&rho, &roi).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn portrait_bounds_hold_across_random_inputs() {
        let mut rng = series_rng(4);
        for dim in 2..=8 {
            let rho = random_density(dim, &mut rng);
            for _ in 0..20 {
                let psi = random_pure(dim, &mut rng);
                let p = crate::qudit::phase_portrait_value(&rho, &psi).unwrap();
                assert!((0.0..=1.0).contains(&p));
            }
        }
    }

    #[test]
    fn directors_are_unit_length() {
        let mut rng = series_rng(5);
        for _ in 0..100 {
            let m = random_director(&mut rng);
            let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}
