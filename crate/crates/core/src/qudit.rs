//! Qudit states, observables, and phase portraits.
//!
//! The phase portrait of a state assigns to every pure state `psi` the
//! probability `p(psi) = tr(P_psi rho)` of finding the system there. Against
//! the state's own eigenbasis the portrait reproduces the eigenvalues;
//! against any other resolution of identity it gives the measured outcome
//! distribution. This module owns the state types, spectral resolutions,
//! the generalized Pauli basis, and the basis-transform matrices that
//! connect different counters.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, inner, outer, phase_fix, trace_product, vector_norm, CMatrix,
    SpectralDecomposition,
};
use crate::tolerance;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized within tolerance.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vector_norm(&amplitudes);
        if (norm - 1.0).abs() > tolerance::scaled(tolerance::UNIT_NORM) {
            return Err(Error::NotNormalized { sum: norm });
        }
        Ok(PureState { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vector_norm(&amplitudes);
        if norm <= 0.0 {
            return Err(Error::NotNormalized { sum: 0.0 });
        }
        Ok(PureState {
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Computational basis vector `|k>`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, bound: dim });
        }
        let mut amplitudes = vec![c(0.0, 0.0); dim];
        amplitudes[k] = c(1.0, 0.0);
        Ok(PureState { amplitudes })
    }

    /// Qubit state pointing along the unit director `m`.
    pub fn from_director(m: [f64; 3]) -> Result<Self> {
        let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
        if (norm - 1.0).abs() > tolerance::scaled(tolerance::DIRECTOR_UNIT) {
            return Err(Error::BadDirector { norm });
        }
        let theta = (m[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = m[1].atan2(m[0]);
        let (half_sin, half_cos) = (theta / 2.0).sin_cos();
        PureState::new(vec![c(half_cos, 0.0), Complex64::from_polar(half_sin, phi)])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Rank-1 projector `|psi><psi|`.
    pub fn projector(&self) -> CMatrix {
        outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

/// Validated density matrix: Hermitian, unit trace, eigenvalues above the
/// negativity floor.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > tolerance::scaled(tolerance::HERMITICITY) {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tolerance::scaled(tolerance::UNIT_TRACE) {
            return Err(Error::NonUnitTrace { trace });
        }
        let dec = hermitian_eig(&matrix)?;
        if let Some(&lowest) = dec.eigenvalues.last() {
            if lowest < -tolerance::scaled(tolerance::EIGENVALUE_FLOOR) {
                return Err(Error::NegativeEigenvalue { value: lowest });
            }
        }
        Ok(DensityMatrix { matrix: matrix.hermitize() })
    }

    pub fn from_pure(state: &PureState) -> Self {
        DensityMatrix { matrix: state.projector() }
    }

    /// Maximally mixed state `I/N`.
    pub fn equilibrium(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix)?.eigenvalues)
    }

    /// `tr(rho^2)`; 1 for pure states, `1/N` at equilibrium.
    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    /// Bloch director of a qubit state: `d_a = <sigma_a>`.
    pub fn qubit_director(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, actual: self.dim() });
        }
        let m = &self.matrix;
        Ok([
            (m[(0, 1)] + m[(1, 0)]).re,
            (m[(1, 0)] - m[(0, 1)]).im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
    }
}

/// Complete family of orthogonal projectors summing to the identity.
///
/// Projectors are rank-1 when the resolution comes from a nondegenerate
/// spectral decomposition, but coarse (higher-rank) members are allowed;
/// operations that need rank-1 members report `CoarseProjector` otherwise.
#[derive(Debug, Clone)]
pub struct ResolutionOfIdentity {
    dim: usize,
    projectors: Vec<CMatrix>,
}

impl ResolutionOfIdentity {
    pub fn new(dim: usize, projectors: Vec<CMatrix>) -> Result<Self> {
        for (k, p) in projectors.iter().enumerate() {
            if !p.is_square() || p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: p.rows() });
            }
            let dev = p.hermiticity_deviation();
            if dev > tolerance::scaled(tolerance::HERMITICITY) {
                return Err(Error::NotHermitian { deviation: dev });
            }
            let idem = p.mul(p).max_abs_diff(p);
            if idem > tolerance::scaled(tolerance::RESOLUTION_ORTHOGONALITY) {
                return Err(Error::InvalidResolution {
                    detail: format!("projector {k} is not idempotent (residual {idem:.3e})"),
                });
            }
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                let cross = projectors[i].mul(&projectors[j]).max_abs();
                if cross > tolerance::scaled(tolerance::RESOLUTION_ORTHOGONALITY) {
                    return Err(Error::InvalidResolution {
                        detail: format!("projectors {i} and {j} overlap (max entry {cross:.3e})"),
                    });
                }
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for p in &projectors {
            sum = &sum + p;
        }
        let completeness = sum.max_abs_diff(&CMatrix::identity(dim));
        if completeness > tolerance::scaled(tolerance::RESOLUTION_COMPLETENESS) {
            return Err(Error::InvalidResolution {
                detail: format!("projectors sum to I only within {completeness:.3e}"),
            });
        }
        Ok(ResolutionOfIdentity { dim, projectors })
    }

    fn from_decomposition(dec: &SpectralDecomposition) -> Self {
        ResolutionOfIdentity {
            dim: dec.dim(),
            projectors: dec.eigenvectors.iter().map(|v| outer(v, v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projector(&self, k: usize) -> &CMatrix {
        &self.projectors[k]
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    /// Rank of member `k`, read off the trace.
    pub fn rank(&self, k: usize) -> usize {
        self.projectors[k].trace().re.round().max(0.0) as usize
    }

    pub fn is_rank_one(&self) -> bool {
        (0..self.len()).all(|k| self.rank(k) == 1)
    }

    /// The canonical (phase-fixed) unit vector of a rank-1 member.
    pub fn vector(&self, k: usize) -> Result<Vec<Complex64>> {
        let p = &self.projectors[k];
        let rank = self.rank(k);
        if rank != 1 {
            return Err(Error::CoarseProjector { index: k, rank });
        }
        // The column through the largest diagonal entry carries the vector.
        let mut jmax = 0;
        let mut best = -1.0;
        for j in 0..self.dim {
            let d = p[(j, j)].re;
            if d > best {
                best = d;
                jmax = j;
            }
        }
        let scale = 1.0 / best.sqrt();
        let mut v: Vec<Complex64> = (0..self.dim).map(|i| p[(i, jmax)] * scale).collect();
        phase_fix(&mut v);
        debug_assert!(outer(&v, &v).max_abs_diff(p) < 1e-9);
        Ok(v)
    }
}

/// Spectral resolution of a Hermitian matrix: rank-1 projectors ordered by
/// descending eigenvalue, with deterministic tie-breaking and phase fixing.
pub fn resolution_of_identity(x: &CMatrix) -> Result<ResolutionOfIdentity> {
    Ok(ResolutionOfIdentity::from_decomposition(&hermitian_eig(x)?))
}

/// Hermitian observable with its spectral data computed once on
/// construction.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    resolution: ResolutionOfIdentity,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dec = hermitian_eig(&matrix)?;
        let resolution = ResolutionOfIdentity::from_decomposition(&dec);
        Ok(Observable {
            matrix: matrix.hermitize(),
            eigenvalues: dec.eigenvalues,
            resolution,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues in descending order, aligned with `resolution()`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn resolution(&self) -> &ResolutionOfIdentity {
        &self.resolution
    }
}

/// Generalized Pauli basis of an N-level system.
///
/// Index rule `p = n + m*N` over ordered pairs `(n, m)`:
/// `p = 0` is the identity; the remaining diagonal slots `p = m*(N+1)` hold
/// the diagonal traceless generators normalized to `tr(b^2) = 2`; position
/// `(n, m)` with `n < m` holds the symmetric pair matrix
/// `|n><m| + |m><n|` and with `n > m` the antisymmetric one
/// `i|n><m| - i|m><n|`. For N = 2 this is the ordinary Pauli set.
#[derive(Debug, Clone)]
pub struct PauliBasis {
    dim: usize,
    matrices: Vec<CMatrix>,
    norms: Vec<f64>,
}

/// Builds the generalized Pauli basis for dimension `n`.
pub fn build_pauli_basis(n: usize) -> Result<PauliBasis> {
    if n < 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: n });
    }
    let mut matrices = Vec::with_capacity(n * n);
    let mut norms = Vec::with_capacity(n * n);
    for p in 0..n * n {
        let (row, col) = (p % n, p / n);
        let (matrix, norm) = if p == 0 {
            (CMatrix::identity(n), n as f64)
        } else if row == col {
            let d = row;
            let scale = (2.0 / (d * (d + 1)) as f64).sqrt();
            let mut m = CMatrix::zeros(n, n);
            for i in 0..d {
                m[(i, i)] = c(scale, 0.0);
            }
            m[(d, d)] = c(-(d as f64) * scale, 0.0);
            (m, 2.0)
        } else {
            let (lo, hi) = (row.min(col), row.max(col));
            let mut m = CMatrix::zeros(n, n);
            if row < col {
                m[(lo, hi)] = c(1.0, 0.0);
                m[(hi, lo)] = c(1.0, 0.0);
            } else {
                m[(hi, lo)] = c(0.0, 1.0);
                m[(lo, hi)] = c(0.0, -1.0);
            }
            (m, 2.0)
        };
        matrices.push(matrix);
        norms.push(norm);
    }
    Ok(PauliBasis { dim: n, matrices, norms })
}

impl PauliBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis matrices, `N^2`.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrix(&self, p: usize) -> &CMatrix {
        &self.matrices[p]
    }

    /// `M_p = tr(b_p^2)`.
    pub fn norm(&self, p: usize) -> f64 {
        self.norms[p]
    }

    /// Coefficients `A_p = tr(b_p A) / M_p` of a Hermitian matrix, so that
    /// `A = sum_p A_p b_p`.
    pub fn expansion_coefficients(&self, a: &CMatrix) -> Result<Vec<f64>> {
        let dev = a.hermiticity_deviation();
        if dev > tolerance::scaled(tolerance::HERMITICITY) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: a.dim() });
        }
        Ok((0..self.len())
            .map(|p| trace_product(&self.matrices[p], a).re / self.norms[p])
            .collect())
    }

    /// Directors `d_p = tr(rho b_p)`; `d_0 = 1` for any state.
    pub fn directors(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: rho.dim() });
        }
        Ok((0..self.len())
            .map(|p| trace_product(&self.matrices[p], rho.matrix()).re)
            .collect())
    }

    /// Reassembles `sum_p (d_p / M_p) b_p`; inverse of [`Self::directors`].
    pub fn matrix_from_directors(&self, directors: &[f64]) -> Result<CMatrix> {
        if directors.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: directors.len() });
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (p, &d) in directors.iter().enumerate() {
            if d != 0.0 {
                m = &m + &self.matrices[p].scale_real(d / self.norms[p]);
            }
        }
        Ok(m)
    }
}

/// `<A> = tr(A rho)` for a Hermitian `a`.
pub fn expectation(a: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    let dev = a.hermiticity_deviation();
    if dev > tolerance::scaled(tolerance::HERMITICITY) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: a.dim() });
    }
    Ok(trace_product(a, rho.matrix()).re)
}

/// `<A>` through the spectral route: eigenvalues of `A`, the portrait of
/// `rho` on its own eigenbasis, and the transform matrix between the two
/// resolutions combine as `sum_{k,k'} A_k p_k' |<k;A|U|k';A>|^2`.
///
/// Agrees with [`expectation`] and exists as the independent second path.
pub fn expectation_via_transform(a: &Observable, rho: &DensityMatrix) -> Result<f64> {
    let rho_roi = resolution_of_identity(rho.matrix())?;
    let p = portrait_distribution(rho, &rho_roi)?;
    let u = transform_matrix(a.resolution(), &rho_roi)?;
    let a_vectors: Vec<Vec<Complex64>> = (0..a.dim())
        .map(|k| a.resolution().vector(k))
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for (kp, &weight) in p.iter().enumerate() {
        let image = u.apply(&a_vectors[kp]);
        for (k, &value) in a.eigenvalues().iter().enumerate() {
            total += value * weight * inner(&a_vectors[k], &image).norm_sqr();
        }
    }
    Ok(total)
}

/// Unitary carrying one rank-1 resolution onto another, member by member:
/// `U P_k[from] U' = P_k[to]`.
///
/// Column `k` is the canonical vector of `to`'s member `k`, rephased so its
/// overlap with the matching `from` vector is real non-negative (columns
/// with vanishing overlap keep the canonical phase). This pins the free
/// member phases deterministically and reduces to the exact identity when
/// both resolutions coincide.
pub fn transform_matrix(from: &ResolutionOfIdentity, to: &ResolutionOfIdentity) -> Result<CMatrix> {
    if from.dim() != to.dim() {
        return Err(Error::DimensionMismatch { expected: from.dim(), actual: to.dim() });
    }
    if from.len() != to.len() {
        return Err(Error::LengthMismatch { expected: from.len(), actual: to.len() });
    }
    let n = from.dim();
    let mut u = CMatrix::zeros(n, n);
    for k in 0..from.len() {
        let source = from.vector(k)?;
        let mut target = to.vector(k)?;
        let overlap = inner(&source, &target);
        if overlap.norm() > tolerance::ALIGNMENT_FLOOR {
            let phase = overlap.conj() / overlap.norm();
            for e in &mut target {
                *e *= phase;
            }
        }
        u = &u + &outer(&target, &source);
    }
    Ok(u)
}

fn clamp_probability(value: f64) -> Result<f64> {
    if value < -tolerance::PROBABILITY_CLAMP || value > 1.0 + tolerance::PROBABILITY_CLAMP {
        return Err(Error::InvalidProbability { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Portrait value `p(psi) = tr(P_psi rho) = <psi|rho|psi>`, clamped to
/// `[0, 1]` within the probability tolerance.
pub fn phase_portrait_value(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: psi.dim() });
    }
    let image = rho.matrix().apply(psi.amplitudes());
    clamp_probability(inner(psi.amplitudes(), &image).re)
}

/// Outcome distribution of `rho` over a resolution: `p_k = tr(P_k rho)`.
///
/// Works for coarse resolutions as well; the clamped values must sum to 1
/// within the probability-sum tolerance.
pub fn portrait_distribution(rho: &DensityMatrix, roi: &ResolutionOfIdentity) -> Result<Vec<f64>> {
    if roi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: roi.dim() });
    }
    let p: Vec<f64> = roi
        .projectors()
        .iter()
        .map(|proj| clamp_probability(trace_product(proj, rho.matrix()).re))
        .collect::<Result<_>>()?;
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tolerance::scaled(tolerance::PROBABILITY_SUM) {
        return Err(Error::NotNormalized { sum });
    }
    Ok(p)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::diag_real(&[1.0, -1.0])
}

/// `d . sigma`.
pub fn sigma_dot(d: [f64; 3]) -> CMatrix {
    CMatrix::from_rows(&[
        vec![c(d[2], 0.0), c(d[0], -d[1])],
        vec![c(d[0], d[1]), c(-d[2], 0.0)],
    ])
}

/// Qubit density matrix `(I + d . sigma)/2` for a director with `|d| <= 1`.
pub fn qubit_density(d: [f64; 3]) -> Result<DensityMatrix> {
    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if norm > 1.0 + tolerance::scaled(tolerance::DIRECTOR_EXCESS) {
        return Err(Error::DirectorTooLong { norm });
    }
    DensityMatrix::new(&CMatrix::identity(2).scale_real(0.5) + &sigma_dot(d).scale_real(0.5))
}

/// Qubit portrait against a unit counter director:
/// `p(m) = 1/2 + (d . m)/2`.
///
/// Equals [`phase_portrait_value`] of the pure state along `m`; both paths
/// are kept and cross-checked.
pub fn qubit_portrait(rho: &DensityMatrix, m: [f64; 3]) -> Result<f64> {
    let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    if (norm - 1.0).abs() > tolerance::scaled(tolerance::DIRECTOR_UNIT) {
        return Err(Error::BadDirector { norm });
    }
    let d = rho.qubit_director()?;
    clamp_probability(0.5 + 0.5 * (d[0] * m[0] + d[1] * m[1] + d[2] * m[2]))
}

/// Helper shared by portrait code: the projector as a matrix acting on a
/// state, `P_psi rho P_psi / p`, is assembled where needed; here we expose
/// the plain projector comparison used when resolutions are tested for
/// identity.
pub fn projectors_identical(a: &ResolutionOfIdentity, b: &ResolutionOfIdentity) -> bool {
    a.dim() == b.dim()
        && a.len() == b.len()
        && a.projectors()
            .iter()
            .zip(b.projectors())
            .all(|(x, y)| x.max_abs_diff(y) == 0.0)
}
