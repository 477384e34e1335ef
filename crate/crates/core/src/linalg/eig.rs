//! Spectral decompositions.
//!
//! Hermitian matrices are diagonalized with a cyclic complex Jacobi
//! iteration: deterministic, quadratically convergent, and accurate to
//! machine precision at the dimensions this crate works with. Unitary
//! matrices are decomposed through their commuting Hermitian parts
//! `H = (U + U')/2` and `K = (U - U')/(2i)`: eigenspaces of `H` are found
//! first, then `K` is rediagonalized inside each near-degenerate cluster,
//! which yields a joint eigenbasis without a general nonsymmetric solver.

use super::{inner, outer, phase_fix, CMatrix};
use crate::error::{Error, Result};
use crate::tolerance;
use num_complex::Complex64;
use std::f64::consts::PI;

const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius target relative to the matrix norm.
const OFF_TARGET: f64 = 1e-14;
/// `H`-eigenvalue clusters closer than this are rediagonalized jointly.
const CLUSTER_GAP: f64 = 1e-8;

/// Eigenvalues in descending order with a matching orthonormal,
/// phase-fixed eigenbasis: `M = sum_k value_k v_k v_k'`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `sum_k f(value_k) v_k v_k'`.
    pub fn assemble(&self, mut f: impl FnMut(f64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (value, vector) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m = &m + &outer(vector, vector).scale(f(*value));
        }
        m
    }

    pub fn reassemble(&self) -> CMatrix {
        self.assemble(|x| Complex64::new(x, 0.0))
    }
}

/// Eigenphases in `(-pi, pi]`, sorted descending, with a matching
/// orthonormal phase-fixed eigenbasis: `U = sum_k exp(i phase_k) v_k v_k'`.
#[derive(Debug, Clone)]
pub struct UnitaryDecomposition {
    pub phases: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
}

/// Diagonalizes a Hermitian matrix.
///
/// The input must be Hermitian within the scaled hermiticity tolerance; it
/// is symmetrized before iterating so the decomposition is exactly real.
/// Ties between equal eigenvalues are broken by lexicographic order on the
/// phase-fixed eigenvectors, making the output deterministic.
pub fn hermitian_eig(m: &CMatrix) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tolerance::scaled(tolerance::HERMITICITY) {
        return Err(Error::NotHermitian { deviation });
    }
    let dec = jacobi(&m.hermitize())?;
    let residual = dec.reassemble().max_abs_diff(&m.hermitize());
    if residual > tolerance::scaled(tolerance::REASSEMBLY) {
        return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }
    Ok(dec)
}

/// Jacobi iteration on an exactly Hermitian matrix.
fn jacobi(m: &CMatrix) -> Result<SpectralDecomposition> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let scale = 1.0 + a.frobenius_norm();
    let target = OFF_TARGET * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let mut col = v.column(k);
            phase_fix(&mut col);
            (a[(k, k)].re, col)
        })
        .collect();
    pairs.sort_by(|x, y| compare_eigenpairs(x, y));

    Ok(SpectralDecomposition {
        eigenvalues: pairs.iter().map(|(e, _)| *e).collect(),
        eigenvectors: pairs.into_iter().map(|(_, v)| v).collect(),
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += 2.0 * a[(i, j)].norm_sqr();
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= f64::MIN_POSITIVE {
        return;
    }
    let phi = apq.arg();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * r).atan2(app - aqq);
    let (s, c) = theta.sin_cos();
    let eip = Complex64::from_polar(1.0, phi);
    let ein = eip.conj();
    let n = a.dim();

    // A <- V2' A V2 with V2 = [[c, -s], [s e^{-i phi}, c e^{-i phi}]]
    // applied to the (p, q) plane; columns first, then rows.
    for j in 0..n {
        let ajp = a[(j, p)];
        let ajq = a[(j, q)];
        a[(j, p)] = ajp * c + ajq * (ein * s);
        a[(j, q)] = ajp * (-s) + ajq * (ein * c);
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c + aqj * (eip * s);
        a[(q, j)] = apj * (-s) + aqj * (eip * c);
    }
    // Clean the annihilated pair and keep the diagonal exactly real.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for j in 0..n {
        let vjp = v[(j, p)];
        let vjq = v[(j, q)];
        v[(j, p)] = vjp * c + vjq * (ein * s);
        v[(j, q)] = vjp * (-s) + vjq * (ein * c);
    }
}

/// Descending by eigenvalue; exact ties fall back to vector lexicographic
/// order on `(re, im)` pairs.
fn compare_eigenpairs(x: &(f64, Vec<Complex64>), y: &(f64, Vec<Complex64>)) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match y.0.partial_cmp(&x.0).unwrap_or(Ordering::Equal) {
        Ordering::Equal => {}
        other => return other,
    }
    for (a, b) in x.1.iter().zip(&y.1) {
        match a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            other => return other,
        }
        match a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    Ordering::Equal
}

/// Diagonalizes a unitary matrix into eigenphases and a joint eigenbasis.
///
/// Phases use the principal branch `(-pi, pi]`; an eigenvalue exactly on the
/// negative real axis reports `+pi`. Output is sorted by descending phase
/// with the same deterministic tie-breaking as [`hermitian_eig`].
pub fn unitary_eig(u: &CMatrix) -> Result<UnitaryDecomposition> {
    if !u.is_square() {
        return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
    }
    let deviation = u.unitarity_deviation();
    if deviation > tolerance::scaled(tolerance::UNITARITY) {
        return Err(Error::NotUnitary { deviation });
    }
    let n = u.dim();
    let h = &(u + &u.adjoint()).scale_real(0.5);
    let k = (u - &u.adjoint()).scale(Complex64::new(0.0, -0.5));
    let h_dec = jacobi(&h.hermitize())?;

    // Rediagonalize K inside every near-degenerate eigenvalue cluster of H.
    let mut vectors: Vec<Vec<Complex64>> = h_dec.eigenvectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && h_dec.eigenvalues[end - 1] - h_dec.eigenvalues[end] <= CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            let cluster = &vectors[start..end];
            let kv: Vec<Vec<Complex64>> = cluster.iter().map(|v| k.apply(v)).collect();
            let small = CMatrix::from_fn(end - start, end - start, |i, j| inner(&cluster[i], &kv[j]));
            let small_dec = jacobi(&small.hermitize())?;
            let rotated: Vec<Vec<Complex64>> = small_dec
                .eigenvectors
                .iter()
                .map(|w| {
                    let mut out = vec![Complex64::new(0.0, 0.0); n];
                    for (a, basis) in w.iter().zip(cluster) {
                        for (o, b) in out.iter_mut().zip(basis) {
                            *o += a * b;
                        }
                    }
                    phase_fix(&mut out);
                    out
                })
                .collect();
            vectors[start..end].clone_from_slice(&rotated);
        }
        start = end;
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = vectors
        .into_iter()
        .map(|v| {
            let uv = u.apply(&v);
            let mu = inner(&v, &uv);
            let mut phase = mu.arg();
            if phase == -PI {
                phase = PI;
            }
            (phase, v)
        })
        .collect();
    pairs.sort_by(|x, y| compare_eigenpairs(x, y));

    let dec = UnitaryDecomposition {
        phases: pairs.iter().map(|(p, _)| *p).collect(),
        eigenvectors: pairs.into_iter().map(|(_, v)| v).collect(),
    };

    let mut rebuilt = CMatrix::zeros(n, n);
    for (phase, vector) in dec.phases.iter().zip(&dec.eigenvectors) {
        rebuilt = &rebuilt + &outer(vector, vector).scale(Complex64::from_polar(1.0, *phase));
    }
    let residual = rebuilt.max_abs_diff(u);
    if residual > tolerance::scaled(tolerance::REASSEMBLY) {
        return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }
    Ok(dec)
}

/// `U = exp(iJ)` for a Hermitian generator `J`, via spectral calculus.
pub fn unitary_from_generator(j: &CMatrix) -> Result<CMatrix> {
    let dec = hermitian_eig(j)?;
    Ok(dec.assemble(|x| Complex64::from_polar(1.0, x)))
}

/// The traceless Hermitian generator of a unitary: eigenphases on the
/// principal branch, shifted by their mean so the trace vanishes, then
/// reassembled on the joint eigenbasis. `unitary_from_generator` applied to
/// the result reproduces `U` up to the global phase `exp(-i mean)`.
pub fn generator_from_unitary(u: &CMatrix) -> Result<CMatrix> {
    let dec = unitary_eig(u)?;
    let mean = dec.phases.iter().sum::<f64>() / dec.phases.len() as f64;
    let n = u.dim();
    let mut j = CMatrix::zeros(n, n);
    for (phase, vector) in dec.phases.iter().zip(&dec.eigenvectors) {
        j = &j + &outer(vector, vector).scale_real(phase - mean);
    }
    Ok(j.hermitize())
}
