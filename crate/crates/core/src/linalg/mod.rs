//! Dense complex matrices and vectors.
//!
//! Everything in the crate is carried by [`CMatrix`], a row-major dense
//! matrix over `Complex64`. Dimensions stay small (products of qudit levels,
//! at most a few thousand), so the naive kernels here are both fast enough
//! and easy to audit. Dimension agreement inside this module is a programmer
//! contract and panics on violation; fallible validation happens at the
//! public API boundaries that accept user data.

mod eig;

pub use eig::{
    generator_from_unitary, hermitian_eig, unitary_eig, unitary_from_generator,
    SpectralDecomposition, UnitaryDecomposition,
};

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows of `(re, im)` pairs; rows must be equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        CMatrix::diag(&entries.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix; panics if the matrix is not square.
    pub fn dim(&self) -> usize {
        assert!(self.is_square(), "matrix is {}x{}, not square", self.rows, self.cols);
        self.rows
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                // Structured operators (projectors, diagonal generators) are
                // mostly zeros; skipping them keeps chained products cheap.
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        let mut out = self.clone();
        for e in &mut out.data {
            *e *= factor;
        }
        out
    }

    pub fn scale_real(&self, factor: f64) -> CMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// `(M + M')/2`; removes floating-point asymmetry from Hermitian matrices.
    pub fn hermitize(&self) -> CMatrix {
        assert!(self.is_square(), "hermitize of a non-square matrix");
        CMatrix::from_fn(self.rows, self.rows, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max `|M - M'|` entry; zero for exactly Hermitian matrices.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square(), "hermiticity of a non-square matrix");
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Max `|U'U - I|` entry; zero for exactly unitary matrices.
    pub fn unitarity_deviation(&self) -> f64 {
        assert!(self.is_square(), "unitarity of a non-square matrix");
        let gram = self.adjoint().mul(self);
        gram.max_abs_diff(&CMatrix::identity(self.rows))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        kron(self, other)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::mul(self, rhs)
    }
}

impl Mul<Complex64> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: Complex64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: f64) -> CMatrix {
        self.scale_real(rhs)
    }
}

/// Kronecker product; the second factor indexes fastest:
/// `kron(A, B)[i*rb + k, j*cb + l] = A[i,j] * B[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Traces out the slow factor of a composite index `r = f + s*n_fast`,
/// keeping the fast one: `out[f, f'] = sum_s M[f + s*n_fast, f' + s*n_fast]`.
pub fn trace_out_slow(m: &CMatrix, n_fast: usize, n_slow: usize) -> CMatrix {
    assert_eq!(m.dim(), n_fast * n_slow, "dimensions do not factorize");
    CMatrix::from_fn(n_fast, n_fast, |f, fp| {
        (0..n_slow).map(|s| m[(f + s * n_fast, fp + s * n_fast)]).sum()
    })
}

/// Traces out the fast factor of a composite index `r = f + s*n_fast`,
/// keeping the slow one: `out[s, s'] = sum_f M[f + s*n_fast, f + s'*n_fast]`.
pub fn trace_out_fast(m: &CMatrix, n_fast: usize, n_slow: usize) -> CMatrix {
    assert_eq!(m.dim(), n_fast * n_slow, "dimensions do not factorize");
    CMatrix::from_fn(n_slow, n_slow, |s, sp| {
        (0..n_fast).map(|f| m[(f + s * n_fast, f + sp * n_fast)]).sum()
    })
}

/// `tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    assert_eq!(a.rows, b.cols, "product is not square");
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..a.rows {
        for j in 0..a.cols {
            sum += a[(i, j)] * b[(j, i)];
        }
    }
    sum
}

/// Hermitian inner product `<u, v> = sum conj(u_i) v_i`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    assert_eq!(u.len(), v.len(), "vector lengths differ");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
}

/// Outer product `u v'`.
pub fn outer(u: &[Complex64], v: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// Canonical phase convention: the first component of largest magnitude is
/// made real and non-negative. Magnitudes within one part in 1e12 of the
/// maximum count as ties and resolve to the earliest index, so analytic
/// ties (e.g. balanced superpositions) don't flip on rounding noise.
/// Applying it twice is a no-op, and any two vectors differing only by a
/// global phase map to the same representative.
pub fn phase_fix(v: &mut [Complex64]) {
    let best = v.iter().map(|e| e.norm()).fold(0.0, f64::max);
    if best <= 0.0 {
        return;
    }
    let cutoff = best * (1.0 - 1e-12);
    let imax = v
        .iter()
        .position(|e| e.norm() >= cutoff)
        .expect("max magnitude exists");
    let mag = v[imax].norm();
    let phase = v[imax].conj() / mag;
    for e in v.iter_mut() {
        *e *= phase;
    }
    v[imax] = Complex64::new(mag, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_matches_hand_computation() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]]);
        let b = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, -1.0)]]);
        let ab = a.mul(&b);
        assert_eq!(ab[(0, 0)], c(0.0, 1.0));
        assert_eq!(ab[(0, 1)], c(2.0, 0.0));
        assert_eq!(ab[(1, 0)], c(0.0, 0.0));
        assert_eq!(ab[(1, 1)], c(2.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 2.0), c(3.0, 4.0)], vec![c(5.0, 6.0), c(7.0, 8.0)]]);
        let ad = a.adjoint();
        assert_eq!(ad[(0, 1)], c(5.0, -6.0));
        assert_eq!(ad[(1, 0)], c(3.0, -4.0));
    }

    #[test]
    fn kron_of_pauli_z_with_identity() {
        let sz = CMatrix::diag_real(&[1.0, -1.0]);
        let id = CMatrix::identity(2);
        let m = kron(&sz, &id);
        let expect = CMatrix::diag_real(&[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(m.max_abs_diff(&expect), 0.0);
    }

    #[test]
    fn kron_is_associative() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(0.5, 0.0), c(1.0, -1.0)]]);
        let b = CMatrix::diag_real(&[1.0, -1.0]);
        let d = CMatrix::from_rows(&[vec![c(0.0, 1.0), c(2.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        assert!(left.max_abs_diff(&right) < 1e-15);
    }

    #[test]
    fn trace_of_kron_factorizes() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.5), c(0.0, 2.0)], vec![c(0.5, 0.0), c(2.0, -1.0)]]);
        let b = CMatrix::from_rows(&[vec![c(0.5, 0.0), c(1.0, 0.0)], vec![c(0.0, 1.0), c(1.5, 0.0)]]);
        let lhs = kron(&a, &b).trace();
        let rhs = a.trace() * b.trace();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn partial_traces_undo_kron() {
        // Composite r = f + s*n_fast matches kron(slow, fast).
        let fast = CMatrix::from_rows(&[vec![c(0.7, 0.0), c(0.1, 0.2)], vec![c(0.1, -0.2), c(0.3, 0.0)]]);
        let slow = CMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.2, 0.1), c(0.0, 0.0)],
            vec![c(0.2, -0.1), c(0.3, 0.0), c(0.1, 0.0)],
            vec![c(0.0, 0.0), c(0.1, 0.0), c(0.2, 0.0)],
        ]);
        let composite = kron(&slow, &fast);
        let kept_fast = trace_out_slow(&composite, 2, 3);
        let kept_slow = trace_out_fast(&composite, 2, 3);
        assert!(kept_fast.max_abs_diff(&fast.scale(slow.trace())) < 1e-14);
        assert!(kept_slow.max_abs_diff(&slow.scale(fast.trace())) < 1e-14);
    }

    #[test]
    fn phase_fix_is_canonical() {
        let phase = Complex64::from_polar(1.0, 0.73);
        let mut v1 = vec![c(0.3, 0.4), c(0.5, -0.1)];
        let mut v2: Vec<Complex64> = v1.iter().map(|e| e * phase).collect();
        phase_fix(&mut v1);
        phase_fix(&mut v2);
        for (a, b) in v1.iter().zip(&v2) {
            assert!((a - b).norm() < 1e-14);
        }
        // Anchor entry ends exactly real non-negative.
        assert_eq!(v1[1].im, 0.0);
        assert!(v1[1].re > 0.0);
    }

    #[test]
    fn unitarity_deviation_detects_both_cases() {
        let h = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(-1.0, 0.0)],
        ])
        .scale_real(std::f64::consts::FRAC_1_SQRT_2);
        assert!(h.unitarity_deviation() < 1e-15);
        assert!(h.scale_real(1.1).unitarity_deviation() > 0.1);
    }
}
