//! Bipartite structure of a composite qudit: factor index rule, coarse
//! local projectors, local and conditional states, pair coefficients,
//! entanglement rank, and transform classes.
//!
//! The composite dimension factors as `N = N_L * N_S` with the L index
//! fastest: component `r` carries factor indices `(n, p) = (r % N_L,
//! r / N_L)`. Every kron composition here is fixed to realize this
//! layout; the public API speaks in (L, S) labels and hides the
//! argument ordering.

use crate::error::{Error, Result};
use crate::linalg::{
    generator_from_unitary, hermitian_eig, kron, trace_out_fast, trace_out_slow, trace_product,
    CMatrix,
};
use crate::qudit::{build_pauli_basis, expectation, DensityMatrix, PureState, ResolutionOfIdentity};
use crate::tolerance::{
    scaled, CONDITION_FLOOR, CROSS_TERM, DIRECTOR_UNIT, RANK_FLOOR, RANK_RELATIVE,
    STABILIZER_OFFDIAG, UNITARITY,
};
use num_complex::Complex64;

/// Which factor of the composite a local operation addresses. L is the
/// fast index (qubit 0 for a qubit pair), S the slow one (qubit 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    L,
    S,
}

/// Dimensions of the two factors and the index rule `r(n, p) = n + p * N_L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteLayout {
    n_l: usize,
    n_s: usize,
}

impl BipartiteLayout {
    /// A layout with both factors of dimension at least 2.
    pub fn new(n_l: usize, n_s: usize) -> Result<Self> {
        for dim in [n_l, n_s] {
            if dim < 2 {
                return Err(Error::DimensionMismatch { expected: 2, actual: dim });
            }
        }
        Ok(BipartiteLayout { n_l, n_s })
    }

    pub fn n_l(&self) -> usize {
        self.n_l
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn dim(&self) -> usize {
        self.n_l * self.n_s
    }

    /// Composite component index of factor components `(n, p)`.
    pub fn index(&self, n: usize, p: usize) -> usize {
        assert!(n < self.n_l && p < self.n_s, "factor index out of range");
        n + p * self.n_l
    }

    /// Factor components `(n, p)` of composite index `r`; inverse of [`Self::index`].
    pub fn split(&self, r: usize) -> (usize, usize) {
        assert!(r < self.dim(), "composite index out of range");
        (r % self.n_l, r / self.n_l)
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual });
        }
        Ok(())
    }

    fn check_factor(&self, factor: Factor, actual: usize) -> Result<()> {
        let expected = match factor {
            Factor::L => self.n_l,
            Factor::S => self.n_s,
        };
        if actual != expected {
            return Err(Error::DimensionMismatch { expected, actual });
        }
        Ok(())
    }

    /// `m` acting on the L factor alone.
    pub fn embed_l(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_factor(Factor::L, m.rows())?;
        Ok(kron(&CMatrix::identity(self.n_s), m))
    }

    /// `m` acting on the S factor alone.
    pub fn embed_s(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_factor(Factor::S, m.rows())?;
        Ok(kron(m, &CMatrix::identity(self.n_l)))
    }

    /// The product operator `l` on L times `s` on S.
    pub fn embed_pair(&self, l: &CMatrix, s: &CMatrix) -> Result<CMatrix> {
        self.check_factor(Factor::L, l.rows())?;
        self.check_factor(Factor::S, s.rows())?;
        Ok(kron(s, l))
    }

    /// The product pure state with amplitudes `l[n] * s[p]` at `r(n, p)`.
    pub fn product_state(&self, l: &PureState, s: &PureState) -> Result<PureState> {
        self.check_factor(Factor::L, l.dim())?;
        self.check_factor(Factor::S, s.dim())?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.dim()];
        for p in 0..self.n_s {
            for n in 0..self.n_l {
                amplitudes[self.index(n, p)] = l.amplitudes()[n] * s.amplitudes()[p];
            }
        }
        PureState::new(amplitudes)
    }
}

/// Coarse local projectors of a rank-1 bank: `P_n[L] = sum_p P_{r(n,p)}`
/// and `P_p[S] = sum_n P_{r(n,p)}`.
///
/// Mutual orthogonality of the fine bank makes the exact identity
/// `P_n[L] P_p[S] = P_{r(n,p)}` hold for every `(n, p)`.
pub fn coarse_local_projectors(
    roi: &ResolutionOfIdentity,
    layout: &BipartiteLayout,
) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    layout.check_dim(roi.dim())?;
    for k in 0..roi.len() {
        let rank = roi.rank(k);
        if rank != 1 {
            return Err(Error::CoarseProjector { index: k, rank });
        }
    }
    let dim = layout.dim();
    let mut coarse_l = vec![CMatrix::zeros(dim, dim); layout.n_l()];
    let mut coarse_s = vec![CMatrix::zeros(dim, dim); layout.n_s()];
    for r in 0..dim {
        let (n, p) = layout.split(r);
        coarse_l[n] = &coarse_l[n] + roi.projector(r);
        coarse_s[p] = &coarse_s[p] + roi.projector(r);
    }
    Ok((coarse_l, coarse_s))
}

/// Slot in the traceless qubit basis for each axis: x, y, z sit at basis
/// indices 2, 1, 3 (stored offsets 1, 0, 2).
const AXIS_SLOT: [usize; 3] = [1, 0, 2];

/// Expectation values of the local and product basis observables: the
/// complete parameterization of a bipartite state.
#[derive(Clone, Debug)]
pub struct PairCoefficients {
    n_l: usize,
    n_s: usize,
    d_l: Vec<f64>,
    d_s: Vec<f64>,
    d_cross: Vec<Vec<f64>>,
}

impl PairCoefficients {
    /// A qubit-pair parameter set from Bloch data: local directors and
    /// the 3x3 correlation matrix, all in (x, y, z) axis order.
    pub fn from_qubit_directors(d0: [f64; 3], d1: [f64; 3], dab: [[f64; 3]; 3]) -> Self {
        let mut c = PairCoefficients {
            n_l: 2,
            n_s: 2,
            d_l: vec![0.0; 3],
            d_s: vec![0.0; 3],
            d_cross: vec![vec![0.0; 3]; 3],
        };
        for a in 0..3 {
            c.d_l[AXIS_SLOT[a]] = d0[a];
            c.d_s[AXIS_SLOT[a]] = d1[a];
            for b in 0..3 {
                c.d_cross[AXIS_SLOT[a]][AXIS_SLOT[b]] = dab[a][b];
            }
        }
        c
    }

    pub fn n_l(&self) -> usize {
        self.n_l
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    /// Coefficients of the traceless L basis; entry `n - 1` belongs to
    /// basis matrix `n`.
    pub fn l_coefficients(&self) -> &[f64] {
        &self.d_l
    }

    /// Coefficients of the traceless S basis.
    pub fn s_coefficients(&self) -> &[f64] {
        &self.d_s
    }

    /// Cross coefficient of basis matrices `n` on L and `p` on S (both 1-based).
    pub fn cross_coefficient(&self, n: usize, p: usize) -> f64 {
        self.d_cross[n - 1][p - 1]
    }

    /// Bloch directors of the two qubits, axis order (x, y, z); `None`
    /// unless both factors are qubits.
    pub fn qubit_directors(&self) -> Option<([f64; 3], [f64; 3])> {
        if (self.n_l, self.n_s) != (2, 2) {
            return None;
        }
        let mut d0 = [0.0; 3];
        let mut d1 = [0.0; 3];
        for a in 0..3 {
            d0[a] = self.d_l[AXIS_SLOT[a]];
            d1[a] = self.d_s[AXIS_SLOT[a]];
        }
        Some((d0, d1))
    }

    /// The 3x3 correlation matrix `d_ab`, axis order (x, y, z); `None`
    /// unless both factors are qubits.
    pub fn qubit_correlation(&self) -> Option<[[f64; 3]; 3]> {
        if (self.n_l, self.n_s) != (2, 2) {
            return None;
        }
        let mut dab = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                dab[a][b] = self.d_cross[AXIS_SLOT[a]][AXIS_SLOT[b]];
            }
        }
        Some(dab)
    }
}

/// Expectations of every local and product basis observable.
pub fn pair_coefficients(rho: &DensityMatrix, layout: &BipartiteLayout) -> Result<PairCoefficients> {
    layout.check_dim(rho.dim())?;
    let basis_l = build_pauli_basis(layout.n_l())?;
    let basis_s = build_pauli_basis(layout.n_s())?;
    let mut d_l = Vec::with_capacity(basis_l.len() - 1);
    for n in 1..basis_l.len() {
        d_l.push(expectation(&layout.embed_l(basis_l.matrix(n))?, rho)?);
    }
    let mut d_s = Vec::with_capacity(basis_s.len() - 1);
    for p in 1..basis_s.len() {
        d_s.push(expectation(&layout.embed_s(basis_s.matrix(p))?, rho)?);
    }
    let mut d_cross = Vec::with_capacity(basis_l.len() - 1);
    for n in 1..basis_l.len() {
        let mut row = Vec::with_capacity(basis_s.len() - 1);
        for p in 1..basis_s.len() {
            let product = layout.embed_pair(basis_l.matrix(n), basis_s.matrix(p))?;
            row.push(expectation(&product, rho)?);
        }
        d_cross.push(row);
    }
    Ok(PairCoefficients { n_l: layout.n_l(), n_s: layout.n_s(), d_l, d_s, d_cross })
}

/// The state with the given pair coefficients.
///
/// Each basis term enters with weight `d / (norm of what multiplies it)`:
/// local terms divide by the partner dimension as well, so that taking
/// expectations returns exactly the stored coefficients.
pub fn density_from_coefficients(c: &PairCoefficients) -> Result<DensityMatrix> {
    let layout = BipartiteLayout::new(c.n_l, c.n_s)?;
    let basis_l = build_pauli_basis(c.n_l)?;
    let basis_s = build_pauli_basis(c.n_s)?;
    let dim = layout.dim();
    let mut m = CMatrix::identity(dim).scale_real(1.0 / dim as f64);
    for n in 1..basis_l.len() {
        let weight = c.d_l[n - 1] / (basis_l.norm(n) * c.n_s as f64);
        m = &m + &layout.embed_l(basis_l.matrix(n))?.scale_real(weight);
    }
    for p in 1..basis_s.len() {
        let weight = c.d_s[p - 1] / (c.n_l as f64 * basis_s.norm(p));
        m = &m + &layout.embed_s(basis_s.matrix(p))?.scale_real(weight);
    }
    for n in 1..basis_l.len() {
        for p in 1..basis_s.len() {
            let weight = c.d_cross[n - 1][p - 1] / (basis_l.norm(n) * basis_s.norm(p));
            m = &m + &layout.embed_pair(basis_l.matrix(n), basis_s.matrix(p))?.scale_real(weight);
        }
    }
    DensityMatrix::new(m)
}

/// The state of one particle: partial trace over the other factor.
pub fn local_density(
    rho: &DensityMatrix,
    layout: &BipartiteLayout,
    which: Factor,
) -> Result<DensityMatrix> {
    layout.check_dim(rho.dim())?;
    let reduced = match which {
        Factor::L => trace_out_slow(rho.matrix(), layout.n_l(), layout.n_s()),
        Factor::S => trace_out_fast(rho.matrix(), layout.n_l(), layout.n_s()),
    };
    DensityMatrix::new(reduced)
}

/// The state of the unmeasured particle after the measured factor is
/// found in the pure `outcome`: wrap by the embedded projector, trace
/// out the measured factor, normalize by the outcome probability.
pub fn conditional_state(
    rho: &DensityMatrix,
    layout: &BipartiteLayout,
    measured: Factor,
    outcome: &PureState,
) -> Result<DensityMatrix> {
    layout.check_dim(rho.dim())?;
    layout.check_factor(measured, outcome.dim())?;
    let projector = match measured {
        Factor::L => layout.embed_l(&outcome.projector())?,
        Factor::S => layout.embed_s(&outcome.projector())?,
    };
    let prob = expectation(&projector, rho)?;
    if prob <= scaled(CONDITION_FLOOR) {
        return Err(Error::ZeroProbabilityCondition { value: prob });
    }
    let wrapped = &(&projector * rho.matrix()) * &projector;
    let reduced = match measured {
        Factor::L => trace_out_fast(&wrapped, layout.n_l(), layout.n_s()),
        Factor::S => trace_out_slow(&wrapped, layout.n_l(), layout.n_s()),
    };
    DensityMatrix::new(reduced.scale_real(1.0 / prob))
}

/// Effective director of one qubit of a pair, conditioned on the other
/// qubit passing a counter along `m`:
/// `d_a -> (d_a + sum_b d_ab m_b) / (1 + m . d_partner)`,
/// with the correlation contracted over the partner's axis index.
pub fn conditional_director(
    rho: &DensityMatrix,
    target: Factor,
    m: [f64; 3],
) -> Result<[f64; 3]> {
    let layout = BipartiteLayout::new(2, 2)?;
    layout.check_dim(rho.dim())?;
    let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    if (norm - 1.0).abs() > scaled(DIRECTOR_UNIT) {
        return Err(Error::BadDirector { norm });
    }
    let c = pair_coefficients(rho, &layout)?;
    let (d0, d1) = c.qubit_directors().expect("layout is a qubit pair");
    let dab = c.qubit_correlation().expect("layout is a qubit pair");
    let (own, partner) = match target {
        Factor::L => (d0, d1),
        Factor::S => (d1, d0),
    };
    let denominator = 1.0 + partner[0] * m[0] + partner[1] * m[1] + partner[2] * m[2];
    if denominator <= scaled(CONDITION_FLOOR) {
        return Err(Error::ZeroProbabilityCondition { value: denominator / 2.0 });
    }
    let mut d = [0.0; 3];
    for a in 0..3 {
        let coupled: f64 = match target {
            Factor::L => (0..3).map(|b| dab[a][b] * m[b]).sum(),
            Factor::S => (0..3).map(|b| dab[b][a] * m[b]).sum(),
        };
        d[a] = (own[a] + coupled) / denominator;
    }
    Ok(d)
}

/// Entanglement classes of a qubit pair, ordered by covariance rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntanglementClass {
    Separable,
    ClassicallyCorrelated,
    LightEntanglement,
    TotalEntanglement,
}

/// Covariance-rank verdict. The raw singular values are kept so callers
/// near a class boundary can apply their own cutoff.
#[derive(Clone, Copy, Debug)]
pub struct EntanglementVerdict {
    pub class: EntanglementClass,
    pub covariance_rank: usize,
    pub singular_values: [f64; 3],
}

/// Classify a qubit pair by the rank of the correlation covariance
/// `c_ab = d_ab - d_a d_b`: rank 0 and 1 carry no entanglement, rank 2
/// confines the conditional director to a plane, rank 3 lets it roam.
pub fn classify_entanglement(rho: &DensityMatrix) -> Result<EntanglementVerdict> {
    let layout = BipartiteLayout::new(2, 2)?;
    layout.check_dim(rho.dim())?;
    let coeffs = pair_coefficients(rho, &layout)?;
    let (d0, d1) = coeffs.qubit_directors().expect("layout is a qubit pair");
    let dab = coeffs.qubit_correlation().expect("layout is a qubit pair");
    let mut c = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            c[a][b] = dab[a][b] - d0[a] * d1[b];
        }
    }
    // Singular values through the symmetric embedding [[0, c], [c', 0]],
    // whose spectrum is +/- sigma_k. Diagonalizing c'c instead would
    // square the condition number and lift exact zeros to sqrt(eps),
    // above the relative rank cutoff.
    let embedded = CMatrix::from_fn(6, 6, |i, j| {
        let entry = if i < 3 && j >= 3 {
            c[i][j - 3]
        } else if i >= 3 && j < 3 {
            c[j][i - 3]
        } else {
            0.0
        };
        Complex64::new(entry, 0.0)
    });
    let spectral = hermitian_eig(&embedded)?;
    let mut singular = [0.0; 3];
    for (i, &lambda) in spectral.eigenvalues.iter().take(3).enumerate() {
        singular[i] = lambda.max(0.0);
    }
    let covariance_rank = if singular[0] < scaled(RANK_FLOOR) {
        0
    } else {
        singular.iter().filter(|&&s| s > scaled(RANK_RELATIVE) * singular[0]).count()
    };
    let class = match covariance_rank {
        0 => EntanglementClass::Separable,
        1 => EntanglementClass::ClassicallyCorrelated,
        2 => EntanglementClass::LightEntanglement,
        _ => EntanglementClass::TotalEntanglement,
    };
    Ok(EntanglementVerdict { class, covariance_rank, singular_values: singular })
}

/// The canonical entangled basis of a qubit pair: two rotation angles,
/// one inside the even span `{|00>, |11>}` and one inside the odd span
/// `{|01>, |10>}`. At `(0, 0)` it is the computational basis reordered
/// as `|00>, |01>, |10>, |11>`.
pub fn canonical_entangled_basis(psi: f64, phi: f64) -> Vec<PureState> {
    let zero = Complex64::new(0.0, 0.0);
    let amp = |x: f64| Complex64::new(x, 0.0);
    // Component order: index 1 is |10> (L excited), index 2 is |01>.
    let rows = [
        [amp(psi.cos()), zero, zero, amp(psi.sin())],
        [zero, amp(phi.sin()), amp(phi.cos()), zero],
        [zero, amp(phi.cos()), amp(-phi.sin()), zero],
        [amp(-psi.sin()), zero, zero, amp(psi.cos())],
    ];
    rows.into_iter()
        .map(|row| PureState::new(row.to_vec()).expect("rotation rows are unit vectors"))
        .collect()
}

/// A one-block entangling rotation: mixes the separated states
/// `|n, p'>` and `|n', p>` built from L modes `(n, n')` and S modes
/// `(p, p')`, with rotation angle `|alpha|` and exchange phase
/// `arg(alpha)`; identity on every other separated basis vector.
pub fn entangling_unitary(
    alpha: Complex64,
    l_modes: (usize, usize),
    s_modes: (usize, usize),
    layout: &BipartiteLayout,
) -> Result<CMatrix> {
    for (index, bound) in [
        (l_modes.0, layout.n_l()),
        (l_modes.1, layout.n_l()),
        (s_modes.0, layout.n_s()),
        (s_modes.1, layout.n_s()),
    ] {
        if index >= bound {
            return Err(Error::IndexOutOfRange { index, bound });
        }
    }
    assert!(l_modes.0 != l_modes.1 && s_modes.0 != s_modes.1, "modes must be distinct");
    let mut u = CMatrix::identity(layout.dim());
    let angle = alpha.norm();
    if angle == 0.0 {
        return Ok(u);
    }
    let r1 = layout.index(l_modes.0, s_modes.1);
    let r2 = layout.index(l_modes.1, s_modes.0);
    let (sin, cos) = angle.sin_cos();
    let exchange = Complex64::new(0.0, sin) * Complex64::from_polar(1.0, alpha.arg());
    u[(r1, r1)] = Complex64::new(cos, 0.0);
    u[(r2, r2)] = Complex64::new(cos, 0.0);
    u[(r1, r2)] = exchange;
    u[(r2, r1)] = Complex64::new(0.0, sin) * Complex64::from_polar(1.0, -alpha.arg());
    Ok(u)
}

/// Transform classes over a bipartite layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformClass {
    /// Commutes with every computational projector: portraits unchanged.
    Stabilizer,
    /// Generator splits into the two factors: no correlation is created.
    Local,
    /// Carries genuine cross terms between the factors.
    Entangling,
}

/// Classify a unitary as Stabilizer, Local, or Entangling by its action
/// on the computational bank and the cross terms of its principal
/// generator.
pub fn classify_transform(u: &CMatrix, layout: &BipartiteLayout) -> Result<TransformClass> {
    layout.check_dim(u.rows())?;
    let deviation = u.unitarity_deviation();
    if deviation > scaled(UNITARITY) {
        return Err(Error::NotUnitary { deviation });
    }
    let dim = layout.dim();
    let mut off_diagonal: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                off_diagonal = off_diagonal.max(u[(i, j)].norm());
            }
        }
    }
    if off_diagonal <= scaled(STABILIZER_OFFDIAG) {
        return Ok(TransformClass::Stabilizer);
    }
    let generator = generator_from_unitary(u)?;
    let basis_l = build_pauli_basis(layout.n_l())?;
    let basis_s = build_pauli_basis(layout.n_s())?;
    for n in 1..basis_l.len() {
        for p in 1..basis_s.len() {
            let product = layout.embed_pair(basis_l.matrix(n), basis_s.matrix(p))?;
            let coupling =
                trace_product(&generator, &product).re / (basis_l.norm(n) * basis_s.norm(p));
            if coupling.abs() >= scaled(CROSS_TERM) {
                return Ok(TransformClass::Entangling);
            }
        }
    }
    Ok(TransformClass::Local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::outer;
    use crate::measure::{reduction_measure, series_rng};
    use crate::qudit::{
        qubit_density, resolution_of_identity, sigma_dot, sigma_x, sigma_y, sigma_z,
    };
    use crate::random::{
        random_density, random_director, random_hermitian, random_pure, random_roi, random_unitary,
    };
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> DensityMatrix {
        let amp = 1.0 / SQRT_2;
        let state = PureState::new(vec![c(amp, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(amp, 0.0)])
            .unwrap();
        DensityMatrix::from_pure(&state)
    }

    fn layout22() -> BipartiteLayout {
        BipartiteLayout::new(2, 2).unwrap()
    }

    /// Canonical-basis mixture tuned so the covariance matrix keeps a
    /// doubly degenerate singular value and an exact zero: the even and
    /// odd weight gaps are locked by `u0 - u3 = v` and
    /// `u0 + u3 - u1 - u2 = v^2 cos^2(2 psi)`.
    fn degenerate_sheet_mixture(psi: f64) -> DensityMatrix {
        let basis = canonical_entangled_basis(psi, 0.0);
        let v = 0.4f64;
        let even = (1.0 + v * v * (2.0 * psi).cos().powi(2)) / 2.0;
        let weights =
            [(even + v) / 2.0, (1.0 - even) / 2.0, (1.0 - even) / 2.0, (even - v) / 2.0];
        let mut m = CMatrix::zeros(4, 4);
        for (state, &w) in basis.iter().zip(&weights) {
            m = &m + &state.projector().scale_real(w);
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn index_rule_is_a_bijection() {
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let mut seen = vec![false; 6];
        for p in 0..3 {
            for n in 0..2 {
                let r = layout.index(n, p);
                assert!(!seen[r]);
                seen[r] = true;
                assert_eq!(layout.split(r), (n, p));
            }
        }
        assert!(seen.into_iter().all(|s| s));
        assert!(BipartiteLayout::new(1, 4).is_err());
    }

    #[test]
    fn embeddings_keep_the_l_index_fastest() {
        let layout = layout22();
        let zl = layout.embed_l(&sigma_z()).unwrap();
        let zs = layout.embed_s(&sigma_z()).unwrap();
        for r in 0..4 {
            let (n, p) = layout.split(r);
            let sign_l = if n == 0 { 1.0 } else { -1.0 };
            let sign_s = if p == 0 { 1.0 } else { -1.0 };
            assert_eq!(zl[(r, r)].re, sign_l);
            assert_eq!(zs[(r, r)].re, sign_s);
        }
        let zz = layout.embed_pair(&sigma_z(), &sigma_z()).unwrap();
        assert_eq!(zz.max_abs_diff(&zl.mul(&zs)), 0.0);
    }

    #[test]
    fn computational_coarse_projectors_follow_the_index_rule() {
        let layout = layout22();
        let roi = resolution_of_identity(&CMatrix::diag_real(&[3.0, 2.0, 1.0, 0.0])).unwrap();
        let (coarse_l, coarse_s) = coarse_local_projectors(&roi, &layout).unwrap();
        let expect_l = CMatrix::diag_real(&[1.0, 0.0, 1.0, 0.0]);
        let expect_s = CMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0]);
        assert!(coarse_l[0].max_abs_diff(&expect_l) < 1e-12);
        assert!(coarse_s[0].max_abs_diff(&expect_s) < 1e-12);
    }

    #[test]
    fn coarse_products_recover_the_fine_projectors() {
        let mut rng = series_rng(11);
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let roi = random_roi(6, &mut rng);
        let (coarse_l, coarse_s) = coarse_local_projectors(&roi, &layout).unwrap();
        let mut sum_l = CMatrix::zeros(6, 6);
        for (n, pl) in coarse_l.iter().enumerate() {
            sum_l = &sum_l + pl;
            for (p, ps) in coarse_s.iter().enumerate() {
                let r = layout.index(n, p);
                assert!(pl.mul(ps).max_abs_diff(roi.projector(r)) < 1e-10);
            }
        }
        assert!(sum_l.max_abs_diff(&CMatrix::identity(6)) < 1e-10);
    }

    #[test]
    fn coarse_projectors_of_a_product_bank_are_the_embedded_locals() {
        let mut rng = series_rng(12);
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let roi_l = random_roi(2, &mut rng);
        let roi_s = random_roi(3, &mut rng);
        let mut members = vec![CMatrix::zeros(6, 6); 6];
        for p in 0..3 {
            for n in 0..2 {
                members[layout.index(n, p)] =
                    layout.embed_pair(roi_l.projector(n), roi_s.projector(p)).unwrap();
            }
        }
        let product = ResolutionOfIdentity::new(6, members).unwrap();
        let (coarse_l, coarse_s) = coarse_local_projectors(&product, &layout).unwrap();
        for n in 0..2 {
            let embedded = layout.embed_l(roi_l.projector(n)).unwrap();
            assert!(coarse_l[n].max_abs_diff(&embedded) < 1e-12);
        }
        for p in 0..3 {
            let embedded = layout.embed_s(roi_s.projector(p)).unwrap();
            assert!(coarse_s[p].max_abs_diff(&embedded) < 1e-12);
        }
    }

    #[test]
    fn coarse_projectors_reject_coarse_input() {
        let layout = layout22();
        let roi = ResolutionOfIdentity::new(
            4,
            vec![
                CMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0]),
                CMatrix::diag_real(&[0.0, 0.0, 1.0, 1.0]),
            ],
        )
        .unwrap();
        assert!(matches!(
            coarse_local_projectors(&roi, &layout),
            Err(Error::CoarseProjector { index: 0, rank: 2 })
        ));
    }

    #[test]
    fn equilibrium_has_no_coefficients() {
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let rho = DensityMatrix::equilibrium(6);
        let coeffs = pair_coefficients(&rho, &layout).unwrap();
        let largest = coeffs
            .l_coefficients()
            .iter()
            .chain(coeffs.s_coefficients())
            .chain(coeffs.d_cross.iter().flatten())
            .fold(0.0f64, |acc, &x| acc.max(x.abs()));
        assert!(largest < 1e-12);
    }

    #[test]
    fn bell_coefficients_match_direct_expectations() {
        let layout = layout22();
        let rho = bell();
        let coeffs = pair_coefficients(&rho, &layout).unwrap();
        let (d0, d1) = coeffs.qubit_directors().unwrap();
        let dab = coeffs.qubit_correlation().unwrap();
        let sigmas = [sigma_x(), sigma_y(), sigma_z()];
        for a in 0..3 {
            assert!(d0[a].abs() < 1e-12 && d1[a].abs() < 1e-12);
            for b in 0..3 {
                let product = layout.embed_pair(&sigmas[a], &sigmas[b]).unwrap();
                let direct = expectation(&product, &rho).unwrap();
                assert!((dab[a][b] - direct).abs() < 1e-12);
            }
        }
        let expected = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((dab[a][b] - expected[a][b]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn product_states_factorize_the_cross_terms() {
        let mut rng = series_rng(13);
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let rho_l = random_density(2, &mut rng);
        let rho_s = random_density(3, &mut rng);
        let product =
            DensityMatrix::new(layout.embed_pair(rho_l.matrix(), rho_s.matrix()).unwrap()).unwrap();
        let coeffs = pair_coefficients(&product, &layout).unwrap();
        for n in 1..4 {
            for p in 1..9 {
                let expected = coeffs.l_coefficients()[n - 1] * coeffs.s_coefficients()[p - 1];
                assert!((coeffs.cross_coefficient(n, p) - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn coefficients_round_trip_through_the_expansion() {
        let mut rng = series_rng(14);
        for (n_l, n_s) in [(2, 2), (2, 3), (3, 2)] {
            let layout = BipartiteLayout::new(n_l, n_s).unwrap();
            let rho = random_density(layout.dim(), &mut rng);
            let coeffs = pair_coefficients(&rho, &layout).unwrap();
            let rebuilt = density_from_coefficients(&coeffs).unwrap();
            assert!(rebuilt.matrix().max_abs_diff(rho.matrix()) < 1e-10, "{n_l}x{n_s}");
        }
    }

    #[test]
    fn local_density_matches_embedded_expectations() {
        let mut rng = series_rng(15);
        let layout = BipartiteLayout::new(3, 2).unwrap();
        let rho = random_density(6, &mut rng);
        let local_l = local_density(&rho, &layout, Factor::L).unwrap();
        let local_s = local_density(&rho, &layout, Factor::S).unwrap();
        for _ in 0..5 {
            let a_l = random_hermitian(3, &mut rng);
            let a_s = random_hermitian(2, &mut rng);
            let via_local = expectation(&a_l, &local_l).unwrap();
            let via_composite = expectation(&layout.embed_l(&a_l).unwrap(), &rho).unwrap();
            assert!((via_local - via_composite).abs() < 1e-10);
            let via_local = expectation(&a_s, &local_s).unwrap();
            let via_composite = expectation(&layout.embed_s(&a_s).unwrap(), &rho).unwrap();
            assert!((via_local - via_composite).abs() < 1e-10);
        }
    }

    #[test]
    fn bell_locals_are_equilibrium() {
        let rho = bell();
        for which in [Factor::L, Factor::S] {
            let local = local_density(&rho, &layout22(), which).unwrap();
            assert!(local.matrix().max_abs_diff(DensityMatrix::equilibrium(2).matrix()) < 1e-12);
        }
    }

    #[test]
    fn director_coefficients_read_back_from_the_local() {
        let coeffs = PairCoefficients::from_qubit_directors(
            [0.3, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [[0.0; 3]; 3],
        );
        let rho = density_from_coefficients(&coeffs).unwrap();
        let local = local_density(&rho, &layout22(), Factor::L).unwrap();
        let d = local.qubit_director().unwrap();
        assert!((d[0] - 0.3).abs() < 1e-12 && d[1].abs() < 1e-12 && d[2].abs() < 1e-12);
    }

    #[test]
    fn product_states_ignore_the_conditioning_outcome() {
        let mut rng = series_rng(16);
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let rho_l = random_density(2, &mut rng);
        let rho_s = random_density(3, &mut rng);
        let product =
            DensityMatrix::new(layout.embed_pair(rho_l.matrix(), rho_s.matrix()).unwrap()).unwrap();
        for _ in 0..5 {
            let outcome = random_pure(2, &mut rng);
            let conditional = conditional_state(&product, &layout, Factor::L, &outcome).unwrap();
            assert!(conditional.matrix().max_abs_diff(rho_s.matrix()) < 1e-10);
        }
    }

    #[test]
    fn bell_conditioning_pins_the_partner() {
        let layout = layout22();
        let outcome = PureState::basis_state(2, 0).unwrap();
        let conditional = conditional_state(&bell(), &layout, Factor::L, &outcome).unwrap();
        let expected = CMatrix::diag_real(&[1.0, 0.0]);
        assert!(conditional.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn conditioning_on_an_orthogonal_outcome_fails() {
        let layout = layout22();
        let rho = DensityMatrix::from_pure(
            &layout
                .product_state(
                    &PureState::basis_state(2, 0).unwrap(),
                    &PureState::basis_state(2, 0).unwrap(),
                )
                .unwrap(),
        );
        let orthogonal = PureState::basis_state(2, 1).unwrap();
        assert!(matches!(
            conditional_state(&rho, &layout, Factor::L, &orthogonal),
            Err(Error::ZeroProbabilityCondition { .. })
        ));
    }

    #[test]
    fn conditional_states_average_to_the_local_density() {
        let mut rng = series_rng(17);
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let rho = random_density(6, &mut rng);
        let bank = random_roi(2, &mut rng);
        let mut averaged = CMatrix::zeros(3, 3);
        for n in 0..2 {
            let outcome = PureState::new(bank.vector(n).unwrap()).unwrap();
            let projector = layout.embed_l(&outcome.projector()).unwrap();
            let prob = expectation(&projector, &rho).unwrap();
            let conditional = conditional_state(&rho, &layout, Factor::L, &outcome).unwrap();
            averaged = &averaged + &conditional.matrix().scale_real(prob);
        }
        let local_s = local_density(&rho, &layout, Factor::S).unwrap();
        assert!(averaged.max_abs_diff(local_s.matrix()) < 1e-10);
    }

    /// Conditioning on computational outcome `n` of L admits a closed
    /// form: the surviving S coefficients are the cross terms contracted
    /// with the diagonal entries of the diagonal L basis matrices at
    /// component `n`. Wrap-and-trace must reproduce it.
    #[test]
    fn conditional_coefficients_match_the_diagonal_contraction() {
        let mut rng = series_rng(18);
        for (n_l, n_s) in [(2, 3), (3, 2)] {
            let layout = BipartiteLayout::new(n_l, n_s).unwrap();
            let rho = random_density(layout.dim(), &mut rng);
            let coeffs = pair_coefficients(&rho, &layout).unwrap();
            let basis_l = build_pauli_basis(n_l).unwrap();
            let basis_s = build_pauli_basis(n_s).unwrap();
            let diagonal_slots: Vec<usize> = (1..n_l).map(|m| m * (n_l + 1)).collect();
            for n in 0..n_l {
                let outcome = PureState::basis_state(n_l, n).unwrap();
                let conditional = conditional_state(&rho, &layout, Factor::L, &outcome).unwrap();
                let mut denominator = 1.0 / n_l as f64;
                for &slot in &diagonal_slots {
                    let entry = basis_l.matrix(slot)[(n, n)].re;
                    denominator += coeffs.l_coefficients()[slot - 1] / basis_l.norm(slot) * entry;
                }
                for p in 1..basis_s.len() {
                    let mut numerator = coeffs.s_coefficients()[p - 1] / (n_l as f64 * basis_s.norm(p));
                    for &slot in &diagonal_slots {
                        let entry = basis_l.matrix(slot)[(n, n)].re;
                        numerator +=
                            coeffs.cross_coefficient(slot, p) / (basis_l.norm(slot) * basis_s.norm(p)) * entry;
                    }
                    let expected = basis_s.norm(p) * numerator / denominator;
                    let direct = expectation(basis_s.matrix(p), &conditional).unwrap();
                    assert!((direct - expected).abs() < 1e-10, "{n_l}x{n_s} outcome {n} basis {p}");
                }
            }
        }
    }

    #[test]
    fn purity_survives_rank_one_conditioning() {
        let mut rng = series_rng(19);
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let rho = DensityMatrix::from_pure(&random_pure(6, &mut rng));
        let outcome = random_pure(2, &mut rng);
        let conditional = conditional_state(&rho, &layout, Factor::L, &outcome).unwrap();
        let eigen = conditional.eigenvalues().unwrap();
        assert!(eigen[0] > 1.0 - 1e-10);
        assert!(eigen[1..].iter().all(|&v| v < 1e-10));
    }

    #[test]
    fn bell_conditional_directors_follow_the_counter() {
        let rho = bell();
        let along_z = conditional_director(&rho, Factor::L, [0.0, 0.0, 1.0]).unwrap();
        let along_x = conditional_director(&rho, Factor::L, [1.0, 0.0, 0.0]).unwrap();
        for a in 0..3 {
            assert!((along_z[a] - [0.0, 0.0, 1.0][a]).abs() < 1e-10);
            assert!((along_x[a] - [1.0, 0.0, 0.0][a]).abs() < 1e-10);
        }
    }

    #[test]
    fn product_conditional_director_is_the_own_director() {
        let mut rng = series_rng(20);
        let layout = layout22();
        let d_own = [0.2, -0.4, 0.5];
        let d_partner = [0.1, 0.3, -0.2];
        let rho = DensityMatrix::new(
            layout
                .embed_pair(
                    qubit_density(d_own).unwrap().matrix(),
                    qubit_density(d_partner).unwrap().matrix(),
                )
                .unwrap(),
        )
        .unwrap();
        for _ in 0..10 {
            let m = random_director(&mut rng);
            let d = conditional_director(&rho, Factor::L, m).unwrap();
            for a in 0..3 {
                assert!((d[a] - d_own[a]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn conditional_director_agrees_with_the_conditional_state() {
        let mut rng = series_rng(21);
        let layout = layout22();
        for _ in 0..100 {
            let rho = random_density(4, &mut rng);
            let m = random_director(&mut rng);
            let outcome = PureState::from_director(m).unwrap();
            for (target, measured) in [(Factor::L, Factor::S), (Factor::S, Factor::L)] {
                let formula = conditional_director(&rho, target, m).unwrap();
                let state = conditional_state(&rho, &layout, measured, &outcome).unwrap();
                let direct = state.qubit_director().unwrap();
                for a in 0..3 {
                    assert!((formula[a] - direct[a]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn aligned_cross_terms_fix_the_conditional_direction() {
        let mut rng = series_rng(22);
        let d0 = [0.0, 0.0, 0.3];
        let d1 = [0.25, 0.0, 0.0];
        let mut dab = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                dab[a][b] = 0.5 * d0[a] * d1[b];
            }
        }
        let rho =
            density_from_coefficients(&PairCoefficients::from_qubit_directors(d0, d1, dab)).unwrap();
        for _ in 0..10 {
            let m = random_director(&mut rng);
            let d = conditional_director(&rho, Factor::L, m).unwrap();
            let cross = [
                d[1] * d0[2] - d[2] * d0[1],
                d[2] * d0[0] - d[0] * d0[2],
                d[0] * d0[1] - d[1] * d0[0],
            ];
            assert!(cross.iter().all(|&x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn verdicts_cover_all_four_ranks() {
        let layout = layout22();
        let product = DensityMatrix::from_pure(
            &layout
                .product_state(
                    &PureState::basis_state(2, 0).unwrap(),
                    &PureState::basis_state(2, 0).unwrap(),
                )
                .unwrap(),
        );
        let verdict = classify_entanglement(&product).unwrap();
        assert_eq!(verdict.class, EntanglementClass::Separable);
        assert_eq!(verdict.covariance_rank, 0);

        let mut mixture = CMatrix::zeros(4, 4);
        mixture[(1, 1)] = c(0.5, 0.0);
        mixture[(2, 2)] = c(0.5, 0.0);
        let verdict = classify_entanglement(&DensityMatrix::new(mixture).unwrap()).unwrap();
        assert_eq!(verdict.class, EntanglementClass::ClassicallyCorrelated);
        assert_eq!(verdict.covariance_rank, 1);
        assert!((verdict.singular_values[0] - 1.0).abs() < 1e-10);

        let verdict = classify_entanglement(&bell()).unwrap();
        assert_eq!(verdict.class, EntanglementClass::TotalEntanglement);
        assert_eq!(verdict.covariance_rank, 3);
        for s in verdict.singular_values {
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn canonical_mixture_on_the_degenerate_sheet_is_lightly_entangled() {
        let verdict = classify_entanglement(&degenerate_sheet_mixture(FRAC_PI_8)).unwrap();
        assert_eq!(verdict.class, EntanglementClass::LightEntanglement);
        assert_eq!(verdict.covariance_rank, 2);
        let expected = 0.4 * (2.0 * FRAC_PI_8).sin();
        assert!((verdict.singular_values[0] - expected).abs() < 1e-9);
        assert!((verdict.singular_values[1] - expected).abs() < 1e-9);
        assert!(verdict.singular_values[2] < 1e-9);
    }

    #[test]
    fn verdict_is_invariant_under_local_unitaries() {
        let mut rng = series_rng(23);
        let layout = layout22();
        let odd_parity =
            DensityMatrix::new(CMatrix::diag_real(&[0.0, 0.5, 0.5, 0.0])).unwrap();
        let product = {
            let l = crate::random::random_pure(2, &mut rng);
            let s = crate::random::random_pure(2, &mut rng);
            DensityMatrix::from_pure(&layout.product_state(&l, &s).unwrap())
        };
        let light = degenerate_sheet_mixture(std::f64::consts::FRAC_PI_8);
        for rho in [bell(), odd_parity, product, light] {
            let reference = classify_entanglement(&rho).unwrap();
            for _ in 0..20 {
                let u = layout
                    .embed_pair(&random_unitary(2, &mut rng), &random_unitary(2, &mut rng))
                    .unwrap();
                let rotated =
                    DensityMatrix::new(u.mul(rho.matrix()).mul(&u.adjoint())).unwrap();
                let verdict = classify_entanglement(&rotated).unwrap();
                assert_eq!(verdict.class, reference.class);
                assert_eq!(verdict.covariance_rank, reference.covariance_rank);
                for a in 0..3 {
                    assert!(
                        (verdict.singular_values[a] - reference.singular_values[a]).abs() < 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn canonical_basis_is_orthonormal_and_reduces_to_computational() {
        let at_zero = canonical_entangled_basis(0.0, 0.0);
        for (k, expected) in [0usize, 2, 1, 3].into_iter().enumerate() {
            let direct = PureState::basis_state(4, expected).unwrap();
            assert!((at_zero[k].inner(&direct).norm() - 1.0).abs() < 1e-12);
        }
        let basis = canonical_entangled_basis(0.7, -1.1);
        for i in 0..4 {
            for j in 0..4 {
                let overlap = basis[i].inner(&basis[j]).norm();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((overlap - expected).abs() < 1e-12);
            }
        }
        let maximal = canonical_entangled_basis(FRAC_PI_4, FRAC_PI_4);
        let phi_plus = bell();
        let overlap = expectation(&maximal[0].projector(), &phi_plus).unwrap();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entangling_unitary_rotates_the_odd_block() {
        let layout = layout22();
        let identity = entangling_unitary(c(0.0, 0.0), (0, 1), (0, 1), &layout).unwrap();
        assert_eq!(identity.max_abs_diff(&CMatrix::identity(4)), 0.0);

        let swap = entangling_unitary(c(std::f64::consts::FRAC_PI_2, 0.0), (0, 1), (0, 1), &layout)
            .unwrap();
        let ket01 = swap.apply(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((ket01[1] - c(0.0, 1.0)).norm() < 1e-12);
        assert!((ket01[2].norm()) < 1e-12);

        let mut rng = series_rng(24);
        for _ in 0..10 {
            let alpha = c(
                2.0 * rng.random_range(-1.0..1.0f64),
                2.0 * rng.random_range(-1.0..1.0f64),
            );
            let u = entangling_unitary(alpha, (0, 1), (0, 1), &layout).unwrap();
            assert!(u.unitarity_deviation() < 1e-12);
            let even = u.apply(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
            assert!((even[0] - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn entangling_rotation_produces_a_total_verdict() {
        let layout = layout22();
        let u = entangling_unitary(c(FRAC_PI_4, 0.0), (0, 1), (0, 1), &layout).unwrap();
        let odd = PureState::basis_state(4, 2).unwrap();
        let rotated = PureState::new(u.apply(odd.amplitudes())).unwrap();
        let verdict = classify_entanglement(&DensityMatrix::from_pure(&rotated)).unwrap();
        assert_eq!(verdict.class, EntanglementClass::TotalEntanglement);
    }

    #[test]
    fn transform_classes_separate_the_three_kinds() {
        let layout = layout22();
        let phases = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, 0.4 * i as f64 - 0.3)
            } else {
                c(0.0, 0.0)
            }
        });
        assert_eq!(classify_transform(&phases, &layout).unwrap(), TransformClass::Stabilizer);

        let mut rng = series_rng(25);
        for _ in 0..5 {
            let small = |rng: &mut rand_chacha::ChaCha12Rng| {
                let d = random_director(rng);
                sigma_dot([0.3 * d[0], 0.3 * d[1], 0.3 * d[2]])
            };
            let u_l = crate::linalg::unitary_from_generator(&small(&mut rng)).unwrap();
            let u_s = crate::linalg::unitary_from_generator(&small(&mut rng)).unwrap();
            let u = layout.embed_pair(&u_l, &u_s).unwrap();
            assert_eq!(classify_transform(&u, &layout).unwrap(), TransformClass::Local);
            let one_sided = layout.embed_l(&u_l).unwrap();
            assert_eq!(classify_transform(&one_sided, &layout).unwrap(), TransformClass::Local);
        }

        let entangler = entangling_unitary(c(FRAC_PI_4, 0.0), (0, 1), (0, 1), &layout).unwrap();
        assert_eq!(classify_transform(&entangler, &layout).unwrap(), TransformClass::Entangling);
    }

    #[test]
    fn separable_diagonal_states_reduce_to_their_product_bank() {
        let mut rng = series_rng(26);
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let roi_l = random_roi(2, &mut rng);
        let roi_s = random_roi(3, &mut rng);
        let u = [0.7, 0.3];
        let v = [0.62, 0.27, 0.11];
        let mut m = CMatrix::zeros(6, 6);
        let mut weighted: Vec<(f64, CMatrix)> = Vec::new();
        for (n, &un) in u.iter().enumerate() {
            for (p, &vp) in v.iter().enumerate() {
                let member = layout.embed_pair(roi_l.projector(n), roi_s.projector(p)).unwrap();
                m = &m + &member.scale_real(un * vp);
                weighted.push((un * vp, member));
            }
        }
        let rho = DensityMatrix::new(m).unwrap();
        weighted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let product_bank =
            ResolutionOfIdentity::new(6, weighted.into_iter().map(|(_, p)| p).collect()).unwrap();
        let own_bank = resolution_of_identity(rho.matrix()).unwrap();
        let reduction = reduction_measure(&product_bank, &own_bank).unwrap();
        assert!(reduction.value < 1e-7);
        assert_eq!(reduction.moved_count, 0);
    }

    #[test]
    fn cross_factorization_uses_the_outer_product() {
        let mut rng = series_rng(27);
        let layout = layout22();
        let d_l = random_director(&mut rng);
        let d_s = random_director(&mut rng);
        let rho = DensityMatrix::new(
            layout
                .embed_pair(
                    qubit_density([0.6 * d_l[0], 0.6 * d_l[1], 0.6 * d_l[2]]).unwrap().matrix(),
                    qubit_density([0.4 * d_s[0], 0.4 * d_s[1], 0.4 * d_s[2]]).unwrap().matrix(),
                )
                .unwrap(),
        )
        .unwrap();
        let coeffs = pair_coefficients(&rho, &layout).unwrap();
        let (d0, d1) = coeffs.qubit_directors().unwrap();
        let dab = coeffs.qubit_correlation().unwrap();
        let outer_check = outer(
            &d0.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(),
            &d1.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(),
        );
        for a in 0..3 {
            for b in 0..3 {
                assert!((dab[a][b] - outer_check[(a, b)].re).abs() < 1e-10);
            }
        }
        let verdict = classify_entanglement(&rho).unwrap();
        assert_eq!(verdict.class, EntanglementClass::Separable);
    }
}
