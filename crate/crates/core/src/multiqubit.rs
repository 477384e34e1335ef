//! p-qubit systems: bit-indexed qubit subalgebras, product counters,
//! portraits and effective directors, Pauli-coefficient expansions,
//! tomographic reconstruction from counter statistics, and transform
//! classification.
//!
//! Component indices follow `k = b_0 + 2 b_1 + ... + 2^{p-1} b_{p-1}`:
//! bit 0 is the fastest-varying index, matching the bipartite layout
//! convention with qubit 0 as the L factor.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, CMatrix};
use crate::measure::FrequencyTable;
use crate::qudit::{
    expectation, sigma_dot, sigma_x, sigma_y, sigma_z, DensityMatrix, ResolutionOfIdentity,
};
use crate::tolerance::{scaled, CONDITION_FLOOR, CROSS_TERM, DIRECTOR_UNIT, STABILIZER_OFFDIAG, UNITARITY};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub use crate::composite::TransformClass;

/// Bit `q` of component index `k`.
pub fn bit_of(k: usize, q: usize) -> usize {
    (k >> q) & 1
}

/// The index set `k_q`: all components of a p-qubit system whose bit `q`
/// is zero. Together with its complement it covers `[0, 2^p)`.
pub fn index_set(q: usize, qubits: usize) -> Result<Vec<usize>> {
    if q >= qubits {
        return Err(Error::IndexOutOfRange { index: q, bound: qubits });
    }
    Ok((0..1usize << qubits).filter(|&k| bit_of(k, q) == 0).collect())
}

/// Sign `(-1)^{b_q(k)}` as a float.
fn bit_sign(k: usize, q: usize) -> f64 {
    if bit_of(k, q) == 0 { 1.0 } else { -1.0 }
}

/// Measurement axes for one qubit, mapping onto the Pauli triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_letter(ch: char) -> Option<Axis> {
        match ch {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }

    /// The unit director along this axis.
    pub fn director(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }

    /// Component slot of this axis in a 3-vector.
    fn slot(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    fn pauli(self) -> CMatrix {
        match self {
            Axis::X => sigma_x(),
            Axis::Y => sigma_y(),
            Axis::Z => sigma_z(),
        }
    }
}

/// The embedded Pauli triple of one qubit inside a p-qubit system,
/// generated by the ladder matrix `A = sum_{k in k_q} |k><k + 2^q|`.
#[derive(Clone, Debug)]
pub struct QubitSubalgebra {
    q: usize,
    qubits: usize,
    ladder: CMatrix,
    sigma: [CMatrix; 3],
    coarse: CMatrix,
}

impl QubitSubalgebra {
    pub fn new(q: usize, qubits: usize) -> Result<Self> {
        if qubits == 0 || q >= qubits {
            return Err(Error::IndexOutOfRange { index: q, bound: qubits });
        }
        let dim = 1usize << qubits;
        let step = 1usize << q;
        let mut ladder = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            if bit_of(k, q) == 0 {
                ladder[(k, k + step)] = Complex64::new(1.0, 0.0);
            }
        }
        let raised = ladder.adjoint();
        let sigma1 = &ladder + &raised;
        let sigma2 = (&raised - &ladder).scale(Complex64::new(0.0, 1.0));
        let sigma3 = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(bit_sign(i, q), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let coarse = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j && bit_of(i, q) == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(QubitSubalgebra { q, qubits, ladder, sigma: [sigma1, sigma2, sigma3], coarse })
    }

    pub fn qubit(&self) -> usize {
        self.q
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// The lowering ladder `A`.
    pub fn ladder(&self) -> &CMatrix {
        &self.ladder
    }

    /// The embedded Pauli matrix along `axis`.
    pub fn sigma(&self, axis: Axis) -> &CMatrix {
        &self.sigma[axis.slot()]
    }

    /// The coarse projector onto the bit-`q` = 0 components.
    pub fn coarse_projector(&self) -> &CMatrix {
        &self.coarse
    }
}

/// The computational projector `|k><k|` assembled from the factorization
/// `prod_q (I + (-1)^{b_q} Sigma_3^{(q)}) / 2`; exact by construction.
pub fn projector_from_bits(k: usize, qubits: usize) -> Result<CMatrix> {
    let dim = 1usize << qubits;
    if k >= dim {
        return Err(Error::IndexOutOfRange { index: k, bound: dim });
    }
    let mut m = CMatrix::identity(dim);
    for q in 0..qubits {
        let sub = QubitSubalgebra::new(q, qubits)?;
        let signed = sub.sigma(Axis::Z).scale_real(bit_sign(k, q));
        let factor = (&CMatrix::identity(dim) + &signed).scale_real(0.5);
        m = m.mul(&factor);
    }
    Ok(m)
}

/// One counter direction per qubit.
#[derive(Clone, Debug)]
pub struct CounterConfiguration {
    directors: Vec<[f64; 3]>,
}

impl CounterConfiguration {
    pub fn new(directors: Vec<[f64; 3]>) -> Result<Self> {
        if directors.is_empty() {
            return Err(Error::EmptySubset);
        }
        for m in &directors {
            let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
            if (norm - 1.0).abs() > scaled(DIRECTOR_UNIT) {
                return Err(Error::BadDirector { norm });
            }
        }
        Ok(CounterConfiguration { directors })
    }

    /// Counters along coordinate axes.
    pub fn from_axes(axes: &[Axis]) -> Result<Self> {
        CounterConfiguration::new(axes.iter().map(|a| a.director()).collect())
    }

    pub fn qubits(&self) -> usize {
        self.directors.len()
    }

    pub fn director(&self, q: usize) -> [f64; 3] {
        self.directors[q]
    }

    pub fn directors(&self) -> &[[f64; 3]] {
        &self.directors
    }
}

/// `(I + m . sigma) / 2`: the qubit counter projector along `m`.
fn counter_projector(m: [f64; 3]) -> CMatrix {
    (&CMatrix::identity(2) + &sigma_dot(m)).scale_real(0.5)
}

/// Tensor product of one 2x2 factor per qubit, with qubit 0 fastest.
fn kron_chain(factors: &[CMatrix]) -> CMatrix {
    let mut acc = factors[factors.len() - 1].clone();
    for factor in factors[..factors.len() - 1].iter().rev() {
        acc = kron(&acc, factor);
    }
    acc
}

/// The product counter `prod_q (I + m_q . sigma^{(q)}) / 2`: the rank-1
/// projector all counters pass together.
pub fn product_counter(m: &CounterConfiguration) -> CMatrix {
    let factors: Vec<CMatrix> = m.directors().iter().map(|&d| counter_projector(d)).collect();
    kron_chain(&factors)
}

/// The full counter bank: member `k` flips each director by
/// `(-1)^{b_q(k)}`, covering every pass/fail pattern.
pub fn counter_roi(m: &CounterConfiguration) -> Result<ResolutionOfIdentity> {
    let p = m.qubits();
    let dim = 1usize << p;
    let mut members = Vec::with_capacity(dim);
    for k in 0..dim {
        let factors: Vec<CMatrix> = (0..p)
            .map(|q| {
                let d = m.director(q);
                let sign = bit_sign(k, q);
                counter_projector([sign * d[0], sign * d[1], sign * d[2]])
            })
            .collect();
        members.push(kron_chain(&factors));
    }
    ResolutionOfIdentity::new(dim, members)
}

/// Expectations of the embedded Pauli products, keyed by the qubit
/// subset with one axis per member. The empty subset carries the fixed
/// coefficient 1 and is not stored.
#[derive(Clone, Debug)]
pub struct PauliCoefficients {
    qubits: usize,
    map: BTreeMap<Vec<(usize, Axis)>, f64>,
}

impl PauliCoefficients {
    pub fn empty(qubits: usize) -> Self {
        PauliCoefficients { qubits, map: BTreeMap::new() }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Store one coefficient; the key must name distinct qubits in
    /// increasing order.
    pub fn set(&mut self, key: Vec<(usize, Axis)>, value: f64) -> Result<()> {
        if key.is_empty() {
            return Err(Error::EmptySubset);
        }
        for window in key.windows(2) {
            if window[1].0 <= window[0].0 {
                return Err(Error::IndexOutOfRange { index: window[1].0, bound: window[0].0 + 1 });
            }
        }
        if let Some(&(q, _)) = key.last() {
            if q >= self.qubits {
                return Err(Error::IndexOutOfRange { index: q, bound: self.qubits });
            }
        }
        self.map.insert(key, value);
        Ok(())
    }

    /// The stored coefficient, zero when absent.
    pub fn coefficient(&self, key: &[(usize, Axis)]) -> f64 {
        self.map.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<(usize, Axis)>, f64)> {
        self.map.iter().map(|(k, &v)| (k, v))
    }

    /// Largest absolute difference against another parameter set over
    /// the union of stored keys.
    pub fn max_abs_diff(&self, other: &PauliCoefficients) -> f64 {
        let mut largest = 0.0f64;
        for (key, value) in self.iter() {
            largest = largest.max((value - other.coefficient(key)).abs());
        }
        for (key, value) in other.iter() {
            largest = largest.max((value - self.coefficient(key)).abs());
        }
        largest
    }

    /// Deterministic text report: one `S=<qubit:axis,...> d=<value>`
    /// line per coefficient, ordered by subset size then by key.
    pub fn report(&self) -> String {
        let mut keys: Vec<&Vec<(usize, Axis)>> = self.map.keys().collect();
        keys.sort_by_key(|k| (k.len(), (*k).clone()));
        let mut out = String::new();
        for key in keys {
            let subset = key
                .iter()
                .map(|&(q, a)| format!("{q}:{}", a.letter()))
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(out, "S={subset} d={}", crate::fmt::float12(self.map[key]));
        }
        out
    }
}

/// Number of qubits of a power-of-two dimension.
fn qubit_count(dim: usize) -> Result<usize> {
    if dim >= 2 && dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::DimensionMismatch { expected: dim.next_power_of_two().max(2), actual: dim })
    }
}

/// Trace of `m` against the embedded Pauli product named by `ops`.
///
/// Each single-qubit factor has one entry per row, so the product has
/// exactly one nonzero column per row, at the bit-flip partner across
/// the X and Y qubits of the key.
fn pauli_product_trace(m: &CMatrix, ops: &[(usize, Axis)]) -> Complex64 {
    let dim = m.rows();
    let mut flip = 0usize;
    for &(q, axis) in ops {
        if axis != Axis::Z {
            flip |= 1 << q;
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..dim {
        let partner = k ^ flip;
        let mut factor = Complex64::new(1.0, 0.0);
        for &(q, axis) in ops {
            let row = bit_of(partner, q);
            let col = bit_of(k, q);
            factor *= match axis {
                Axis::X => Complex64::new(1.0, 0.0),
                Axis::Y => {
                    if row == 1 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    }
                }
                Axis::Z => Complex64::new(if col == 0 { 1.0 } else { -1.0 }, 0.0),
            };
        }
        total += m[(k, partner)] * factor;
    }
    total
}

/// Expectation of the embedded Pauli product on a state.
pub fn pauli_product_expectation(rho: &DensityMatrix, ops: &[(usize, Axis)]) -> Result<f64> {
    let qubits = qubit_count(rho.dim())?;
    for &(q, _) in ops {
        if q >= qubits {
            return Err(Error::IndexOutOfRange { index: q, bound: qubits });
        }
    }
    Ok(pauli_product_trace(rho.matrix(), ops).re)
}

/// Every subset key over `qubits` with every axis assignment.
fn all_keys(qubits: usize) -> Vec<Vec<(usize, Axis)>> {
    let mut keys = Vec::new();
    for mask in 1usize..(1 << qubits) {
        let members: Vec<usize> = (0..qubits).filter(|&q| bit_of(mask, q) == 1).collect();
        let mut assignment = vec![0usize; members.len()];
        loop {
            keys.push(
                members
                    .iter()
                    .zip(&assignment)
                    .map(|(&q, &a)| (q, Axis::ALL[a]))
                    .collect::<Vec<_>>(),
            );
            let mut carry = assignment.len();
            for i in (0..assignment.len()).rev() {
                if assignment[i] < 2 {
                    assignment[i] += 1;
                    carry = i;
                    break;
                }
                assignment[i] = 0;
            }
            if carry == assignment.len() {
                break;
            }
        }
    }
    keys
}

/// Expectations of all embedded Pauli products: the complete
/// parameterization of a p-qubit state.
pub fn pauli_coefficients(rho: &DensityMatrix) -> Result<PauliCoefficients> {
    let qubits = qubit_count(rho.dim())?;
    let mut coeffs = PauliCoefficients::empty(qubits);
    for key in all_keys(qubits) {
        let value = pauli_product_trace(rho.matrix(), &key).re;
        coeffs.set(key, value)?;
    }
    Ok(coeffs)
}

/// The raw expansion `(1/2^p) (I + sum_S d_S * PauliProduct_S)`:
/// Hermitian with unit trace, but not checked for positivity.
pub fn matrix_from_coefficients(c: &PauliCoefficients) -> CMatrix {
    let dim = 1usize << c.qubits;
    let identity2 = CMatrix::identity(2);
    let mut m = CMatrix::identity(dim);
    for (key, value) in c.iter() {
        let factors: Vec<CMatrix> = (0..c.qubits)
            .map(|q| {
                key.iter()
                    .find(|&&(kq, _)| kq == q)
                    .map(|&(_, axis)| axis.pauli())
                    .unwrap_or_else(|| identity2.clone())
            })
            .collect();
        m = &m + &kron_chain(&factors).scale_real(value);
    }
    m.scale_real(1.0 / dim as f64)
}

/// The state with the given Pauli coefficients; fails when they do not
/// describe a positive matrix.
pub fn density_from_coefficients(c: &PauliCoefficients) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix_from_coefficients(c))
}

/// The state of a qubit subset: keep exactly the coefficients supported
/// inside the subset, relabel, renormalize to the smaller space. Agrees
/// with the partial trace over the complement.
pub fn partial_density(rho: &DensityMatrix, subset: &[usize]) -> Result<DensityMatrix> {
    let qubits = qubit_count(rho.dim())?;
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut keep = subset.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&q) = keep.last() {
        if q >= qubits {
            return Err(Error::IndexOutOfRange { index: q, bound: qubits });
        }
    }
    let coeffs = pauli_coefficients(rho)?;
    let mut reduced = PauliCoefficients::empty(keep.len());
    for (key, value) in coeffs.iter() {
        if key.iter().all(|&(q, _)| keep.contains(&q)) {
            let relabeled: Vec<(usize, Axis)> = key
                .iter()
                .map(|&(q, a)| (keep.iter().position(|&kq| kq == q).unwrap(), a))
                .collect();
            reduced.set(relabeled, value)?;
        }
    }
    density_from_coefficients(&reduced)
}

/// The multiqubit phase portrait at one counter configuration: the
/// probability that every counter passes.
pub fn multiqubit_portrait(rho: &DensityMatrix, m: &CounterConfiguration) -> Result<f64> {
    let qubits = qubit_count(rho.dim())?;
    if m.qubits() != qubits {
        return Err(Error::LengthMismatch { expected: qubits, actual: m.qubits() });
    }
    expectation(&product_counter(m), rho)
}

/// Outcome distribution over the full counter bank, indexed by the
/// pass/fail bit pattern.
pub fn counter_distribution(rho: &DensityMatrix, m: &CounterConfiguration) -> Result<Vec<f64>> {
    let qubits = qubit_count(rho.dim())?;
    if m.qubits() != qubits {
        return Err(Error::LengthMismatch { expected: qubits, actual: m.qubits() });
    }
    crate::qudit::portrait_distribution(rho, &counter_roi(m)?)
}

/// Effective director of qubit `q` conditioned on every other qubit
/// passing its counter. `others` lists the partner directors by
/// ascending qubit index.
///
/// Both numerator and denominator expand over partner subsets: the
/// denominator collects the coefficients without `q` contracted with
/// the partner directors (the conditioning probability, scaled by
/// `2^{p-1}`), the numerator the coefficients containing `q`.
pub fn effective_director(
    rho: &DensityMatrix,
    q: usize,
    others: &[[f64; 3]],
) -> Result<[f64; 3]> {
    let qubits = qubit_count(rho.dim())?;
    if q >= qubits {
        return Err(Error::IndexOutOfRange { index: q, bound: qubits });
    }
    if others.len() != qubits - 1 {
        return Err(Error::LengthMismatch { expected: qubits - 1, actual: others.len() });
    }
    for m in others {
        let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
        if (norm - 1.0).abs() > scaled(DIRECTOR_UNIT) {
            return Err(Error::BadDirector { norm });
        }
    }
    let partner = |other_q: usize| others[if other_q < q { other_q } else { other_q - 1 }];
    let coeffs = pauli_coefficients(rho)?;
    let mut numerator = [0.0f64; 3];
    let mut denominator = 1.0f64;
    for (key, value) in coeffs.iter() {
        let mut target_axis = None;
        let mut weight = 1.0;
        for &(kq, axis) in key {
            if kq == q {
                target_axis = Some(axis);
            } else {
                weight *= partner(kq)[axis.slot()];
            }
        }
        match target_axis {
            Some(axis) => numerator[axis.slot()] += value * weight,
            None => denominator += value * weight,
        }
    }
    if denominator <= scaled(CONDITION_FLOOR) {
        let scale = (1usize << (qubits - 1)) as f64;
        return Err(Error::ZeroProbabilityCondition { value: denominator / scale });
    }
    Ok([
        numerator[0] / denominator,
        numerator[1] / denominator,
        numerator[2] / denominator,
    ])
}

/// One coordinate axis per qubit: a tomographic measurement setting.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AxisSetting {
    axes: Vec<Axis>,
}

impl AxisSetting {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(AxisSetting { axes })
    }

    /// Parse a label like `xyz`, one letter per qubit.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut axes = Vec::with_capacity(label.len());
        for ch in label.chars() {
            match Axis::from_letter(ch) {
                Some(axis) => axes.push(axis),
                None => {
                    return Err(Error::parse(
                        "axes",
                        None,
                        format!("unknown axis letter `{ch}` (expected x, y, or z)"),
                    ))
                }
            }
        }
        AxisSetting::new(axes)
    }

    pub fn qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, q: usize) -> Axis {
        self.axes[q]
    }

    /// The `xyz...` label, one letter per qubit.
    pub fn label(&self) -> String {
        self.axes.iter().map(|a| a.letter()).collect()
    }

    /// Counters along the setting's axes.
    pub fn configuration(&self) -> CounterConfiguration {
        CounterConfiguration::from_axes(&self.axes).expect("axis directors are unit vectors")
    }

    /// All `3^p` settings in lexicographic label order.
    pub fn all(qubits: usize) -> Vec<AxisSetting> {
        let mut settings = Vec::with_capacity(3usize.pow(qubits as u32));
        let mut axes = vec![0usize; qubits];
        loop {
            settings.push(AxisSetting { axes: axes.iter().map(|&a| Axis::ALL[a]).collect() });
            let mut done = true;
            for i in (0..qubits).rev() {
                if axes[i] < 2 {
                    axes[i] += 1;
                    done = false;
                    break;
                }
                axes[i] = 0;
            }
            if done {
                break;
            }
        }
        settings
    }
}

/// One line of a tomography campaign: the setting with its shot count
/// and RNG seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SettingRecord {
    pub setting: AxisSetting,
    pub shots: usize,
    pub seed: u64,
}

/// Parse a settings file: one `axes=<label> shots=<K> seed=<s>` line per
/// configuration, tokens in any order, blank lines ignored.
pub fn parse_settings(text: &str, source_name: &str) -> Result<Vec<SettingRecord>> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let number = Some(i + 1);
        let mut axes = None;
        let mut shots = None;
        let mut seed = None;
        for token in line.split_whitespace() {
            let (key, value) = token.split_once('=').ok_or_else(|| {
                Error::parse(source_name, number, format!("expected key=value, found `{token}`"))
            })?;
            match key {
                "axes" => {
                    axes = Some(AxisSetting::from_label(value).map_err(|_| {
                        Error::parse(source_name, number, format!("bad axes label `{value}`"))
                    })?)
                }
                "shots" => {
                    shots = Some(value.parse::<usize>().map_err(|_| {
                        Error::parse(source_name, number, format!("bad shot count `{value}`"))
                    })?)
                }
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|_| {
                        Error::parse(source_name, number, format!("bad seed `{value}`"))
                    })?)
                }
                other => {
                    return Err(Error::parse(
                        source_name,
                        number,
                        format!("unknown settings key `{other}`"),
                    ))
                }
            }
        }
        let setting = axes
            .ok_or_else(|| Error::parse(source_name, number, "missing axes token".to_string()))?;
        let shots = shots
            .ok_or_else(|| Error::parse(source_name, number, "missing shots token".to_string()))?;
        let seed = seed
            .ok_or_else(|| Error::parse(source_name, number, "missing seed token".to_string()))?;
        records.push(SettingRecord { setting, shots, seed });
    }
    Ok(records)
}

/// Render settings lines in the same format [`parse_settings`] reads.
pub fn settings_to_text(records: &[SettingRecord]) -> String {
    let mut out = String::new();
    for record in records {
        let _ = writeln!(
            out,
            "axes={} shots={} seed={}",
            record.setting.label(),
            record.shots,
            record.seed
        );
    }
    out
}

/// Linear-inversion tomography result. `estimate` is Hermitian with
/// unit trace by construction; sampling noise can push eigenvalues
/// slightly negative, so the validated state is only built on request.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub coefficients: PauliCoefficients,
    pub estimate: CMatrix,
    pub min_eigenvalue: f64,
    pub repaired: Option<DensityMatrix>,
}

/// Reconstruct from one outcome distribution per axis setting: each
/// coefficient is the sign-product expectation averaged over every
/// setting whose axes agree on the coefficient's subset. With exact
/// distributions this inverts [`pauli_coefficients`] exactly.
pub fn reconstruct_from_distributions(
    data: &[(AxisSetting, Vec<f64>)],
    qubits: usize,
    repair: bool,
) -> Result<Reconstruction> {
    let dim = 1usize << qubits;
    let mut by_label: BTreeMap<String, &[f64]> = BTreeMap::new();
    for (setting, distribution) in data {
        if setting.qubits() != qubits {
            return Err(Error::LengthMismatch { expected: qubits, actual: setting.qubits() });
        }
        if distribution.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, actual: distribution.len() });
        }
        if by_label.insert(setting.label(), distribution).is_some() {
            return Err(Error::DuplicateSetting { axes: setting.label() });
        }
    }
    let all_settings = AxisSetting::all(qubits);
    for setting in &all_settings {
        if !by_label.contains_key(&setting.label()) {
            return Err(Error::MissingSetting { axes: setting.label() });
        }
    }
    let mut coefficients = PauliCoefficients::empty(qubits);
    for key in all_keys(qubits) {
        let mut total = 0.0;
        let mut matches = 0usize;
        for setting in &all_settings {
            if key.iter().any(|&(q, axis)| setting.axis(q) != axis) {
                continue;
            }
            let distribution = by_label[&setting.label()];
            let mut signed = 0.0;
            for (k, &weight) in distribution.iter().enumerate() {
                let sign: f64 = key.iter().map(|&(q, _)| bit_sign(k, q)).product();
                signed += weight * sign;
            }
            total += signed;
            matches += 1;
        }
        coefficients.set(key, total / matches as f64)?;
    }
    let estimate = matrix_from_coefficients(&coefficients);
    let spectral = hermitian_eig(&estimate)?;
    let min_eigenvalue = spectral.eigenvalues.last().copied().unwrap_or(0.0);
    let repaired = if repair {
        let total: f64 = spectral.eigenvalues.iter().map(|&v| v.max(0.0)).sum();
        let rebuilt = spectral.assemble(|v| Complex64::new(v.max(0.0) / total, 0.0));
        Some(DensityMatrix::new(rebuilt)?)
    } else {
        None
    };
    Ok(Reconstruction { coefficients, estimate, min_eigenvalue, repaired })
}

/// [`reconstruct_from_distributions`] over empirical frequency tables.
pub fn reconstruct_state(
    data: &[(AxisSetting, FrequencyTable)],
    qubits: usize,
    repair: bool,
) -> Result<Reconstruction> {
    let distributions: Vec<(AxisSetting, Vec<f64>)> = data
        .iter()
        .map(|(setting, table)| (setting.clone(), table.frequencies()))
        .collect();
    reconstruct_from_distributions(&distributions, qubits, repair)
}

/// The maximally entangling rotation: component `k` mixes with its
/// bit-complement `2^p - 1 - k` through angle `j_k` and exchange phase
/// `phi_k`, one pair per `k < 2^{p-1}`. A zero angle leaves its pair
/// untouched.
pub fn max_entangling_unitary(j: &[f64], phi: &[f64], qubits: usize) -> Result<CMatrix> {
    let dim = 1usize << qubits;
    let pairs = dim / 2;
    if j.len() != pairs {
        return Err(Error::LengthMismatch { expected: pairs, actual: j.len() });
    }
    if phi.len() != pairs {
        return Err(Error::LengthMismatch { expected: pairs, actual: phi.len() });
    }
    let mut u = CMatrix::zeros(dim, dim);
    for k in 0..pairs {
        let partner = dim - 1 - k;
        let (sin, cos) = j[k].sin_cos();
        u[(k, k)] = Complex64::new(cos, 0.0);
        u[(partner, partner)] = Complex64::new(cos, 0.0);
        u[(partner, k)] = Complex64::new(0.0, sin) * Complex64::from_polar(1.0, phi[k]);
        u[(k, partner)] = Complex64::new(0.0, sin) * Complex64::from_polar(1.0, -phi[k]);
    }
    Ok(u)
}

/// Classify a p-qubit unitary: Stabilizer when it commutes with every
/// computational projector, Local when its principal generator carries
/// single-qubit terms only, Entangling otherwise.
pub fn classify_multiqubit_transform(u: &CMatrix) -> Result<TransformClass> {
    let qubits = qubit_count(u.rows())?;
    let deviation = u.unitarity_deviation();
    if deviation > scaled(UNITARITY) {
        return Err(Error::NotUnitary { deviation });
    }
    let dim = 1usize << qubits;
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
    let generator = crate::linalg::generator_from_unitary(u)?;
    for key in all_keys(qubits) {
        if key.len() < 2 {
            continue;
        }
        let weight = pauli_product_trace(&generator, &key).re / dim as f64;
        if weight.abs() >= scaled(CROSS_TERM) {
            return Ok(TransformClass::Entangling);
        }
    }
    Ok(TransformClass::Local)
}
