//! Centralized numerical tolerances.
//!
//! Every validation threshold in the crate lives here so that acceptance
//! limits are pinned in one place. Validation tolerances (and only those)
//! can be loosened globally through the `QP_TOLERANCE_SCALE` environment
//! variable: the value is read once per process and multiplies the return
//! value of [`scaled`]. Thresholds that influence computed results rather
//! than input acceptance (probability clamps, rank cutoffs, phase reporting)
//! deliberately ignore the scale.

use std::sync::OnceLock;

/// Max allowed `|M - M'|` entry for Hermitian inputs.
pub const HERMITICITY: f64 = 1e-10;
/// Max allowed `|U'U - I|` entry for unitary inputs.
pub const UNITARITY: f64 = 1e-10;
/// Max allowed `|tr - 1|` for density matrices.
pub const UNIT_TRACE: f64 = 1e-12;
/// Density-matrix eigenvalues may undershoot zero by this much.
pub const EIGENVALUE_FLOOR: f64 = 1e-10;
/// Max allowed deviation of a pure-state norm from 1.
pub const UNIT_NORM: f64 = 1e-12;
/// A state director may exceed unit length by this much.
pub const DIRECTOR_EXCESS: f64 = 1e-12;
/// Counter directors must be unit length within this tolerance.
pub const DIRECTOR_UNIT: f64 = 1e-9;
/// Max allowed `|P_i P_j|` entry for distinct projectors of a resolution.
pub const RESOLUTION_ORTHOGONALITY: f64 = 1e-9;
/// Max allowed `|sum P_k - I|` entry for a resolution of identity.
pub const RESOLUTION_COMPLETENESS: f64 = 1e-10;
/// Max residual when a spectral decomposition is reassembled.
pub const REASSEMBLY: f64 = 1e-10;
/// Entropy input probabilities must sum to 1 within this tolerance.
pub const ENTROPY_INPUT: f64 = 1e-9;

/// Portrait values may undershoot zero by this much before being clamped.
pub const PROBABILITY_CLAMP: f64 = 1e-12;
/// A portrait distribution must sum to 1 within this tolerance.
pub const PROBABILITY_SUM: f64 = 1e-10;
/// Outcomes below this probability cannot legitimately be sampled.
pub const ZERO_PROBABILITY: f64 = 1e-15;
/// Conditioning denominators below this magnitude are rejected.
pub const CONDITION_FLOOR: f64 = 1e-12;
/// Singular values below this fraction of the largest do not count as rank.
pub const RANK_RELATIVE: f64 = 1e-9;
/// A covariance matrix whose largest singular value is below this has rank 0.
pub const RANK_FLOOR: f64 = 1e-12;
/// Eigenphases above this magnitude are reported as nonzero.
pub const PHASE_REPORT: f64 = 1e-9;
/// Generator cross coefficients above this make a transform entangling.
pub const CROSS_TERM: f64 = 1e-9;
/// Off-diagonal unitary entries above this break the stabilizer property.
pub const STABILIZER_OFFDIAG: f64 = 1e-9;
/// Column-overlap magnitudes below this fall back to the canonical phase.
pub const ALIGNMENT_FLOOR: f64 = 1e-12;

/// Multiplier applied by [`scaled`], from `QP_TOLERANCE_SCALE`.
///
/// Defaults to 1.0; non-positive or unparseable values are ignored.
pub fn scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        std::env::var("QP_TOLERANCE_SCALE")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(1.0)
    })
}

/// A validation tolerance adjusted by the global scale.
pub fn scaled(tolerance: f64) -> f64 {
    tolerance * scale()
}
