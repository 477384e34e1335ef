//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of validation, numerics, and text ingestion.
///
/// Validation thresholds referenced in the messages are the defaults from
/// [`crate::tolerance`]; all of them scale with `QP_TOLERANCE_SCALE`.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M'| entry is {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary: max |U'U - I| entry is {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix trace {trace:.12e} is not 1 within tolerance")]
    NonUnitTrace { trace: f64 },

    #[error("density matrix has eigenvalue {value:.3e} below the validity floor")]
    NegativeEigenvalue { value: f64 },

    #[error("eigensolver failed to converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("projector {index} has rank {rank}, but a rank-1 resolution is required")]
    CoarseProjector { index: usize, rank: usize },

    #[error("director has length {norm:.12e} > 1; not a valid state direction")]
    DirectorTooLong { norm: f64 },

    #[error("counter director has length {norm:.12e}; a unit vector is required")]
    BadDirector { norm: f64 },

    #[error("probability vector sums to {sum:.12e}, not 1 within tolerance")]
    NotNormalized { sum: f64 },

    #[error("invalid probability value {value:.12e}")]
    InvalidProbability { value: f64 },

    #[error("sampled outcome {index} has vanishing probability")]
    ZeroProbabilityOutcome { index: usize },

    #[error("conditioning on an outcome of vanishing probability ({value:.3e})")]
    ZeroProbabilityCondition { value: f64 },

    #[error("index {index} out of range for bound {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("not a resolution of identity: {detail}")]
    InvalidResolution { detail: String },

    #[error("qubit subset is empty")]
    EmptySubset,

    #[error("no measurement data for axis setting `{axes}`")]
    MissingSetting { axes: String },

    #[error("duplicate measurement data for axis setting `{axes}`")]
    DuplicateSetting { axes: String },

    #[error("measurement record has no counted shots")]
    ShotCountZero,

    #[error("{source_name}{}: {message}", .line.map(|l| format!(":{l}")).unwrap_or_default())]
    Parse {
        source_name: String,
        line: Option<usize>,
        message: String,
    },
}

impl Error {
    /// Convenience constructor for text-format failures.
    pub fn parse(source_name: impl Into<String>, line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }
}
