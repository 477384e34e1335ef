//! Phase portraits and measurement statistics for qudit and multiqubit
//! states.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] - dense complex matrices and spectral decompositions.
//! * [`qudit`] - density matrices, resolutions of identity, generalized
//!   Pauli bases, basis-transform matrices, and phase portraits.
//! * [`measure`] - seeded measurement acts and series, reduced densities,
//!   reduction measures, and measurement entropy.
//! * [`bipartite`] - two-factor layouts, pair coefficient extraction,
//!   conditional states and directors, entanglement and transform
//!   classification.
//! * [`multiqubit`] - qubit subalgebras, product counters, coefficient
//!   tomography, partial densities, effective directors, and maximally
//!   entangling transforms.
//!
//! All validation tolerances are centralized in [`tolerance`] and scale with
//! the `QP_TOLERANCE_SCALE` environment variable. Every randomized routine
//! takes an explicit seed and is replayable bit-for-bit.

pub mod composite;
pub mod error;
pub mod fmt;
pub mod linalg;
pub mod measure;
pub mod multiqubit;
pub mod qudit;
pub mod random;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use qudit::{DensityMatrix, Observable, PauliBasis, PureState, ResolutionOfIdentity};
