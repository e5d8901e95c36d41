//! Entanglement extraction from identical fermions by splitting and particle
//! detection.
//!
//! States are kept in occupation-number form ([`fock::FockVector`]); a dense
//! first-quantized representation ([`oracle`]) re-derives spectra and
//! reduced states by brute force for cross-checking.

pub mod basis;
pub mod closed_form;
pub mod concurrence;
pub mod density;
pub mod detector;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod oracle;
pub mod pipeline;
pub mod scenario;
pub mod transforms;

pub use basis::{binomial, OccupationState, OrbitalBasis};
pub use density::SectorDensity;
pub use error::{Error, Result};
pub use fock::FockVector;
pub use oracle::FirstQuantizedTensor;
pub use transforms::{CountingDistribution, SingleParticleUnitary};
