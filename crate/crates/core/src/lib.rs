//! Colored Motzkin spin chain.
//!
//! Exact walk counting, Schmidt spectra and entanglement entropy, the frustration-free
//! Hamiltonian and its low spectrum, the Dyck-space Markov chain with canonical-path bounds,
//! Brownian-excursion-area machinery for the trial-state gap bound, and the external-field
//! model.

pub mod error;
pub mod excursion;
pub mod field;
pub mod hamiltonian;
pub mod markov;
pub mod numeric;
pub mod schmidt;
pub mod walks;

pub use error::{Error, Result};
pub use excursion::{ExcursionDensity, GapBound, TrialEnergy, TrialState};
pub use field::{FieldLevel, FieldReport, SectorEnergy};
pub use hamiltonian::{
    build_hamiltonian, lowest_spectrum, Boundary, ChainSpec, LinearOperator, SparseOperator, SpectrumResult,
};
pub use schmidt::{EntropyReport, EntropyUnit, SchmidtSpectrum};
pub use walks::{CountTable, Step, Walk, WalkFilter};
