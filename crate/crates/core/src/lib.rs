//! Finite-temperature expectation values of open spin-1/2 chains from
//! sampled pure states.
//!
//! Initial states are drawn from one of three classes (Haar-random vectors,
//! random-phase product states, or product states scrambled by a
//! first-order Trotter circuit), evolved in imaginary time with a
//! matrix-free Taylor propagator, and combined into weighted or norm-free
//! thermal estimates. The sampling efficiency `eta = exp(I) / M`, with `I`
//! the entropy of the normalized sample weights, measures how close a class
//! comes to ideal sampling.

pub mod error;
pub mod estimators;
pub mod experiment;
pub mod hamiltonian;
pub mod hilbert;
pub mod imagtime;
pub mod oracle;
pub mod state_prep;

pub use error::{Error, Result};
pub use hamiltonian::{HamiltonianTerms, ModelKind, ModelSpec};
pub use hilbert::{SiteIndex, StateVector};
pub use imagtime::{BetaGrid, Checkpoint, PropagatorConfig};
pub use state_prep::{SampleSeed, TrotterCircuit};
