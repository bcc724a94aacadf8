//! Dynamics and information measures for a two-level ion driven by a laser in
//! a q-deformed harmonic trap.
//!
//! The pipeline is: build the truncated Hamiltonian ([`model`]), diagonalize it
//! once ([`propagator`]), evolve the initial states over a grid of rescaled
//! times, reduce to the ion ([`observables`]) and look for collapses and
//! revivals in the result ([`analysis`]). [`cli`] wires these into commands
//! that write CSV files.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod jacobi;
pub mod model;
pub mod observables;
pub mod propagator;
pub mod qalgebra;
pub mod simulation;

pub use error::{Error, Result};
pub use model::{InitialKind, JointState, SystemParams};
pub use qalgebra::DeformationParams;
