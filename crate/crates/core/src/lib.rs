//! Simulation and sampling toolkit for noisy, geometrically local random
//! circuits.
//!
//! Circuits act on a `D`-dimensional lattice; every layer of nearest-neighbor
//! gates is followed by single-qubit depolarizing noise. The crate provides an
//! exact density-matrix backend, Pauli-basis inclusion-exclusion truncations,
//! several samplers and numerical checks of the associated decay bounds.

pub mod analysis;
pub mod circuit;
pub mod dense;
mod error;
pub mod lattice;
pub mod pauli;
pub mod samplers;

pub use error::{Error, Result};

/// Size limits for exponential-cost representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guards {
    /// Largest qubit count for a dense `4^n` density matrix.
    pub max_dense_qubits: usize,
    /// Largest qubit count for a `2^n` statevector.
    pub max_statevector_qubits: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Self { max_dense_qubits: 13, max_statevector_qubits: 24 }
    }
}
