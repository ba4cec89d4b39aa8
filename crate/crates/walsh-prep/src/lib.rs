//! Classical learning of diagonal Hamiltonians for amplitude-encoded state
//! preparation.
//!
//! The circuit alternates all-qubit Hadamard layers (fast Walsh–Hadamard
//! transforms) with diagonal phase evolutions. Training runs entirely on the
//! classical side; the crate simulates the circuit, optimizes the Hamiltonian
//! coefficients against a target amplitude vector, and can emit the truncated
//! Walsh-basis evolution as an OpenQASM 2.0 gate list.

pub mod circuit;
pub mod cli;
pub mod datasets;
pub mod pipeline;
pub mod statevec;
pub mod train;
pub mod walsh;

mod error;

pub use error::Error;
pub use statevec::{DiagonalHamiltonian, StateVector};
pub use walsh::{SelectionKind, TermSet, TopologyGraph, WalshSpectrum};

pub type Result<T> = std::result::Result<T, Error>;

/// Largest supported register size. 2^26 amplitudes is ~1 GiB of complex
/// doubles, the desk-scale cap used by input validation everywhere.
pub const MAX_QUBITS: u32 = 26;
