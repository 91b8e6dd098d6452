//! Exact diagonalization of the two-qubit Dicke model and its ion-trap variant.

pub mod banded;
pub mod classify;
pub mod cli;
pub mod csvio;
pub mod dynamics;
pub mod eigensolver;
pub mod entanglement;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod recurrence;
pub mod sweep;

pub use error::{Error, Result};
