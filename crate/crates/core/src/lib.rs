//! Wigner quasiprobability distribution of quantum work.
//!
//! A driven process (initial Hamiltonian, final Hamiltonian, driving unitary)
//! acting on an initial state is recorded by a Gaussian ancilla; the Wigner
//! function of that ancilla, in work/time coordinates, is a quasiprobability
//! distribution whose marginal reproduces the two-point-measurement statistics
//! and whose negativity signals initial energy coherences.

pub mod error;
pub mod qcore;
pub mod numeric;
pub mod spectral;
pub mod workstats;
pub mod wigner;
pub mod oracle;
pub mod scenarios;
pub mod cli;

pub use error::{Error, Result};
