//! Alternating-unitary approximation of adiabatic transformation.
//!
//! Parallel transport of an energy eigenstate along a parameter path is
//! approximated by a Trotterized product of exponentials of the Hamiltonian
//! and of its parameter derivative. The crate builds that product, the
//! adiabatic gauge potentials it approximates, a reference adiabatic
//! propagator, and a sweep harness comparing both on a two-level spin flip
//! and on quantum annealing of the p-spin model.

pub mod adiabatic;
pub mod agp;
pub mod alternating;
pub mod bench;
pub mod error;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
