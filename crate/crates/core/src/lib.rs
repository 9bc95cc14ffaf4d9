//! Exact-diagonalization toolkit for chaotic many-body dynamics.
//!
//! Two model families are provided: fermions with random two-body
//! interactions and a disordered Ising-type spin chain. Both produce a
//! sparse symmetric Hamiltonian in a basis of unperturbed many-body states,
//! which is diagonalized densely and then used to evolve basis-state packets,
//! build strength functions and level-spacing statistics, and compare against
//! closed-form estimates in [`theory`].

pub mod basis;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod observables;
pub mod rng;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};
