//! Hermitian phase operator of the quantum harmonic oscillator in a
//! truncated number basis.
//!
//! The crate builds `cos 2φ̂` as an exact banded matrix, solves its
//! eigenstates with Gegenbauer polynomials, and realizes `φ̂` and its
//! functions by spectral quadrature over those eigenstates. Supporting
//! modules cover Heisenberg-picture dynamics, phase moments and
//! distributions, coherent-state limits, and the older Susskind–Glogower
//! and Pegg–Barnett constructions used as contrast.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod io;
pub mod legacy;
pub mod observables;
pub mod phase_operators;
pub mod phase_states;
pub mod special;
pub mod verify;

pub use error::{PhaseError, Result};
