//! Simulation core for Hamiltonian fast-forwarding and super-efficient energy
//! measurement.
//!
//! Dense statevectors and exact spectral oracles live in [`linalg`], [`state`]
//! and [`evolve`]. Everything else is checked against them.
#![no_std]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dd;
pub mod error;
pub mod evolve;
pub mod ff;
pub mod gates;
pub mod linalg;
pub mod rng;
pub mod shor;
pub mod state;
pub mod tolerance;

pub mod algorithms;
pub mod pe;
pub mod seem;
pub mod teup;
pub mod zoo;

pub use num_complex::Complex64 as C64;

pub use dd::DoubleDouble;
pub use error::{Error, Result};
pub use evolve::{dense_evolve, Time};
pub use ff::{controlled_power_apply, Angle, FastForwardableUnitary};
pub use linalg::DenseOperator;
pub use rng::RngStream;
pub use state::{state_distance, StateVector};
pub use tolerance::Tolerances;
