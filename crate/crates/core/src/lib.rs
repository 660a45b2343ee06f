//! Spin-½ coupled to finite quantum baths: exact diagonalization of random
//! matrix and Ising baths, fidelity susceptibility statistics, resonance
//! entropies, spin memory and the bath seen by a second probe.

pub mod bath_probe;
pub mod dynamics;
pub mod ensembles;
pub mod error;
pub mod fidelity;
pub mod harness;
pub mod linalg;
pub mod models;
pub mod numerics;
pub mod resonance;
pub mod rng;
pub mod spectra;

pub use error::{Error, Result};
pub use linalg::{Hermitian, Operator};
pub use spectra::EigenSystem;
