//! Phase-lag Kuramoto networks and their complex-valued linearisation:
//! coupling-matrix builders, spectra, trajectories, and equilibria read off
//! from eigenvectors with constant-modulus entries.

pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod graphs;
pub mod spectral;

pub use error::{KuramotoError, Result};
