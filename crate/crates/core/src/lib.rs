//! Spectra and propagation of the non-Hermitian two-mode beam-splitter model.

pub mod cli;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod spectrum;
pub mod sweep;
