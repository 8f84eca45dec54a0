//! Lattice-point shells, autocorrelation spectra of toral eigenfunctions,
//! translate-vector sweeps and a spectral `l^p` extremizer.

pub mod cli;
pub mod error;
pub mod extremizer;
pub mod lattice;
pub mod lemma;
mod rank;
pub mod spectra;

pub use error::{Error, Result};
