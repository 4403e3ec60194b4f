//! Simulation and closed-form analysis of single-photon interference whose
//! which-path information is recorded by a cross-Kerr QND measurement on a
//! coherent probe, plus the polarization-entangled Bell variant.
//!
//! Two independent routes compute every observable: an exact truncated
//! state-vector simulation ([`interferometer`], [`bell`] state routines) and
//! closed forms ([`analytic`], [`bell`] formulas).

pub mod analytic;
pub mod bell;
pub mod coherence;
pub mod ensemble;
mod error;
pub mod fock;
pub mod interferometer;

pub use error::{Error, Result};
pub use num_complex::Complex64;
