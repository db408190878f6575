//! Classical and quantum reduction toolkit for superconducting circuits whose
//! nonlinear element is shunted by a vanishing parasitic capacitance.
//!
//! All solvers consume the adimensional [`params::ReducedCircuit`]; SI values
//! are confined to [`params`].

pub mod constants;
pub mod dynamics;
pub mod foster;
pub mod linalg;
pub mod error;
pub mod params;
pub mod potentials;
pub mod reduction;
pub mod spectra;
pub mod table;

pub use error::{Error, ErrorClass, Result};
