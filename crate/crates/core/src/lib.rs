//! Perturbations of totally geodesic wave maps into spaceforms.
//!
//! The crate builds the decoupled wave / Klein-Gordon system from the
//! geometry of a spaceform in Fermi coordinates, evolves it in radial
//! symmetry, and measures energies on the hyperboloidal foliation
//! `t^2 - r^2 = tau^2`.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod foliation;
pub mod geometry;
pub mod pde;
pub mod solver;

pub use error::{Error, Result};
