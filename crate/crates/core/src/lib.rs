//! Stability of constrained Willmore tori of revolution: free hyperbolic elastica,
//! equivariant tori over them, their conformal class, and the spectrum of the constrained
//! second variation.

pub mod cli;
pub mod elastica;
pub mod error;
pub mod geometry;
pub mod spectral;
pub mod stability;
pub mod surface;

pub use error::{Error, Result};
