//! Shared numerical kernels: periodic Fourier fields, spectral differentiation,
//! quadrature, dense symmetric eigenproblems and finite-difference oracles.

pub mod fd;
pub mod field;
pub mod jet;
pub mod linalg;
pub mod periodic;

pub use fd::{fd_second_derivative, FdEstimate};
pub use field::{inner, quadrature, Axis, Family, FourierField, Grid};
pub use jet::{Jet2, Scalar};
pub use linalg::{inertia, numerical_rank, sym_eig, Inertia, RankInfo, SymEig};
