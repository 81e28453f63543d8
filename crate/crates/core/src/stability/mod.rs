//! The constrained second variation `δ²E_β + Q` of an equivariant torus: its blocks per
//! y-mode, their spectra, kernel and index counts, and the bifurcations of the homogeneous
//! family.

pub mod bifurcation;
pub mod forms;
pub mod kernel;
pub mod spectrum;

pub use bifurcation::{bifurcation_scan, bifurcation_scan_with, profile_eigenvalue, profile_eigenvalue_with, Crossing};
pub use forms::{
    curve_hessian, hessian_form, mode_operator, q1_apply, q2_apply, q_apply, tensorial_form, OperatorMatrix, Sampled,
    XBasis,
};
pub use kernel::{kernel_ode_residual, p_multiplier_apply, pi1_second_variation, q1op_kernel, q1op_spectrum, q_kernel, QKernel};
pub use spectrum::{
    full_hessian, mobius_q_structure, q_mode_spectrum, Classified, MobiusQCheck, ModeSpectrum, SpectrumReport, Verdict,
    GAP_FACTOR, KERNEL_TOL_SCALE,
};
