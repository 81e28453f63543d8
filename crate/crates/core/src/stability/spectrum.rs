//! Spectra per y-mode, kernel and index counts modulo the Möbius directions, and the
//! stability verdict.

use super::forms::{constraint_vector, q_on, resolved, tensorial_on, XBasis};
use crate::elastica::TorusImmersion;
use crate::error::{Error, Result};
use crate::geometry::{mobius_profiles, MOBIUS_RANK_GAP, MOBIUS_RANK_TOL};
use crate::spectral::linalg::{complement_basis, orthonormal_span, spectral_norm};
use crate::spectral::{inertia, numerical_rank, sym_eig, FourierField, Inertia};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Eigenvalues below `KERNEL_TOL_SCALE·‖S‖₂` of the Sobolev-scaled block count as zero.
pub const KERNEL_TOL_SCALE: f64 = 1e-6;
/// Required ratio between the smallest nonzero and the largest zero eigenvalue.
pub const GAP_FACTOR: f64 = 10.0;

/// Sobolev weight `1 + l² + m²` of each basis element.
fn sobolev_weights(basis: &XBasis, m: usize) -> DVector<f64> {
    DVector::from_fn(basis.dim(), |a, _| 1.0 + basis.freq(a).powi(2) + (m * m) as f64)
}

/// Spectrum of a form on the subspace spanned by the columns of `z`.
#[derive(Clone, Debug)]
pub struct Classified {
    /// L² eigenvalues of `zᵀHz` (z orthonormal).
    pub l2_values: Vec<f64>,
    /// Eigenvalues of the congruent Sobolev-scaled form.
    pub scaled_values: Vec<f64>,
    pub inertia: Inertia,
    /// Kernel directions in x-Fourier coordinates.
    pub kernel: DMatrix<f64>,
    /// Negative directions in x-Fourier coordinates.
    pub negative: DMatrix<f64>,
    pub scale: DVector<f64>,
}

/// Classifies `zᵀHz` through the generalised problem `zᵀHz y = λ zᵀD²z y`.
pub fn classify(h: &DMatrix<f64>, z: &DMatrix<f64>, basis: &XBasis, m: usize) -> Result<Classified> {
    let d = sobolev_weights(basis, m);
    let a = z.transpose() * h * z;
    let a = (&a + a.transpose()) * 0.5;
    let dz = DMatrix::from_fn(z.nrows(), z.ncols(), |i, j| d[i] * z[(i, j)]);
    let r = dz.transpose() * &dz;
    let chol = r.cholesky().ok_or_else(|| Error::Conditioning("Sobolev Gram matrix is not positive".into()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::Conditioning("singular Sobolev factor".into()))?;
    let s = &linv * &a * linv.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let eig = sym_eig(&s)?;
    let tol = KERNEL_TOL_SCALE * spectral_norm(&s);
    let inertia = inertia(&eig.values, tol);
    let back = z * linv.transpose();
    let pick = |keep: &dyn Fn(f64) -> bool| {
        let cols: Vec<DVector<f64>> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| keep(v))
            .map(|(i, _)| &back * eig.vectors.column(i))
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(z.nrows(), 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    };
    let kernel = pick(&|v| v.abs() < tol);
    let negative = pick(&|v| v <= -tol);
    let l2_values = sym_eig(&a)?.values;
    Ok(Classified { l2_values, scaled_values: eig.values, inertia, kernel, negative, scale: d })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

/// One y-mode block of the constrained Hessian.
#[derive(Clone, Debug, Serialize)]
pub struct ModeSpectrum {
    pub mode: usize,
    /// 1 for `m = 0`, 2 for the identical `cos(my)` and `sin(my)` blocks.
    pub multiplicity: usize,
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub scaled_eigenvalues: Vec<f64>,
    pub kernel_tol: f64,
    pub kernel_dim: usize,
    pub index: usize,
    pub positive: usize,
    pub gap: f64,
    pub invariance_dim: usize,
    /// Largest distance of a unit Möbius direction from the computed kernel.
    pub invariance_residual: f64,
    #[serde(skip)]
    pub kernel: DMatrix<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub torus_id: String,
    pub b: f64,
    pub beta: f64,
    pub jmax: usize,
    pub m_max: usize,
    pub modes: Vec<ModeSpectrum>,
    pub kernel_dim: usize,
    pub index: usize,
    pub invariance_dim: usize,
    pub kernel_beyond_invariance: usize,
    pub min_gap: f64,
    pub kernel_tol_scale: f64,
    pub gap_factor: f64,
    pub verdict: Verdict,
}

impl SpectrumReport {
    pub fn mode(&self, m: usize) -> Option<&ModeSpectrum> {
        self.modes.iter().find(|s| s.mode == m)
    }

    /// Kernel directions as fields; each kernel vector of a mode `m ≥ 1` is returned with `cos(my)`.
    pub fn kernel_fields(&self) -> Vec<FourierField> {
        let basis = XBasis { b: self.b, jmax: self.jmax };
        self.modes
            .iter()
            .flat_map(|s| (0..s.kernel.ncols()).map(move |i| basis.field(s.kernel.column(i).as_slice(), s.mode, false)))
            .collect()
    }
}

pub(crate) fn torus_id(torus: &TorusImmersion) -> String {
    format!("{}:b={}", torus.branch.name(), torus.b)
}

/// Möbius directions of y-mode `m` in x-Fourier coordinates.
pub(crate) fn invariance_vectors(torus: &TorusImmersion, basis: &XBasis, m: usize) -> Vec<DVector<f64>> {
    if m > 1 {
        return Vec::new();
    }
    let profiles = mobius_profiles(&torus.curve);
    let raw: Vec<&Vec<f64>> = if m == 0 {
        profiles.iter().map(|p| &p.mode0).collect()
    } else {
        profiles.iter().flat_map(|p| [&p.cos_part, &p.sin_part]).collect()
    };
    raw.into_iter()
        .filter(|p| p.iter().any(|v| *v != 0.0))
        .map(|p| {
            let v = basis.project(p);
            let n = v.norm();
            v / n
        })
        .collect()
}

fn span_rank(vs: &[DVector<f64>]) -> Result<(usize, DMatrix<f64>)> {
    if vs.is_empty() {
        return Ok((0, DMatrix::zeros(0, 0)));
    }
    let m = DMatrix::from_columns(vs);
    let rank = numerical_rank(&m, MOBIUS_RANK_TOL, MOBIUS_RANK_GAP)?.rank;
    Ok((rank, m))
}

fn kernel_residual(kernel: &DMatrix<f64>, vs: &DMatrix<f64>) -> f64 {
    if vs.ncols() == 0 {
        return 0.0;
    }
    if kernel.ncols() == 0 {
        return 1.0;
    }
    let q = orthonormal_span(kernel, 1e-12);
    (0..vs.ncols())
        .map(|i| {
            let v = vs.column(i).into_owned();
            let v = &v / v.norm();
            (&v - &q * (q.transpose() * &v)).norm()
        })
        .fold(0.0, f64::max)
}

/// Block-diagonal assembly over y-modes `0..=m_max` with the Möbius directions set aside.
pub fn full_hessian(torus: &TorusImmersion, m_max: usize, jmax: usize) -> Result<SpectrumReport> {
    if m_max < 2 {
        return Err(Error::Input(format!("m_max = {m_max} must be at least 2")));
    }
    if jmax < 8 {
        return Err(Error::Input(format!("x-cutoff J = {jmax} is below 8")));
    }
    let t = resolved(torus, jmax)?;
    let basis = XBasis { b: t.b, jmax };
    let mut modes = Vec::with_capacity(m_max + 1);
    let tens = tensorial_on(&t, &basis);
    for m in 0..=m_max {
        let h = &tens + q_on(&t, &basis, m);
        let z = if m == 0 { complement_basis(&constraint_vector(&t, &basis)) } else { DMatrix::identity(basis.dim(), basis.dim()) };
        let c = classify(&h, &z, &basis, m)?;
        let inv = invariance_vectors(&t, &basis, m);
        let inv: Vec<DVector<f64>> = inv.iter().map(|v| &z * (z.transpose() * v)).filter(|v| v.norm() > 1e-8).collect();
        let (invariance_dim, inv_m) = span_rank(&inv)?;
        modes.push(ModeSpectrum {
            mode: m,
            multiplicity: if m == 0 { 1 } else { 2 },
            dim: z.ncols(),
            eigenvalues: c.l2_values,
            scaled_eigenvalues: c.scaled_values,
            kernel_tol: c.inertia.tol,
            kernel_dim: c.inertia.zero,
            index: c.inertia.negative,
            positive: c.inertia.positive,
            gap: c.inertia.gap,
            invariance_dim,
            invariance_residual: kernel_residual(&c.kernel, &inv_m),
            kernel: c.kernel,
        });
    }
    let total = |f: &dyn Fn(&ModeSpectrum) -> usize| modes.iter().map(|s| s.multiplicity * f(s)).sum::<usize>();
    let kernel_dim = total(&|s| s.kernel_dim);
    let index = total(&|s| s.index);
    let invariance_dim = total(&|s| s.invariance_dim);
    let kernel_beyond_invariance = kernel_dim.saturating_sub(invariance_dim);
    let min_gap = modes.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    let verdict = if index > 0 {
        Verdict::Unstable
    } else if kernel_beyond_invariance <= 1 && min_gap >= GAP_FACTOR {
        Verdict::Stable
    } else {
        Verdict::Marginal
    };
    Ok(SpectrumReport {
        torus_id: torus_id(torus),
        b: t.b,
        beta: t.beta,
        jmax,
        m_max,
        modes,
        kernel_dim,
        index,
        invariance_dim,
        kernel_beyond_invariance,
        min_gap,
        kernel_tol_scale: KERNEL_TOL_SCALE,
        gap_factor: GAP_FACTOR,
        verdict,
    })
}

/// Classification of `Q` alone on y-mode `m`.
pub fn q_mode_spectrum(torus: &TorusImmersion, m: usize, jmax: usize) -> Result<Classified> {
    let t = resolved(torus, jmax)?;
    let basis = XBasis { b: t.b, jmax };
    classify(&q_on(&t, &basis, m), &DMatrix::identity(basis.dim(), basis.dim()), &basis, m)
}

/// How `Q` on y-mode 1 sits relative to the Möbius directions of that mode.
#[derive(Clone, Debug, Serialize)]
pub struct MobiusQCheck {
    /// Dimension of the Möbius span in one mode-1 block.
    pub mobius_dim: usize,
    /// Largest Sobolev Rayleigh quotient of `Q` on the Möbius span.
    pub max_on_mobius: f64,
    /// Smallest Sobolev eigenvalue of `Q` on the complement of the Möbius span.
    pub min_on_complement: f64,
    /// Non-positive directions of `Q` in one block.
    pub nonpositive: usize,
    pub kernel_tol: f64,
}

impl MobiusQCheck {
    pub fn holds(&self) -> bool {
        self.max_on_mobius <= self.kernel_tol && self.min_on_complement > self.kernel_tol && self.nonpositive == self.mobius_dim
    }
}

pub fn mobius_q_structure(torus: &TorusImmersion, jmax: usize) -> Result<MobiusQCheck> {
    let t = resolved(torus, jmax)?;
    let basis = XBasis { b: t.b, jmax };
    let q = q_on(&t, &basis, 1);
    let all = classify(&q, &DMatrix::identity(basis.dim(), basis.dim()), &basis, 1)?;
    let inv = invariance_vectors(&t, &basis, 1);
    let (mobius_dim, inv_m) = span_rank(&inv)?;
    let d = &all.scale;
    // Sobolev-orthonormal basis of the Möbius span, then of its complement.
    let dm = DMatrix::from_fn(inv_m.nrows(), inv_m.ncols(), |i, j| d[i] * inv_m[(i, j)]);
    let w = orthonormal_span(&dm, 1e-8);
    let w = w.columns(0, mobius_dim.min(w.ncols())).into_owned();
    let unscale = |m: &DMatrix<f64>| DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / d[i]);
    let on = unscale(&w);
    let rq = on.transpose() * &q * &on;
    let max_on_mobius = sym_eig(&((&rq + rq.transpose()) * 0.5))?.values.last().copied().unwrap_or(f64::NEG_INFINITY);
    let comp = {
        let proj = DMatrix::identity(basis.dim(), basis.dim()) - &w * w.transpose();
        let e = sym_eig(&proj)?;
        let cols: Vec<DVector<f64>> =
            (0..basis.dim()).filter(|&i| e.values[i] > 0.5).map(|i| e.vectors.column(i).into_owned()).collect();
        unscale(&DMatrix::from_columns(&cols))
    };
    let rc = comp.transpose() * &q * &comp;
    let min_on_complement = sym_eig(&((&rc + rc.transpose()) * 0.5))?.values[0];
    Ok(MobiusQCheck {
        mobius_dim,
        max_on_mobius,
        min_on_complement,
        nonpositive: all.inertia.negative + all.inertia.zero,
        kernel_tol: all.inertia.tol,
    })
}
