//! Conformal modulus of a metric on the rectangular torus, and the ∂̄-problem.

use crate::error::{Error, Result};
use crate::spectral::periodic::{wavenumbers, Fft2};
use crate::spectral::{quadrature, Grid};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Spectral gradient and divergence on a grid.
pub struct GridOps {
    pub grid: Grid,
    fft: Fft2,
    /// Wavenumbers with the Nyquist mode zeroed, for odd-order operators.
    kx: Vec<f64>,
    ky: Vec<f64>,
    kx_full: Vec<f64>,
    ky_full: Vec<f64>,
}

fn drop_nyquist(mut k: Vec<f64>) -> Vec<f64> {
    let n = k.len();
    if n % 2 == 0 {
        k[n / 2] = 0.0;
    }
    k
}

impl GridOps {
    pub fn new(grid: Grid) -> Self {
        let kx_full = wavenumbers(grid.nx, 2.0 * PI * grid.b);
        let ky_full = wavenumbers(grid.ny, 2.0 * PI);
        GridOps {
            grid,
            fft: Fft2::new(grid.nx, grid.ny),
            kx: drop_nyquist(kx_full.clone()),
            ky: drop_nyquist(ky_full.clone()),
            kx_full,
            ky_full,
        }
    }

    fn map_real(&self, f: &[f64], sym: impl Fn(f64, f64) -> Complex64) -> Vec<f64> {
        let mut z = self.fft.forward(f);
        let ny = self.grid.ny;
        for (idx, v) in z.iter_mut().enumerate() {
            *v *= sym(self.kx[idx / ny], self.ky[idx % ny]);
        }
        self.fft.inverse(&z).iter().map(|c| c.re).collect()
    }

    pub fn dx(&self, f: &[f64]) -> Vec<f64> {
        self.map_real(f, |kx, _| Complex64::new(0.0, kx))
    }

    pub fn dy(&self, f: &[f64]) -> Vec<f64> {
        self.map_real(f, |_, ky| Complex64::new(0.0, ky))
    }

    pub fn div(&self, fx: &[f64], fy: &[f64]) -> Vec<f64> {
        let a = self.dx(fx);
        let b = self.dy(fy);
        a.iter().zip(b).map(|(p, q)| p + q).collect()
    }

    /// Zero-mean solution of `−Δw = r` (the mean of `r` is ignored).
    pub fn inverse_neg_laplacian(&self, r: &[f64]) -> Vec<f64> {
        self.map_real(r, |kx, ky| {
            let k2 = kx * kx + ky * ky;
            Complex64::new(if k2 == 0.0 { 0.0 } else { 1.0 / k2 }, 0.0)
        })
    }

    /// Zero-mean `p` with `∂̄p = ½(p_x + i p_y) = rhs`, via the full symbol `½(i k_x − k_y)`.
    pub fn dbar_inverse(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let mut z = self.fft.forward_complex(rhs);
        let ny = self.grid.ny;
        for (idx, v) in z.iter_mut().enumerate() {
            let s = Complex64::new(-0.5 * self.ky_full[idx % ny], 0.5 * self.kx_full[idx / ny]);
            *v = if s.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { *v / s };
        }
        self.fft.inverse(&z)
    }

    pub fn dbar(&self, p: &[Complex64]) -> Vec<Complex64> {
        let mut z = self.fft.forward_complex(p);
        let ny = self.grid.ny;
        for (idx, v) in z.iter_mut().enumerate() {
            *v *= Complex64::new(-0.5 * self.ky_full[idx % ny], 0.5 * self.kx_full[idx / ny]);
        }
        self.fft.inverse(&z)
    }
}

/// Point of the upper half plane, reduced to the standard fundamental domain.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ConformalClass {
    pub tau_re: f64,
    pub tau_im: f64,
    /// `Re τ`.
    pub pi1: f64,
    /// `Im τ`.
    pub pi2: f64,
}

impl ConformalClass {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() {
            return Err(Error::Degenerate(format!("τ = {re} + {im}i is not in the upper half plane")));
        }
        let (mut re, mut im) = (re, im);
        for _ in 0..64 {
            re -= (re - 0.5).ceil();
            let r2 = re * re + im * im;
            if r2 >= 1.0 - 1e-15 {
                break;
            }
            re = -re / r2;
            im /= r2;
        }
        Ok(ConformalClass { tau_re: re, tau_im: im, pi1: re, pi2: im })
    }
}

/// Result of the cell problem `min_w ∫ (e₁+∇w)ᵀ a (e₁+∇w)`, `a = √g g⁻¹`.
#[derive(Clone, Debug)]
pub struct CellSolution {
    pub a11: f64,
    pub a12: f64,
    pub iterations: usize,
}

pub fn cell_problem(ops: &GridOps, gxx: &[f64], gxy: &[f64], gyy: &[f64]) -> Result<CellSolution> {
    let n = gxx.len();
    if gxy.len() != n || gyy.len() != n || n != ops.grid.len() {
        return Err(Error::Shape("metric components do not match the grid".into()));
    }
    let mut axx = vec![0.0; n];
    let mut axy = vec![0.0; n];
    let mut ayy = vec![0.0; n];
    for i in 0..n {
        let det = gxx[i] * gyy[i] - gxy[i] * gxy[i];
        if !(det > 0.0) {
            return Err(Error::Degenerate(format!("metric is not positive definite (det {det:e})")));
        }
        let s = det.sqrt();
        axx[i] = gyy[i] / s;
        axy[i] = -gxy[i] / s;
        ayy[i] = gxx[i] / s;
    }
    let apply = |w: &[f64]| -> Vec<f64> {
        let (wx, wy) = (ops.dx(w), ops.dy(w));
        let fx: Vec<f64> = (0..n).map(|i| axx[i] * wx[i] + axy[i] * wy[i]).collect();
        let fy: Vec<f64> = (0..n).map(|i| axy[i] * wx[i] + ayy[i] * wy[i]).collect();
        ops.div(&fx, &fy).iter().map(|v| -v).collect()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let rhs = ops.div(&axx, &axy);
    let mut w = vec![0.0; n];
    let mut r = rhs.clone();
    let r0 = dot(&r, &r).sqrt();
    let mut iterations = 0;
    if r0 > 1e-300 {
        let mut z = ops.inverse_neg_laplacian(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        loop {
            iterations += 1;
            let ap = apply(&p);
            let al = rz / dot(&p, &ap);
            for i in 0..n {
                w[i] += al * p[i];
                r[i] -= al * ap[i];
            }
            let rn = dot(&r, &r).sqrt();
            if rn <= 1e-14 * r0 || rn < 1e-15 {
                break;
            }
            if iterations >= 2000 {
                return Err(Error::NoConvergence(format!("cell problem residual {:e}", rn / r0)));
            }
            z = ops.inverse_neg_laplacian(&r);
            let rz2 = dot(&r, &z);
            for i in 0..n {
                p[i] = z[i] + rz2 / rz * p[i];
            }
            rz = rz2;
        }
    }
    let (wx, wy) = (ops.dx(&w), ops.dy(&w));
    let grid = &ops.grid;
    let e: Vec<f64> = (0..n)
        .map(|i| {
            let (hx, hy) = (1.0 + wx[i], wy[i]);
            axx[i] * hx * hx + 2.0 * axy[i] * hx * hy + ayy[i] * hy * hy
        })
        .collect();
    let f: Vec<f64> = (0..n).map(|i| axy[i] * (1.0 + wx[i]) + ayy[i] * wy[i]).collect();
    Ok(CellSolution { a11: quadrature(&e, grid), a12: quadrature(&f, grid), iterations })
}

/// Conformal class of `g` on `ℝ/2πbℤ × ℝ/2πℤ`: `Im τ = 4π²b²/A₁₁`, `Re τ = b A₁₂/A₁₁`.
pub fn conformal_class(grid: &Grid, gxx: &[f64], gxy: &[f64], gyy: &[f64]) -> Result<ConformalClass> {
    let ops = GridOps::new(*grid);
    let cell = cell_problem(&ops, gxx, gxy, gyy)?;
    let b = grid.b;
    ConformalClass::new(b * cell.a12 / cell.a11, 4.0 * PI * PI * b * b / cell.a11)
}

/// Zero-mean solution of `∂̄p = rhs`.
#[derive(Clone, Debug)]
pub struct DbarSolution {
    pub grid: Grid,
    pub p: Vec<Complex64>,
}

impl DbarSolution {
    /// `∫ p dz` along the closed y-line `x = 0`.
    pub fn period_y(&self) -> Complex64 {
        let ny = self.grid.ny;
        let mean: Complex64 = self.p[..ny].iter().sum::<Complex64>() / ny as f64;
        Complex64::new(0.0, 2.0 * PI) * mean
    }

    pub fn mean(&self) -> Complex64 {
        self.p.iter().sum::<Complex64>() / self.p.len() as f64
    }
}

pub fn dbar_solve(rhs: &[Complex64], grid: &Grid) -> Result<DbarSolution> {
    if rhs.len() != grid.len() {
        return Err(Error::Shape(format!("{} samples for a {}x{} grid", rhs.len(), grid.nx, grid.ny)));
    }
    let mean: Complex64 = rhs.iter().sum::<Complex64>() / rhs.len() as f64;
    let scale = rhs.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if mean.norm() > 1e-10 * scale.max(1.0) {
        return Err(Error::NoSolution(format!("right-hand side has mean {mean}")));
    }
    let ops = GridOps::new(*grid);
    Ok(DbarSolution { grid: *grid, p: ops.dbar_inverse(rhs) })
}
