//! Quadratic forms per y-mode in an orthonormal x-Fourier basis, and the pointwise
//! operators `Q₁`, `Q₂`, `Q` on band-limited fields.

use crate::elastica::TorusImmersion;
use crate::error::{Error, Result};
use crate::spectral::periodic::apply_multiplier;
use crate::spectral::{Axis, Family, FourierField, Grid, Jet2};
use crate::surface::density::curve_density_at;
use crate::surface::{dbar_solve, surface_grid, GridOps};
use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use std::borrow::Cow;
use std::f64::consts::PI;

/// `{1/√(2πb)} ∪ {cos(jx/b)/√(πb), sin(jx/b)/√(πb)}_{1≤j≤J}`, orthonormal on `[0, 2πb]`.
/// Index `0` is the constant, `2j − 1` is `cos j`, `2j` is `sin j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XBasis {
    pub b: f64,
    pub jmax: usize,
}

impl XBasis {
    pub fn dim(&self) -> usize {
        2 * self.jmax + 1
    }

    pub fn index_freq(&self, a: usize) -> usize {
        (a + 1) / 2
    }

    pub fn freq(&self, a: usize) -> f64 {
        self.index_freq(a) as f64 / self.b
    }

    pub fn label(&self, a: usize) -> String {
        match a {
            0 => "1".into(),
            _ if a % 2 == 1 => format!("cos{}", self.index_freq(a)),
            _ => format!("sin{}", self.index_freq(a)),
        }
    }

    /// `(e, e', e'')` of basis element `a` at `x`.
    pub fn eval(&self, a: usize, x: f64) -> (f64, f64, f64) {
        if a == 0 {
            return (1.0 / (2.0 * PI * self.b).sqrt(), 0.0, 0.0);
        }
        let n = 1.0 / (PI * self.b).sqrt();
        let l = self.freq(a);
        let (s, c) = (l * x).sin_cos();
        if a % 2 == 1 {
            (n * c, -n * l * s, -n * l * l * c)
        } else {
            (n * s, n * l * c, -n * l * l * s)
        }
    }

    /// Basis values and first two derivatives at the nodes, one column per element.
    pub fn sample(&self, xs: &[f64]) -> [DMatrix<f64>; 3] {
        let (n, d) = (xs.len(), self.dim());
        let mut out = [DMatrix::zeros(n, d), DMatrix::zeros(n, d), DMatrix::zeros(n, d)];
        for (i, &x) in xs.iter().enumerate() {
            for a in 0..d {
                let (f, f1, f2) = self.eval(a, x);
                out[0][(i, a)] = f;
                out[1][(i, a)] = f1;
                out[2][(i, a)] = f2;
            }
        }
        out
    }

    /// Coordinates of the x-profile multiplying `cos(ky)` (or `sin(ky)`) in a field.
    pub fn coords_of(&self, phi: &FourierField, k: usize, y_sin: bool) -> DVector<f64> {
        let (fc, fs) = if y_sin { (Family::CosSin, Family::SinSin) } else { (Family::CosCos, Family::SinCos) };
        let (n0, n1) = ((2.0 * PI * self.b).sqrt(), (PI * self.b).sqrt());
        let mut v = DVector::zeros(self.dim());
        v[0] = phi.get(fc, 0, k) * n0;
        for j in 1..=self.jmax.min(phi.jmax) {
            v[2 * j - 1] = phi.get(fc, j, k) * n1;
            v[2 * j] = phi.get(fs, j, k) * n1;
        }
        v
    }

    /// Field `f(x)·cos(my)` (or `sin(my)`) with `f` given by basis coordinates.
    pub fn field(&self, coords: &[f64], m: usize, y_sin: bool) -> FourierField {
        let (fc, fs) = if y_sin { (Family::CosSin, Family::SinSin) } else { (Family::CosCos, Family::SinCos) };
        let (n0, n1) = ((2.0 * PI * self.b).sqrt(), (PI * self.b).sqrt());
        let mut f = FourierField::zeros(self.b, self.jmax, m.max(1));
        f.set(fc, 0, m, coords[0] / n0);
        for j in 1..=self.jmax {
            f.set(fc, j, m, coords[2 * j - 1] / n1);
            f.set(fs, j, m, coords[2 * j] / n1);
        }
        f
    }

    /// `∫ p e_a dx` by the trapezoid rule over periodic samples.
    pub fn project(&self, samples: &[f64]) -> DVector<f64> {
        let n = samples.len();
        let w = 2.0 * PI * self.b / n as f64;
        DVector::from_fn(self.dim(), |a, _| {
            w * samples.iter().enumerate().map(|(i, p)| p * self.eval(a, self.node(i, n)).0).sum::<f64>()
        })
    }

    fn node(&self, i: usize, n: usize) -> f64 {
        2.0 * PI * self.b * i as f64 / n as f64
    }
}

/// Dense symmetric matrix of a quadratic form on one y-mode.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub mode: usize,
    pub jmax: usize,
    pub labels: Vec<String>,
    pub matrix: DMatrix<f64>,
    /// Columns expressing the basis in x-Fourier coordinates when it is a constrained subspace.
    pub coords: Option<DMatrix<f64>>,
}

impl OperatorMatrix {
    fn new(mode: usize, basis: &XBasis, matrix: DMatrix<f64>) -> Result<Self> {
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Accuracy(format!("non-finite entry in the mode-{mode} block")));
        }
        let labels = (0..basis.dim()).map(|a| basis.label(a)).collect();
        Ok(OperatorMatrix { mode, jmax: basis.jmax, labels, matrix, coords: None })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn quadratic(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.matrix * v))
    }
}

/// The torus itself if its curve resolves products of cutoff-`J` modes, otherwise a resampling.
pub fn resolved(torus: &TorusImmersion, jmax: usize) -> Result<Cow<'_, TorusImmersion>> {
    let need = 4 * jmax + 16;
    if torus.curve.n_samples >= need {
        return Ok(Cow::Borrowed(torus));
    }
    Ok(Cow::Owned(torus.resampled(need.next_power_of_two())?))
}

fn check_cutoff(jmax: usize) -> Result<()> {
    if jmax < 8 {
        return Err(Error::Input(format!("x-cutoff J = {jmax} is below 8")));
    }
    Ok(())
}

fn weight(torus: &TorusImmersion) -> f64 {
    torus.curve.length() / torus.curve.n_samples as f64
}

/// `Σ_pq D_pᵀ diag(w c_pq) D_q`.
fn weighted_products(d: &[DMatrix<f64>; 3], c: &[[Vec<f64>; 3]; 3], w: f64) -> DMatrix<f64> {
    let dim = d[0].ncols();
    let mut out = DMatrix::zeros(dim, dim);
    for p in 0..3 {
        for q in 0..3 {
            if c[p][q].iter().all(|&v| v == 0.0) {
                continue;
            }
            let mut scaled = d[q].clone();
            for (i, mut row) in scaled.row_iter_mut().enumerate() {
                row *= w * c[p][q][i];
            }
            out += d[p].transpose() * scaled;
        }
    }
    out
}

/// Pointwise coefficients `C_pq(x)` with `(d/dt)² ⅛∫(κ_g² − 2μ)ds = ∫ Σ C_pq ∂ᵖf ∂^q f dx`.
fn curve_coefficients(torus: &TorusImmersion) -> [[Vec<f64>; 3]; 3] {
    let n = torus.curve.n_samples;
    let mu = torus.params.mu;
    let mut c: [[Vec<f64>; 3]; 3] = Default::default();
    for row in c.iter_mut() {
        for e in row.iter_mut() {
            *e = vec![0.0; n];
        }
    }
    for i in 0..n {
        let cl = torus.curve.local(i);
        let d2 = |v: [f64; 3]| curve_density_at(&cl, v[0], v[1], v[2], Jet2::var(), mu).d2();
        let mut unit = [[0.0; 3]; 3];
        for p in 0..3 {
            unit[p][p] = 1.0;
            c[p][p][i] = d2(unit[p]);
        }
        for p in 0..3 {
            for q in p + 1..3 {
                let mut v = [0.0; 3];
                v[p] = 1.0;
                v[q] = 1.0;
                let off = 0.5 * (d2(v) - c[p][p][i] - c[q][q][i]);
                c[p][q][i] = off;
                c[q][p][i] = off;
            }
        }
    }
    c
}

pub(crate) fn tensorial_on(torus: &TorusImmersion, basis: &XBasis) -> DMatrix<f64> {
    let d = basis.sample(&torus.curve.x);
    weighted_products(&d, &curve_coefficients(torus), weight(torus))
}

/// Second variation of the profile energy per unit y, without the length constraint.
/// It is the same for every y-mode.
pub fn tensorial_form(torus: &TorusImmersion, jmax: usize) -> Result<OperatorMatrix> {
    check_cutoff(jmax)?;
    let t = resolved(torus, jmax)?;
    let basis = XBasis { b: t.b, jmax };
    OperatorMatrix::new(0, &basis, tensorial_on(&t, &basis))
}

/// `c_a = ∫ κ e_a dx`; the linearised conformal constraint on y-mode 0 is `c·f = 0`.
pub fn constraint_vector(torus: &TorusImmersion, basis: &XBasis) -> DVector<f64> {
    basis.project(&torus.curve.kappa)
}

/// y-mode-0 block of the constrained Hessian on the tangent space `∫κf = 0`.
pub fn curve_hessian(torus: &TorusImmersion, jmax: usize) -> Result<OperatorMatrix> {
    check_cutoff(jmax)?;
    let t = resolved(torus, jmax)?;
    let basis = XBasis { b: t.b, jmax };
    let z = crate::spectral::linalg::complement_basis(&constraint_vector(&t, &basis));
    let h = z.transpose() * tensorial_on(&t, &basis) * &z;
    let mut op = OperatorMatrix::new(0, &basis, h)?;
    op.labels = (0..z.ncols()).map(|i| format!("z{i}")).collect();
    op.coords = Some(z);
    Ok(op)
}

/// Per-unit-y forms `(Q₁, Q₂)` of y-mode `m`.
fn q_parts(torus: &TorusImmersion, basis: &XBasis, m: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = basis.dim();
    if m == 0 {
        return (DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim));
    }
    let [f, f1, _] = basis.sample(&torus.curve.x);
    let n = torus.curve.n_samples;
    let w = weight(torus);
    let mm = (m * m) as f64;
    let kappa = &torus.curve.kappa;
    let zero = vec![0.0; n];
    let mut c: [[Vec<f64>; 3]; 3] = Default::default();
    for row in c.iter_mut() {
        for e in row.iter_mut() {
            *e = zero.clone();
        }
    }
    c[0][0] = kappa.iter().map(|k| -(k * k / 8.0 + 0.5) * mm + 0.25 * mm * mm).collect();
    c[1][1] = vec![0.5 * mm; n];
    let d = [f.clone(), f1, DMatrix::zeros(n, dim)];
    let q1 = weighted_products(&d, &c, w);
    let gram = f.transpose() * &f * w;
    let period = torus.curve.length();
    let mut kf = DMatrix::zeros(n, dim);
    for a in 0..dim {
        let kfa: Vec<f64> = (0..n).map(|i| kappa[i] * f[(i, a)]).collect();
        let mk = apply_multiplier(&kfa, period, |l| mm / (l * l + mm));
        for i in 0..n {
            kf[(i, a)] = -2.0 * kappa[i] * mk[i];
        }
    }
    let k = f.transpose() * kf * w;
    let k = (&k + k.transpose()) * 0.5;
    let q2 = gram * (-0.5 * mm) + k * 0.5;
    (q1, q2)
}

/// `⟨Qφ, φ⟩` restricted to `φ = f(x) cos(my)` per unit y; the zero matrix for `m = 0`.
pub fn mode_operator(torus: &TorusImmersion, m: usize, jmax: usize) -> Result<OperatorMatrix> {
    check_cutoff(jmax)?;
    let t = resolved(torus, jmax)?;
    let basis = XBasis { b: t.b, jmax };
    let (q1, q2) = q_parts(&t, &basis, m);
    OperatorMatrix::new(m, &basis, q1 - q2 * t.beta)
}

/// `T + Q_m`: the full Hessian on y-mode `m ≥ 1`, or the unconstrained tensorial block for `m = 0`.
pub(crate) fn mode_hessian_on(torus: &TorusImmersion, basis: &XBasis, m: usize) -> DMatrix<f64> {
    tensorial_on(torus, basis) + q_on(torus, basis, m)
}

pub(crate) fn q_on(torus: &TorusImmersion, basis: &XBasis, m: usize) -> DMatrix<f64> {
    let (q1, q2) = q_parts(torus, basis, m);
    q1 - q2 * torus.beta
}

/// The assembled second variation `(d/dt)²(½W − β·2π² Im τ)` along `φ`, summed over y-modes.
pub fn hessian_form(torus: &TorusImmersion, phi: &FourierField, jmax: usize) -> Result<f64> {
    if phi.jmax > jmax {
        return Err(Error::Input(format!("field cutoff {} exceeds J = {jmax}", phi.jmax)));
    }
    let t = resolved(torus, jmax)?;
    let basis = XBasis { b: t.b, jmax };
    let mut acc = 0.0;
    let tens = tensorial_on(&t, &basis);
    for m in 0..=phi.kmax {
        let h = &tens + q_on(&t, &basis, m);
        let (w, sides): (f64, &[bool]) = if m == 0 { (2.0 * PI, &[false]) } else { (PI, &[false, true]) };
        for &s in sides {
            let v = basis.coords_of(phi, m, s);
            acc += w * v.dot(&(&h * &v));
        }
    }
    Ok(acc)
}

/// Samples of a field on a grid.
#[derive(Clone, Debug)]
pub struct Sampled {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Sampled {
    pub fn inner(&self, other: &[f64]) -> f64 {
        crate::spectral::inner(&self.values, other, &self.grid)
    }
}

fn kappa_rows(torus: &TorusImmersion, grid: &Grid) -> Vec<f64> {
    (0..grid.len()).map(|idx| torus.curve.kappa[idx / grid.ny]).collect()
}

fn check_phi(torus: &TorusImmersion, phi: &FourierField) -> Result<Grid> {
    if (phi.b - torus.b).abs() > 1e-12 * torus.b {
        return Err(Error::Shape(format!("field period b = {} does not match torus b = {}", phi.b, torus.b)));
    }
    let grid = surface_grid(torus, phi);
    if grid.nx < 2 * phi.jmax + 2 {
        return Err(Error::Resolution(format!("{} curve samples cannot carry J = {}", grid.nx, phi.jmax)));
    }
    Ok(grid)
}

/// `((κ²/8 + ½)∂²_y + ¼∂⁴_y + ½∂²_x∂²_y) φ`.
pub fn q1_apply(torus: &TorusImmersion, phi: &FourierField) -> Result<Sampled> {
    let grid = check_phi(torus, phi)?;
    let pyy = phi.derivative(Axis::Y, 2);
    let s_yy = pyy.synthesize(&grid);
    let s_y4 = pyy.derivative(Axis::Y, 2).synthesize(&grid);
    let s_xxyy = pyy.derivative(Axis::X, 2).synthesize(&grid);
    let k = kappa_rows(torus, &grid);
    let values = (0..grid.len())
        .map(|i| (k[i] * k[i] / 8.0 + 0.5) * s_yy[i] + 0.25 * s_y4[i] + 0.5 * s_xxyy[i])
        .collect();
    Ok(Sampled { grid, values })
}

/// `Kφ = −2κ Re p` with `∂̄p = −iα_y/4`, `α = −2κφ`.
fn k_apply(k: &[f64], phi: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    let alpha: Vec<f64> = k.iter().zip(phi).map(|(k, p)| -2.0 * k * p).collect();
    let ay = GridOps::new(*grid).dy(&alpha);
    let rhs: Vec<Complex64> = ay.iter().map(|&v| Complex64::new(0.0, -0.25 * v)).collect();
    let p = dbar_solve(&rhs, grid)?;
    Ok(k.iter().zip(&p.p).map(|(k, z)| -2.0 * k * z.re).collect())
}

/// `½φ_yy + ½Kφ`, with `K` realised through the ∂̄-problem.
pub fn q2_apply(torus: &TorusImmersion, phi: &FourierField) -> Result<Sampled> {
    let grid = check_phi(torus, phi)?;
    let s = phi.synthesize(&grid);
    let s_yy = phi.derivative(Axis::Y, 2).synthesize(&grid);
    let kphi = k_apply(&kappa_rows(torus, &grid), &s, &grid)?;
    let values = s_yy.iter().zip(&kphi).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
    Ok(Sampled { grid, values })
}

/// `Q₁φ − β Q₂φ`.
pub fn q_apply(torus: &TorusImmersion, phi: &FourierField) -> Result<Sampled> {
    let q1 = q1_apply(torus, phi)?;
    let q2 = q2_apply(torus, phi)?;
    let values = q1.values.iter().zip(&q2.values).map(|(a, b)| a - torus.beta * b).collect();
    Ok(Sampled { grid: q1.grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastica::{homogeneous_torus, shoot_two_lobe};
    use crate::spectral::{fd_second_derivative, quadrature};
    use crate::surface::nonlocal_form;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(b: f64, j: usize, k: usize, seed: u64) -> FourierField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = FourierField::zeros(b, j, k);
        for jj in 0..=j {
            for kk in 0..=k {
                for fam in [Family::CosCos, Family::CosSin, Family::SinCos, Family::SinSin] {
                    f.set(fam, jj, kk, rng.gen_range(-1.0..1.0) / (1.0 + (jj + kk) as f64));
                }
            }
        }
        f
    }

    #[test]
    fn basis_is_orthonormal_and_round_trips() {
        let basis = XBasis { b: 1.7, jmax: 9 };
        let xs: Vec<f64> = (0..64).map(|i| 2.0 * PI * 1.7 * i as f64 / 64.0).collect();
        let [f, _, _] = basis.sample(&xs);
        let g = f.transpose() * &f * (2.0 * PI * 1.7 / 64.0);
        assert!((g - DMatrix::identity(19, 19)).abs().max() < 1e-13);
        let phi = random_field(1.7, 9, 3, 2);
        let v = basis.coords_of(&phi, 2, true);
        let back = basis.field(v.as_slice(), 2, true);
        for j in 0..=9 {
            assert!((back.get(Family::CosSin, j, 2) - phi.get(Family::CosSin, j, 2)).abs() < 1e-14);
            assert!((back.get(Family::SinSin, j, 2) - phi.get(Family::SinSin, j, 2)).abs() < 1e-14);
        }
    }

    #[test]
    fn q1_examples() {
        let t = homogeneous_torus(1.0, 64).unwrap();
        let y_only = {
            let mut f = FourierField::zeros(1.0, 3, 3);
            f.set(Family::CosCos, 2, 0, 1.0);
            f.set(Family::SinCos, 1, 0, -0.4);
            f
        };
        assert!(q1_apply(&t, &y_only).unwrap().values.iter().all(|v| v.abs() < 1e-12));
        let mut f = FourierField::zeros(1.0, 2, 2);
        f.set(Family::CosCos, 0, 2, 1.0);
        let q = q1_apply(&t, &f).unwrap();
        let expect = f.synthesize(&q.grid);
        assert!(q.values.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-10));
        let b = 1.6;
        let t = homogeneous_torus(b, 64).unwrap();
        let mut f = FourierField::zeros(b, 2, 2);
        f.set(Family::CosCos, 1, 1, 1.0);
        let q = q1_apply(&t, &f).unwrap();
        let k2 = 1.0 + 1.0 / (b * b);
        let coeff = -(k2 / 8.0 + 0.5) + 0.25 + 0.5 / (b * b);
        let expect = f.synthesize(&q.grid);
        assert!(q.values.iter().zip(&expect).all(|(a, e)| (a - coeff * e).abs() < 1e-10));
    }

    #[test]
    fn q2_matches_nonlocal_form() {
        let t = shoot_two_lobe(2.2, 128).unwrap();
        let y_only = {
            let mut f = FourierField::zeros(t.b, 4, 2);
            f.set(Family::CosCos, 3, 0, 1.0);
            f
        };
        assert!(q2_apply(&t, &y_only).unwrap().values.iter().all(|v| v.abs() < 1e-12));
        let phi = random_field(t.b, 5, 3, 9);
        let q = q2_apply(&t, &phi).unwrap();
        let s = phi.synthesize(&q.grid);
        let lhs = q.inner(&s);
        let py = phi.derivative(Axis::Y, 1).synthesize(&q.grid);
        let py2: Vec<f64> = py.iter().map(|v| v * v).collect();
        let rhs = -0.5 * quadrature(&py2, &q.grid) + nonlocal_form(&t, &phi).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "{lhs} {rhs}");
    }

    #[test]
    fn q_examples() {
        let t = homogeneous_torus(1.0, 64).unwrap();
        assert!(t.beta.abs() < 1e-12);
        let phi = random_field(1.0, 4, 3, 4);
        let a = q_apply(&t, &phi).unwrap();
        let b = q1_apply(&t, &phi).unwrap();
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| (x - y).abs() < 1e-12));
        let t = shoot_two_lobe(2.5, 128).unwrap();
        let phi = random_field(t.b, 4, 3, 5);
        let one = q_apply(&t, &phi).unwrap();
        let two = q_apply(&t, &phi.scale(2.0)).unwrap();
        assert!(one.values.iter().zip(&two.values).all(|(x, y)| (2.0 * x - y).abs() < 1e-10 * (1.0 + x.abs())));
        let mut flat = FourierField::zeros(t.b, 4, 2);
        flat.set(Family::SinCos, 2, 0, 1.0);
        assert!(q_apply(&t, &flat).unwrap().values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn clifford_mode_entries() {
        let t = homogeneous_torus(1.0, 64).unwrap();
        assert!((mode_operator(&t, 2, 8).unwrap().matrix[(0, 0)] - 1.0).abs() < 1e-10);
        assert!((mode_operator(&t, 1, 8).unwrap().matrix[(0, 0)] + 0.5).abs() < 1e-10);
        assert!(mode_operator(&t, 0, 8).unwrap().matrix.iter().all(|&v| v == 0.0));
        assert!(mode_operator(&t, 1, 4).is_err());
    }

    #[test]
    fn matrix_form_matches_application() {
        for t in [homogeneous_torus(2.1, 64).unwrap(), shoot_two_lobe(2.5, 128).unwrap()] {
            let basis = XBasis { b: t.b, jmax: 12 };
            let phi = random_field(t.b, 12, 4, 17);
            let q = q_apply(&t, &phi).unwrap();
            let path_a = q.inner(&phi.synthesize(&q.grid));
            let mut path_b = 0.0;
            for m in 1..=4 {
                let op = mode_operator(&t, m, 12).unwrap();
                for s in [false, true] {
                    path_b += PI * op.quadratic(&basis.coords_of(&phi, m, s));
                }
            }
            assert!((path_a - path_b).abs() < 1e-9 * path_a.abs().max(1.0), "{path_a} {path_b}");
        }
    }

    #[test]
    fn tensorial_form_matches_finite_differences() {
        let t = shoot_two_lobe(2.3, 256).unwrap();
        let basis = XBasis { b: t.b, jmax: 8 };
        let op = tensorial_form(&t, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = DVector::from_fn(basis.dim(), |a, _| rng.gen_range(-1.0..1.0) / (1.0 + basis.freq(a)));
        let [f, f1, f2] = basis.sample(&t.curve.x);
        let (g, g1, g2) = (&f * &v, &f1 * &v, &f2 * &v);
        let locals = t.curve.locals();
        let w = weight(&t);
        let energy = |h: f64| {
            w * (0..locals.len()).map(|i| curve_density_at(&locals[i], g[i], g1[i], g2[i], h, t.params.mu)).sum::<f64>()
        };
        let fd = fd_second_derivative(energy, 0.02, 5);
        let form = op.quadratic(&v);
        assert!((fd.value - form).abs() < 1e-6 * form.abs().max(1.0), "{} {}", fd.value, form);
    }

    #[test]
    fn symmetric_and_stable_under_refinement() {
        let t = shoot_two_lobe(2.5, 512).unwrap();
        let coarse = mode_operator(&t, 2, 16).unwrap();
        let fine = mode_operator(&t, 2, 32).unwrap();
        assert_eq!(crate::spectral::linalg::asymmetry(&coarse.matrix), 0.0);
        let a = crate::spectral::sym_eig(&coarse.matrix).unwrap().values;
        let b = crate::spectral::sym_eig(&fine.matrix).unwrap().values;
        for i in 0..4 {
            assert!((a[i] - b[i]).abs() < 1e-8 * a[i].abs().max(1.0), "{} {}", a[i], b[i]);
        }
        let h = curve_hessian(&t, 16).unwrap();
        assert_eq!(h.dim(), 32);
    }
}
