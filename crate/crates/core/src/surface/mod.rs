//! Surface quantities of an equivariant torus: Willmore energy, second fundamental form,
//! the metric of a normal variation, and the first and second variation of the conformal
//! modulus including the ∂̄-correction.

pub mod conformal;
pub mod deform;
pub mod density;

pub use conformal::{conformal_class, dbar_solve, ConformalClass, DbarSolution, GridOps};
pub use deform::Deformation;
pub use density::PhiPoint;

use crate::elastica::{CurveLocal, ProfileCurve, TorusImmersion};
use crate::error::{Error, Result};
use crate::spectral::{quadrature, Axis, Family, FourierField, Grid};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// `(π/2) ∫₀^{2πb} κ² dx` by the trapezoid rule.
pub fn willmore_energy_of_curve(curve: &ProfileCurve) -> f64 {
    let mean = curve.kappa.iter().map(|k| k * k).sum::<f64>() / curve.n_samples as f64;
    0.5 * PI * mean * curve.length()
}

/// `W = ¼ ∫_{T²} κ² dx dy`.
pub fn willmore_energy(torus: &TorusImmersion) -> f64 {
    willmore_energy_of_curve(&torus.curve)
}

/// `diag(κ, 0)` at each curve sample.
pub fn second_fundamental_form(torus: &TorusImmersion) -> Vec<[[f64; 2]; 2]> {
    torus
        .curve
        .locals()
        .iter()
        .map(|cl| {
            let ([lxx, lxy, lyy], _) = density::second_fundamental_form_at(cl, &PhiPoint::default(), 0.0);
            [[lxx, lxy], [lxy, lyy]]
        })
        .collect()
}

/// φ and its partials sampled on a grid whose x-nodes are the curve samples.
#[derive(Clone, Debug)]
pub struct PhiJets {
    pub grid: Grid,
    pub p: Vec<f64>,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub pxx: Vec<f64>,
    pub pxy: Vec<f64>,
    pub pyy: Vec<f64>,
}

impl PhiJets {
    pub fn new(phi: &FourierField, grid: &Grid) -> Result<Self> {
        if (phi.b - grid.b).abs() > 1e-12 * grid.b {
            return Err(Error::Shape(format!("field period b = {} does not match torus b = {}", phi.b, grid.b)));
        }
        if grid.nx < 2 * phi.jmax + 2 || grid.ny < 2 * phi.kmax + 2 {
            return Err(Error::Resolution(format!("grid {}x{} cannot carry J = {}, M = {}", grid.nx, grid.ny, phi.jmax, phi.kmax)));
        }
        let dx = phi.derivative(Axis::X, 1);
        let dy = phi.derivative(Axis::Y, 1);
        Ok(PhiJets {
            grid: *grid,
            p: phi.synthesize(grid),
            px: dx.synthesize(grid),
            py: dy.synthesize(grid),
            pxx: phi.derivative(Axis::X, 2).synthesize(grid),
            pxy: dx.derivative(Axis::Y, 1).synthesize(grid),
            pyy: phi.derivative(Axis::Y, 2).synthesize(grid),
        })
    }

    pub fn at(&self, idx: usize) -> PhiPoint {
        PhiPoint { p: self.p[idx], px: self.px[idx], py: self.py[idx], pxx: self.pxx[idx], pxy: self.pxy[idx], pyy: self.pyy[idx] }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let m = |v: &Vec<f64>| v.iter().map(|x| x * s).collect();
        PhiJets { grid: self.grid, p: m(&self.p), px: m(&self.px), py: m(&self.py), pxx: m(&self.pxx), pxy: m(&self.pxy), pyy: m(&self.pyy) }
    }
}

/// Grid used to evaluate quadratic integrands of a band-limited φ on a torus.
pub fn surface_grid(torus: &TorusImmersion, phi: &FourierField) -> Grid {
    torus.grid((4 * phi.kmax + 4).max(16))
}

fn check_grid(torus: &TorusImmersion, grid: &Grid) -> Result<()> {
    if grid.nx != torus.curve.n_samples || (grid.b - torus.b).abs() > 1e-12 * torus.b {
        return Err(Error::Shape(format!(
            "grid {}x{} (b = {}) does not match the curve sampling ({} samples, b = {})",
            grid.nx, grid.ny, grid.b, torus.curve.n_samples, torus.b
        )));
    }
    Ok(())
}

/// Coefficient fields of `g_t = g₀ + t α dx² + t²(β dx² + 2γ dx dy + δ dy²) + O(t³)`.
#[derive(Clone, Debug)]
pub struct MetricExpansion {
    pub grid: Grid,
    pub alpha: Vec<f64>,
    pub beta_c: Vec<f64>,
    pub gamma_c: Vec<f64>,
    pub delta_c: Vec<f64>,
}

pub fn metric_expansion_on(torus: &TorusImmersion, jets: &PhiJets) -> Result<MetricExpansion> {
    let grid = jets.grid;
    check_grid(torus, &grid)?;
    let ny = grid.ny;
    let n = grid.len();
    let mut e = MetricExpansion { grid, alpha: vec![0.0; n], beta_c: vec![0.0; n], gamma_c: vec![0.0; n], delta_c: vec![0.0; n] };
    for idx in 0..n {
        let cl = torus.curve.local(idx / ny);
        let f = jets.at(idx);
        e.alpha[idx] = -2.0 * cl.k * f.p;
        e.beta_c[idx] = f.px * f.px
            + cl.k * cl.k * f.p * f.p
            + cl.s * cl.s * f.p * f.p
            + 2.0 * (cl.k * cl.c * f.p * f.p + cl.s * f.p * f.px);
        e.gamma_c[idx] = cl.s * f.py * f.p + f.px * f.py;
        e.delta_c[idx] = f.py * f.py;
    }
    Ok(e)
}

pub fn metric_expansion(torus: &TorusImmersion, phi: &FourierField) -> Result<MetricExpansion> {
    let jets = PhiJets::new(phi, &surface_grid(torus, phi))?;
    metric_expansion_on(torus, &jets)
}

fn kappa_on_grid(torus: &TorusImmersion, grid: &Grid) -> Vec<f64> {
    let mut k = Vec::with_capacity(grid.len());
    for i in 0..grid.nx {
        k.extend(std::iter::repeat(torus.curve.kappa[i]).take(grid.ny));
    }
    k
}

/// First-order change of τ and the conformal constraint value `−(1/π)∫κφ`.
pub fn first_order_tau_on(torus: &TorusImmersion, jets: &PhiJets) -> Result<(Complex64, f64)> {
    check_grid(torus, &jets.grid)?;
    let k = kappa_on_grid(torus, &jets.grid);
    let kp: Vec<f64> = k.iter().zip(&jets.p).map(|(a, b)| a * b).collect();
    let i = quadrature(&kp, &jets.grid);
    Ok((Complex64::new(0.0, -i / (4.0 * PI * PI)), -i / PI))
}

pub fn first_order_tau(torus: &TorusImmersion, phi: &FourierField) -> Result<(Complex64, f64)> {
    first_order_tau_on(torus, &PhiJets::new(phi, &surface_grid(torus, phi))?)
}

/// `p` with `∂̄p = −iα_y/4` for `α = −2κφ`.
pub fn holomorphic_correction(torus: &TorusImmersion, jets: &PhiJets) -> Result<DbarSolution> {
    let k = kappa_on_grid(torus, &jets.grid);
    let rhs: Vec<Complex64> = k.iter().zip(&jets.py).map(|(k, py)| Complex64::new(0.0, 0.5 * k * py)).collect();
    dbar_solve(&rhs, &jets.grid)
}

/// Largest constraint value accepted by [`second_order_tau`].
pub const CONSTRAINT_TOL: f64 = 1e-8;

/// `(d/dt)² τ` at `t = 0` for an admissible variation.
pub fn second_order_tau_on(torus: &TorusImmersion, jets: &PhiJets) -> Result<Complex64> {
    let (_, constraint) = first_order_tau_on(torus, jets)?;
    let norm = (jets.p.iter().map(|x| x * x).sum::<f64>() / jets.p.len() as f64).sqrt();
    if constraint.abs() > CONSTRAINT_TOL * norm.max(1.0) {
        return Err(Error::Precondition(format!("conformal constraint is {constraint:e}, not zero")));
    }
    let p = holomorphic_correction(torus, jets)?;
    let grid = jets.grid;
    let ny = grid.ny;
    let mut re_part = vec![0.0; grid.len()];
    let mut im_part = vec![0.0; grid.len()];
    for idx in 0..grid.len() {
        let cl = torus.curve.local(idx / ny);
        let f = jets.at(idx);
        let alpha = -2.0 * cl.k * f.p;
        let ap = p.p[idx] * alpha;
        im_part[idx] = 0.5 * ap.re + cl.c * cl.k * f.p * f.p + 0.5 * cl.s * cl.s * f.p * f.p - 0.5 * f.py * f.py
            + cl.s * f.p * f.px
            + 0.5 * f.px * f.px;
        re_part[idx] = 0.5 * ap.im + cl.s * f.p * f.py + f.px * f.py;
    }
    let c = 2.0 / (4.0 * PI * PI);
    Ok(Complex64::new(-c * quadrature(&re_part, &grid), c * quadrature(&im_part, &grid)))
}

pub fn second_order_tau(torus: &TorusImmersion, phi: &FourierField) -> Result<Complex64> {
    second_order_tau_on(torus, &PhiJets::new(phi, &surface_grid(torus, phi))?)
}

/// `½ ∫ Re(α p)` where `∂̄p = −iα_y/4`, for sampled α.
pub fn nonlocal_form_alpha(alpha: &[f64], grid: &Grid) -> Result<f64> {
    let ops = GridOps::new(*grid);
    let ay = ops.dy(alpha);
    let rhs: Vec<Complex64> = ay.iter().map(|&v| Complex64::new(0.0, -0.25 * v)).collect();
    let p = dbar_solve(&rhs, grid)?;
    let prod: Vec<f64> = alpha.iter().zip(&p.p).map(|(a, z)| a * z.re).collect();
    Ok(0.5 * quadrature(&prod, grid))
}

/// `½⟨Kφ, φ⟩ = ½ ∫ Re(α p(φ))` through the ∂̄-solve.
pub fn nonlocal_form(torus: &TorusImmersion, phi: &FourierField) -> Result<f64> {
    let grid = surface_grid(torus, phi);
    let jets = PhiJets::new(phi, &grid)?;
    let k = kappa_on_grid(torus, &grid);
    let alpha: Vec<f64> = k.iter().zip(&jets.p).map(|(k, p)| -2.0 * k * p).collect();
    nonlocal_form_alpha(&alpha, &grid)
}

/// The Fourier series `−(π²b/4) Σ k²/(k² + l²)(a₁² + a₂² + a₃² + a₄²)`, `l = j/b`, of the
/// coefficients of α. Exact when every mode has both frequencies positive.
pub fn nonlocal_form_closed(alpha: &FourierField) -> f64 {
    let b = alpha.b;
    let mut acc = 0.0;
    for j in 0..=alpha.jmax {
        for k in 1..=alpha.kmax {
            let l = j as f64 / b;
            let kk = (k * k) as f64;
            let s: f64 = [Family::CosCos, Family::CosSin, Family::SinCos, Family::SinSin]
                .iter()
                .map(|&f| alpha.get(f, j, k).powi(2))
                .sum();
            acc += kk / (kk + l * l) * s;
        }
    }
    -PI * PI * b / 4.0 * acc
}

/// Curve-local data at the x-node of a flat grid index.
pub fn local_at(torus: &TorusImmersion, grid: &Grid, idx: usize) -> CurveLocal {
    torus.curve.local(idx / grid.ny)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastica::{homogeneous_torus, shoot_two_lobe};
    use proptest::prelude::*;
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
    fn energies() {
        let c = homogeneous_torus(1.0, 64).unwrap();
        assert!((willmore_energy(&c) - 2.0 * PI * PI).abs() < 1e-9);
        let h = homogeneous_torus(2.0, 64).unwrap();
        assert!((willmore_energy(&h) - 2.5 * PI * PI).abs() < 1e-9);
        let t = shoot_two_lobe(2.0, 256).unwrap();
        let w = willmore_energy(&t);
        assert!(w > 2.0 * PI * PI && w < 8.0 * PI);
        let t2 = t.resampled(512).unwrap();
        assert!((willmore_energy(&t2) - w).abs() < 1e-9 * w);
    }

    #[test]
    fn second_fundamental_form_is_diag_kappa() {
        let c = homogeneous_torus(1.0, 32).unwrap();
        for m in second_fundamental_form(&c) {
            assert!((m[0][0] - 2f64.sqrt()).abs() < 1e-12 && m[0][1].abs() < 1e-14 && m[1][1].abs() < 1e-14);
        }
        let t = shoot_two_lobe(2.0, 128).unwrap();
        for (i, m) in second_fundamental_form(&t).iter().enumerate() {
            assert!((m[0][0] - t.curve.kappa[i]).abs() < 1e-10 && m[1][1].abs() < 1e-12);
            assert!((m[0][0] + m[1][1] - 2.0 * 0.5 * t.curve.kappa[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn metric_expansion_matches_jets() {
        use crate::spectral::Jet2;
        let t = shoot_two_lobe(2.0, 128).unwrap();
        let phi = random_field(t.b, 3, 2, 11);
        let grid = surface_grid(&t, &phi);
        let jets = PhiJets::new(&phi, &grid).unwrap();
        let e = metric_expansion_on(&t, &jets).unwrap();
        for idx in (0..grid.len()).step_by(37) {
            let (gxx, gxy, gyy) = density::metric_at(&local_at(&t, &grid, idx), &jets.at(idx), Jet2::var());
            assert!((gxx.a - 1.0).abs() < 1e-12 && (gyy.a - 1.0).abs() < 1e-12 && gxy.a.abs() < 1e-12);
            assert!((gxx.b - e.alpha[idx]).abs() < 1e-10);
            assert!(gxy.b.abs() < 1e-12 && gyy.b.abs() < 1e-12);
            assert!((gxx.c - e.beta_c[idx]).abs() < 1e-10, "β at {idx}: {} vs {}", gxx.c, e.beta_c[idx]);
            assert!((gxy.c - e.gamma_c[idx]).abs() < 1e-10, "γ at {idx}: {} vs {}", gxy.c, e.gamma_c[idx]);
            assert!((gyy.c - e.delta_c[idx]).abs() < 1e-10);
        }
    }

    #[test]
    fn metric_expansion_examples() {
        let c = homogeneous_torus(1.0, 32).unwrap();
        let zero = FourierField::zeros(1.0, 4, 2);
        let e = metric_expansion(&c, &zero).unwrap();
        assert!(e.alpha.iter().chain(&e.beta_c).chain(&e.gamma_c).chain(&e.delta_c).all(|v| *v == 0.0));
        let mut one = FourierField::zeros(1.0, 4, 2);
        one.set(Family::CosCos, 0, 0, 1.0);
        let e = metric_expansion(&c, &one).unwrap();
        assert!(e.alpha.iter().all(|a| (a + 2.0 * 2f64.sqrt()).abs() < 1e-12));
        assert!(e.gamma_c.iter().chain(&e.delta_c).all(|v| v.abs() < 1e-14));
        let wrong = FourierField::zeros(2.0, 4, 2);
        assert!(matches!(metric_expansion(&c, &wrong), Err(Error::Shape(_))));
    }

    #[test]
    fn first_order_examples() {
        let c = homogeneous_torus(1.0, 32).unwrap();
        let mut one = FourierField::zeros(1.0, 2, 2);
        one.set(Family::CosCos, 0, 0, 1.0);
        let (_, con) = first_order_tau(&c, &one).unwrap();
        assert!((con + 4.0 * 2f64.sqrt() * PI).abs() < 1e-10);
        let mut cy = FourierField::zeros(1.0, 2, 2);
        cy.set(Family::CosCos, 0, 1, 1.0);
        let (dt, con) = first_order_tau(&c, &cy).unwrap();
        assert!(con.abs() < 1e-13 && dt.norm() < 1e-13);
        assert!(matches!(second_order_tau(&c, &one), Err(Error::Precondition(_))));
    }

    #[test]
    fn nonlocal_examples() {
        let b = 1.7;
        let g = Grid::new(b, 32, 16);
        let a = g.sample(|x, y| (x / b).cos() * y.cos());
        let v = nonlocal_form_alpha(&a, &g).unwrap();
        assert!((v + PI * PI * b / 4.0 / (1.0 + 1.0 / (b * b))).abs() < 1e-12);
        let a = g.sample(|_, y| y.cos());
        assert!((nonlocal_form_alpha(&a, &g).unwrap() + PI * PI * b / 2.0).abs() < 1e-12);
        let a = g.sample(|x, _| (2.0 * x / b).sin());
        assert!(nonlocal_form_alpha(&a, &g).unwrap().abs() < 1e-14);
    }

    #[test]
    fn nonlocal_closed_formula_positive_modes() {
        let b = 2.3;
        let g = Grid::new(b, 40, 40);
        for j in 1..=8 {
            for k in 1..=8 {
                for fam in [Family::CosCos, Family::CosSin, Family::SinCos, Family::SinSin] {
                    let mut f = FourierField::zeros(b, 8, 8);
                    f.set(fam, j, k, 1.0);
                    let v = nonlocal_form_alpha(&f.synthesize(&g), &g).unwrap();
                    assert!((v - nonlocal_form_closed(&f)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn second_order_scaling_and_x_only() {
        let t = shoot_two_lobe(2.0, 128).unwrap();
        let mut phi = random_field(t.b, 3, 2, 5);
        // enforce ∫κφ = 0 by adjusting the constant
        let grid = surface_grid(&t, &phi);
        let kmean = t.curve.kappa.iter().sum::<f64>() / t.curve.n_samples as f64;
        let (_, con) = first_order_tau(&t, &phi).unwrap();
        let c0 = phi.get(Family::CosCos, 0, 0);
        phi.set(Family::CosCos, 0, 0, c0 + con * PI / (kmean * grid.area()));
        let (d1, con) = first_order_tau(&t, &phi).unwrap();
        assert!(con.abs() < 1e-10);
        let s1 = second_order_tau(&t, &phi).unwrap();
        let s2 = second_order_tau(&t, &phi.scale(2.0)).unwrap();
        assert!((s2 - s1 * 4.0).norm() < 1e-10 * (1.0 + s1.norm()));
        let (d2, _) = first_order_tau(&t, &phi.scale(2.0)).unwrap();
        assert!((d2 - d1 * 2.0).norm() < 1e-12);
        // x-only variation: p = 0
        let mut fx = FourierField::zeros(t.b, 3, 1);
        fx.set(Family::CosCos, 2, 0, 1.0);
        let jets = PhiJets::new(&fx, &surface_grid(&t, &fx)).unwrap();
        let p = holomorphic_correction(&t, &jets).unwrap();
        assert!(p.p.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn dbar_period_vanishes_for_alpha_rhs() {
        let t = shoot_two_lobe(2.0, 128).unwrap();
        let phi = random_field(t.b, 3, 3, 9);
        let jets = PhiJets::new(&phi, &surface_grid(&t, &phi)).unwrap();
        let p = holomorphic_correction(&t, &jets).unwrap();
        assert!(p.period_y().norm() < 1e-9);
        assert!(p.mean().norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn nonlocal_form_is_nonpositive(seed in 0u64..1_000_000) {
            let g = Grid::new(1.9, 24, 16);
            let f = random_field(1.9, 5, 4, seed);
            prop_assert!(nonlocal_form_alpha(&f.synthesize(&g), &g).unwrap() <= 1e-14);
        }
    }
}
