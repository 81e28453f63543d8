//! The explicitly deformed immersion `F_t`: Willmore energy and conformal class as functions
//! of `t`, and their exact second derivatives at `t = 0`.

use super::conformal::{cell_problem, conformal_class, ConformalClass, GridOps};
use super::density::{metric_at, willmore_density_at};
use super::PhiJets;
use crate::elastica::{CurveLocal, TorusImmersion};
use crate::error::Result;
use crate::spectral::{quadrature, FourierField, Grid, Jet2, Scalar};
use std::f64::consts::PI;

pub struct Deformation<'a> {
    pub torus: &'a TorusImmersion,
    pub jets: PhiJets,
    locals: Vec<CurveLocal>,
}

/// Exact second variations at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondVariations {
    pub willmore: f64,
    pub im_tau: f64,
    pub re_tau: f64,
}

impl<'a> Deformation<'a> {
    pub fn new(torus: &'a TorusImmersion, phi: &FourierField, ny: usize) -> Result<Self> {
        let grid = torus.grid(ny);
        Ok(Deformation { torus, jets: PhiJets::new(phi, &grid)?, locals: torus.curve.locals() })
    }

    pub fn grid(&self) -> Grid {
        self.jets.grid
    }

    fn map<S: Scalar, T>(&self, t: S, f: impl Fn(&CurveLocal, &super::PhiPoint, S) -> T) -> Vec<T> {
        let ny = self.jets.grid.ny;
        (0..self.jets.grid.len()).map(|idx| f(&self.locals[idx / ny], &self.jets.at(idx), t)).collect()
    }

    pub fn willmore_at(&self, t: f64) -> f64 {
        quadrature(&self.map(t, willmore_density_at), &self.grid())
    }

    pub fn metric_at(&self, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let g = self.map(t, metric_at);
        (g.iter().map(|m| m.0).collect(), g.iter().map(|m| m.1).collect(), g.iter().map(|m| m.2).collect())
    }

    pub fn conformal_at(&self, t: f64) -> Result<ConformalClass> {
        let (gxx, gxy, gyy) = self.metric_at(t);
        conformal_class(&self.grid(), &gxx, &gxy, &gyy)
    }

    /// `½W(F_t) − β·2π² Im τ(F_t)`.
    pub fn lagrangian_at(&self, t: f64) -> Result<f64> {
        Ok(0.5 * self.willmore_at(t) - self.torus.beta * 2.0 * PI * PI * self.conformal_at(t)?.pi2)
    }

    /// Second derivatives from jets; τ through the perturbative cell problem around the flat metric.
    pub fn second_variations(&self) -> Result<SecondVariations> {
        let grid = self.grid();
        let n = grid.len();
        let w: Vec<f64> = self.map(Jet2::var(), willmore_density_at).iter().map(|j| j.d2()).collect();
        let willmore = quadrature(&w, &grid);
        let g = self.map(Jet2::var(), metric_at);
        let mut a1 = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut a2 = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for (i, (gxx, gxy, gyy)) in g.into_iter().enumerate() {
            let s = (gxx * gyy - gxy * gxy).sqrt();
            let a = [gyy / s, -gxy / s, gxx / s];
            for c in 0..3 {
                a1[c][i] = a[c].b;
                a2[c][i] = a[c].c;
            }
        }
        let ops = GridOps::new(grid);
        let rhs = ops.div(&a1[0], &a1[1]);
        let w1 = ops.inverse_neg_laplacian(&rhs);
        let (w1x, w1y) = (ops.dx(&w1), ops.dy(&w1));
        let e0 = grid.area();
        let e1 = quadrature(&a1[0], &grid);
        let grad2: Vec<f64> = w1x.iter().zip(&w1y).map(|(a, b)| a * a + b * b).collect();
        let e2 = quadrature(&a2[0], &grid) - quadrature(&grad2, &grid);
        let b = grid.b;
        let im_tau = 2.0 * b * (e1 * e1 / (e0 * e0) - e2 / e0);
        let x1 = quadrature(&a1[1], &grid);
        let cross: Vec<f64> = (0..n).map(|i| a1[1][i] * w1x[i] + a1[2][i] * w1y[i]).collect();
        let x2 = quadrature(&a2[1], &grid) + quadrature(&cross, &grid);
        let re_tau = 2.0 * b * (x2 / e0 - x1 * e1 / (e0 * e0));
        Ok(SecondVariations { willmore, im_tau, re_tau })
    }

    /// Exact `(d/dt)²` of the Lagrangian at `t = 0`.
    pub fn lagrangian_second_variation(&self) -> Result<f64> {
        let s = self.second_variations()?;
        Ok(0.5 * s.willmore - self.torus.beta * 2.0 * PI * PI * s.im_tau)
    }

    /// Residual of the full cell problem at `t`, for diagnostics.
    pub fn cell_iterations(&self, t: f64) -> Result<usize> {
        let (gxx, gxy, gyy) = self.metric_at(t);
        Ok(cell_problem(&GridOps::new(self.grid()), &gxx, &gxy, &gyy)?.iterations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastica::{homogeneous_torus, shoot_two_lobe};
    use crate::spectral::{fd_second_derivative, Family};
    use crate::surface::{first_order_tau, second_order_tau_on};

    fn admissible(t: &TorusImmersion, seed: u64) -> FourierField {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut f = FourierField::zeros(t.b, 3, 2);
        for j in 0..=3 {
            for k in 0..=2 {
                for fam in [Family::CosCos, Family::CosSin, Family::SinCos, Family::SinSin] {
                    f.set(fam, j, k, rng.gen_range(-0.5..0.5));
                }
            }
        }
        let (_, con) = first_order_tau(t, &f).unwrap();
        let kmean = t.curve.kappa.iter().sum::<f64>() / t.curve.n_samples as f64;
        let c0 = f.get(Family::CosCos, 0, 0);
        f.set(Family::CosCos, 0, 0, c0 + con * PI / (kmean * 4.0 * PI * PI * t.b));
        f
    }

    #[test]
    fn unperturbed_class() {
        for t in [homogeneous_torus(1.4, 64).unwrap(), shoot_two_lobe(2.5, 256).unwrap()] {
            let d = Deformation::new(&t, &FourierField::zeros(t.b, 2, 2), 16).unwrap();
            let c = d.conformal_at(0.0).unwrap();
            assert!((c.pi2 - t.b).abs() < 1e-10 && c.pi1.abs() < 1e-12);
            assert!((d.willmore_at(0.0) - t.energy).abs() < 1e-9 * t.energy);
        }
    }

    #[test]
    fn jets_match_finite_differences_and_closed_integrands() {
        let t = shoot_two_lobe(2.0, 256).unwrap();
        let phi = admissible(&t, 21);
        let d = Deformation::new(&t, &phi, 16).unwrap();
        let s = d.second_variations().unwrap();
        let fw = fd_second_derivative(|h| d.willmore_at(h), 0.02, 5);
        assert!((s.willmore - fw.value).abs() < 1e-6 * s.willmore.abs().max(1.0), "{} {}", s.willmore, fw.value);
        let fi = fd_second_derivative(|h| d.conformal_at(h).unwrap().pi2, 0.02, 5);
        assert!((s.im_tau - fi.value).abs() < 1e-6 * s.im_tau.abs().max(1.0), "{} {}", s.im_tau, fi.value);
        let fr = fd_second_derivative(|h| d.conformal_at(h).unwrap().pi1, 0.02, 5);
        assert!((s.re_tau - fr.value).abs() < 1e-6 * s.re_tau.abs().max(1e-2), "{} {}", s.re_tau, fr.value);
        let closed = second_order_tau_on(&t, &d.jets).unwrap();
        assert!((closed.im - s.im_tau).abs() < 1e-9 * s.im_tau.abs().max(1.0), "{} {}", closed.im, s.im_tau);
        assert!((closed.re - s.re_tau).abs() < 1e-9 * s.re_tau.abs().max(1.0), "{} {}", closed.re, s.re_tau);
    }
}
