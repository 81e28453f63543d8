//! Real trigonometric fields on the torus `T²_b = ℝ/2πbℤ × ℝ/2πℤ`.

use super::periodic::{trig_coefficients, trig_synthesis};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Uniform periodic sampling grid; samples are stored x-major (`i * ny + k`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub b: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(b: f64, nx: usize, ny: usize) -> Self {
        Grid { b, nx, ny }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        2.0 * PI * self.b * i as f64 / self.nx as f64
    }

    pub fn y(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.ny as f64
    }

    pub fn area(&self) -> f64 {
        4.0 * PI * PI * self.b
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.nx {
            for k in 0..self.ny {
                out.push(f(self.x(i), self.y(k)));
            }
        }
        out
    }
}

/// Trapezoid quadrature over the torus.
pub fn quadrature(samples: &[f64], grid: &Grid) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64 * grid.area()
}

/// Periodic L² pairing.
pub fn inner(f: &[f64], g: &[f64], grid: &Grid) -> f64 {
    f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / f.len() as f64 * grid.area()
}

/// Which of the four product families a coefficient belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// cos(jx/b) cos(ky)
    CosCos = 0,
    /// cos(jx/b) sin(ky)
    CosSin = 1,
    /// sin(jx/b) cos(ky)
    SinCos = 2,
    /// sin(jx/b) sin(ky)
    SinSin = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// `Σ a₁ cos cos + a₂ cos sin + a₃ sin cos + a₄ sin sin` over `j ≤ J`, `k ≤ M`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    pub b: f64,
    pub jmax: usize,
    pub kmax: usize,
    pub a: [Vec<f64>; 4],
}

impl FourierField {
    pub fn zeros(b: f64, jmax: usize, kmax: usize) -> Self {
        let n = (jmax + 1) * (kmax + 1);
        FourierField { b, jmax, kmax, a: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]] }
    }

    fn idx(&self, j: usize, k: usize) -> usize {
        j * (self.kmax + 1) + k
    }

    pub fn get(&self, fam: Family, j: usize, k: usize) -> f64 {
        self.a[fam as usize][self.idx(j, k)]
    }

    /// Sets a coefficient; slots whose basis function vanishes identically are ignored.
    pub fn set(&mut self, fam: Family, j: usize, k: usize, v: f64) {
        let vanishes = match fam {
            Family::CosCos => false,
            Family::CosSin => k == 0,
            Family::SinCos => j == 0,
            Family::SinSin => j == 0 || k == 0,
        };
        if !vanishes {
            let i = self.idx(j, k);
            self.a[fam as usize][i] = v;
        }
    }

    /// Projects uniform samples onto the basis. Requires `nx ≥ 2J+2`, `ny ≥ 2M+2`.
    pub fn analyze(samples: &[f64], grid: &Grid, jmax: usize, kmax: usize) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Shape(format!("{} samples for a {}x{} grid", samples.len(), grid.nx, grid.ny)));
        }
        if grid.nx < 2 * jmax + 2 || grid.ny < 2 * kmax + 2 {
            return Err(Error::Resolution(format!(
                "grid {}x{} too small for cutoffs J={jmax}, M={kmax}",
                grid.nx, grid.ny
            )));
        }
        let (nx, ny) = (grid.nx, grid.ny);
        let mut ycos = vec![vec![0.0; nx]; kmax + 1];
        let mut ysin = vec![vec![0.0; nx]; kmax + 1];
        for i in 0..nx {
            let (c, s) = trig_coefficients(&samples[i * ny..(i + 1) * ny], kmax);
            for k in 0..=kmax {
                ycos[k][i] = c[k];
                ysin[k][i] = s[k];
            }
        }
        let mut f = FourierField::zeros(grid.b, jmax, kmax);
        for k in 0..=kmax {
            let (cc, sc) = trig_coefficients(&ycos[k], jmax);
            let (cs, ss) = trig_coefficients(&ysin[k], jmax);
            for j in 0..=jmax {
                f.set(Family::CosCos, j, k, cc[j]);
                f.set(Family::SinCos, j, k, sc[j]);
                f.set(Family::CosSin, j, k, cs[j]);
                f.set(Family::SinSin, j, k, ss[j]);
            }
        }
        Ok(f)
    }

    pub fn synthesize(&self, grid: &Grid) -> Vec<f64> {
        let (nx, ny) = (grid.nx, grid.ny);
        let mut ycos = vec![vec![0.0; nx]; self.kmax + 1];
        let mut ysin = vec![vec![0.0; nx]; self.kmax + 1];
        for k in 0..=self.kmax {
            let col = |fam: Family| (0..=self.jmax).map(|j| self.get(fam, j, k)).collect::<Vec<_>>();
            ycos[k] = trig_synthesis(&col(Family::CosCos), &col(Family::SinCos), nx);
            ysin[k] = trig_synthesis(&col(Family::CosSin), &col(Family::SinSin), nx);
        }
        let mut out = vec![0.0; grid.len()];
        for i in 0..nx {
            let c: Vec<f64> = (0..=self.kmax).map(|k| ycos[k][i]).collect();
            let s: Vec<f64> = (0..=self.kmax).map(|k| ysin[k][i]).collect();
            out[i * ny..(i + 1) * ny].copy_from_slice(&trig_synthesis(&c, &s, ny));
        }
        out
    }

    /// Direct evaluation at a point.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for j in 0..=self.jmax {
            let (sx, cx) = (j as f64 * x / self.b).sin_cos();
            for k in 0..=self.kmax {
                let (sy, cy) = (k as f64 * y).sin_cos();
                acc += self.get(Family::CosCos, j, k) * cx * cy
                    + self.get(Family::CosSin, j, k) * cx * sy
                    + self.get(Family::SinCos, j, k) * sx * cy
                    + self.get(Family::SinSin, j, k) * sx * sy;
            }
        }
        acc
    }

    /// Exact multiplier action of `∂ⁿ` along an axis.
    pub fn derivative(&self, axis: Axis, order: u32) -> Self {
        let mut f = self.clone();
        for _ in 0..order {
            f = f.derivative_once(axis);
        }
        f
    }

    fn derivative_once(&self, axis: Axis) -> Self {
        let mut out = FourierField::zeros(self.b, self.jmax, self.kmax);
        for j in 0..=self.jmax {
            for k in 0..=self.kmax {
                let [c1, c2, c3, c4] = [
                    self.get(Family::CosCos, j, k),
                    self.get(Family::CosSin, j, k),
                    self.get(Family::SinCos, j, k),
                    self.get(Family::SinSin, j, k),
                ];
                match axis {
                    Axis::X => {
                        let l = j as f64 / self.b;
                        out.set(Family::SinCos, j, k, -l * c1);
                        out.set(Family::SinSin, j, k, -l * c2);
                        out.set(Family::CosCos, j, k, l * c3);
                        out.set(Family::CosSin, j, k, l * c4);
                    }
                    Axis::Y => {
                        let m = k as f64;
                        out.set(Family::CosSin, j, k, -m * c1);
                        out.set(Family::CosCos, j, k, m * c2);
                        out.set(Family::SinSin, j, k, -m * c3);
                        out.set(Family::SinCos, j, k, m * c4);
                    }
                }
            }
        }
        out
    }

    /// `∫ f²` over the torus from coefficients (Parseval).
    pub fn norm_sq(&self) -> f64 {
        let area = 4.0 * PI * PI * self.b;
        let mut acc = 0.0;
        for j in 0..=self.jmax {
            for k in 0..=self.kmax {
                let w = area * if j == 0 { 1.0 } else { 0.5 } * if k == 0 { 1.0 } else { 0.5 };
                for fam in 0..4 {
                    let v = self.a[fam][self.idx(j, k)];
                    acc += w * v * v;
                }
            }
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut f = self.clone();
        f.a.iter_mut().for_each(|v| v.iter_mut().for_each(|x| *x *= s));
        f
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut f = self.clone();
        for fam in 0..4 {
            for (x, y) in f.a[fam].iter_mut().zip(&other.a[fam]) {
                *x += y;
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_field() {
        let g = Grid::new(1.3, 16, 8);
        let f = FourierField::analyze(&vec![1.0; g.len()], &g, 5, 3).unwrap();
        assert!((f.get(Family::CosCos, 0, 0) - 1.0).abs() < 1e-14);
        let rest: f64 = f.a.iter().flatten().map(|v| v.abs()).sum::<f64>() - 1.0;
        assert!(rest.abs() < 1e-13);
    }

    #[test]
    fn single_basis_element() {
        let b = 1.7;
        let g = Grid::new(b, 24, 16);
        let s = g.sample(|x, y| (2.0 * x / b).cos() * (3.0 * y).sin());
        let f = FourierField::analyze(&s, &g, 6, 5).unwrap();
        assert!((f.get(Family::CosSin, 2, 3) - 1.0).abs() < 1e-13);
        assert!(f.norm_sq() - g.area() / 4.0 < 1e-12);
    }

    #[test]
    fn resolution_error() {
        let g = Grid::new(1.0, 8, 8);
        assert!(matches!(FourierField::analyze(&vec![0.0; 64], &g, 4, 2), Err(Error::Resolution(_))));
    }

    #[test]
    fn derivative_examples() {
        let b = 2.0;
        let mut f = FourierField::zeros(b, 4, 4);
        f.set(Family::CosCos, 0, 1, 1.0);
        let d = f.derivative(Axis::Y, 1);
        assert!((d.get(Family::CosSin, 0, 1) + 1.0).abs() < 1e-15);
        let mut g = FourierField::zeros(b, 4, 4);
        g.set(Family::CosCos, 3, 2, 1.0);
        let d4 = g.derivative(Axis::X, 4);
        assert!((d4.get(Family::CosCos, 3, 2) - (1.5f64).powi(4)).abs() < 1e-13);
        let mixed = g.derivative(Axis::X, 2).derivative(Axis::Y, 2);
        assert!((mixed.get(Family::CosCos, 3, 2) - 1.5 * 1.5 * 4.0).abs() < 1e-13);
    }

    #[test]
    fn quadrature_examples() {
        let b = 1.4;
        let g = Grid::new(b, 32, 16);
        assert!((quadrature(&vec![1.0; g.len()], &g) - 4.0 * PI * PI * b).abs() < 1e-12);
        let s = g.sample(|x, y| ((x / b).cos() * y.cos()).powi(2));
        assert!((quadrature(&s, &g) - PI * PI * b).abs() < 1e-12);
        let s = g.sample(|_, y| y.cos().powi(2));
        assert!((quadrature(&s, &g) - 2.0 * PI * PI * b).abs() < 1e-12);
    }

    fn random_field(b: f64, coeffs: &[f64]) -> FourierField {
        let mut f = FourierField::zeros(b, 4, 3);
        let mut it = coeffs.iter();
        for j in 0..=4 {
            for k in 0..=3 {
                for fam in [Family::CosCos, Family::CosSin, Family::SinCos, Family::SinSin] {
                    f.set(fam, j, k, *it.next().unwrap());
                }
            }
        }
        f
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(b in 0.5f64..3.0, coeffs in proptest::collection::vec(-1.0f64..1.0, 80)) {
            let f = random_field(b, &coeffs);
            let g = Grid::new(b, 12, 10);
            let s = f.synthesize(&g);
            let f2 = FourierField::analyze(&s, &g, 4, 3).unwrap();
            for fam in 0..4 {
                for (x, y) in f.a[fam].iter().zip(&f2.a[fam]) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
            let q = inner(&s, &s, &g);
            prop_assert!((q - f.norm_sq()).abs() < 1e-10 * (1.0 + q));
            prop_assert!((s[7] - f.eval(g.x(0), g.y(7))).abs() < 1e-12);
        }

        #[test]
        fn derivatives_commute_and_integrate_to_zero(b in 0.5f64..3.0, coeffs in proptest::collection::vec(-1.0f64..1.0, 80)) {
            let f = random_field(b, &coeffs);
            let xy = f.derivative(Axis::X, 1).derivative(Axis::Y, 1);
            let yx = f.derivative(Axis::Y, 1).derivative(Axis::X, 1);
            for fam in 0..4 {
                for (p, q) in xy.a[fam].iter().zip(&yx.a[fam]) {
                    prop_assert!((p - q).abs() <= 1e-14 * (1.0 + p.abs()));
                }
            }
            let g = Grid::new(b, 12, 10);
            let dy = f.derivative(Axis::Y, 1).synthesize(&g);
            prop_assert!(quadrature(&dy, &g).abs() < 1e-12);
        }
    }
}
