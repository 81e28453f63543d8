//! Kernel of `Q` on y-mode 1, the fourth-order ODE satisfied by its elements, and the
//! second variation of `Re τ` on kernel directions.

use super::spectrum::{q_mode_spectrum, Classified, GAP_FACTOR};
use crate::elastica::TorusImmersion;
use crate::error::{Error, Result};
use crate::spectral::periodic::{apply_multiplier, trig_interpolate};
use crate::spectral::FourierField;
use crate::surface::second_order_tau;
use serde::Serialize;

/// `P = (∂² − 1)⁻¹` on `2πb`-periodic samples: multiplier `−1/(1 + l²)`.
pub fn p_multiplier_apply(f: &[f64], b: f64) -> Vec<f64> {
    apply_multiplier(f, 2.0 * std::f64::consts::PI * b, |l| -1.0 / (1.0 + l * l))
}

/// Spectrum of `Q¹`, the y-mode-1 reduction of `Q`.
pub fn q1op_spectrum(torus: &TorusImmersion, jmax: usize) -> Result<Classified> {
    q_mode_spectrum(torus, 1, jmax)
}

/// `dim Ker Q¹`, refusing to count when the zero band is not separated by the gap factor.
pub fn q1op_kernel(torus: &TorusImmersion, jmax: usize) -> Result<usize> {
    let c = q1op_spectrum(torus, jmax)?;
    if c.inertia.gap < GAP_FACTOR {
        return Err(Error::Conditioning(format!(
            "kernel of Q¹ is ambiguous: gap {:.3} below {GAP_FACTOR}",
            c.inertia.gap
        )));
    }
    Ok(c.inertia.zero)
}

/// Kernel and negative counts of `Q` over the y-modes `1..=m_max`, both `cos` and `sin` blocks.
#[derive(Clone, Debug, Serialize)]
pub struct QKernel {
    pub kernel_dim: usize,
    pub negative: usize,
    pub per_mode: Vec<(usize, usize, usize)>,
    pub min_gap: f64,
}

pub fn q_kernel(torus: &TorusImmersion, m_max: usize, jmax: usize) -> Result<QKernel> {
    let mut out = QKernel { kernel_dim: 0, negative: 0, per_mode: Vec::new(), min_gap: f64::INFINITY };
    for m in 1..=m_max {
        let c = q_mode_spectrum(torus, m, jmax)?;
        out.kernel_dim += 2 * c.inertia.zero;
        out.negative += 2 * c.inertia.negative;
        out.per_mode.push((m, c.inertia.zero, c.inertia.negative));
        out.min_gap = out.min_gap.min(c.inertia.gap);
    }
    Ok(out)
}

/// Sixth-order central second difference at the interior nodes; other entries are NaN.
fn second_difference(f: &[f64], h: f64) -> Vec<f64> {
    const C: [f64; 7] = [1.0 / 90.0, -3.0 / 20.0, 1.5, -49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0];
    let n = f.len();
    let mut out = vec![f64::NAN; n];
    for i in 3..n.saturating_sub(3) {
        out[i] = (0..7).map(|k| C[k] * f[i + k - 3]).sum::<f64>() / (h * h);
    }
    out
}

/// Residual of the ODE obtained from `Q¹f = 0` with `(∂² − 1)h = −2κf`, for `h` sampled at
/// `x₀ + i·dx` on a window that need not be periodic. `P` acts through the free-space
/// Green's function `−½e^{−|x−s|}` over the window. Returns the largest interior residual
/// relative to `max |h|`.
pub fn kernel_ode_residual(torus: &TorusImmersion, x0: f64, dx: f64, h: &[f64]) -> Result<f64> {
    let n = h.len();
    if n < 16 || !(dx > 0.0) {
        return Err(Error::Input(format!("{n} samples with spacing {dx} are too few for the stencil")));
    }
    let period = torus.curve.length();
    let xs: Vec<f64> = (0..n).map(|i| x0 + dx * i as f64).collect();
    let kappa: Vec<f64> = xs.iter().map(|&x| trig_interpolate(&torus.curve.kappa, period, x)).collect();
    let h2 = second_difference(h, dx);
    let g: Vec<f64> = (0..n).map(|i| h2[i] - h[i]).collect();
    let f: Vec<f64> = (0..n).map(|i| -g[i] / (2.0 * kappa[i])).collect();
    let f2 = second_difference(&f, dx);
    let beta = torus.beta;
    let inner = 3..n - 3;
    let p_lit = |i: usize| {
        let w = |j: usize| if j == inner.start || j == inner.end - 1 { 0.5 } else { 1.0 };
        -0.5 * dx * inner.clone().map(|j| w(j) * (-(xs[i] - xs[j]).abs()).exp() * g[j]).sum::<f64>()
    };
    let scale = h.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in 6..n - 6 {
        let k = kappa[i];
        let local = (-(k * k) / 8.0 - 0.25 + 0.5 * beta) * f[i] - 0.5 * f2[i];
        let r = local / k + 0.5 * beta * p_lit(i);
        worst = worst.max(r.abs());
    }
    Ok(worst / scale)
}

/// `(d/dt)² Re τ` along `φ`.
pub fn pi1_second_variation(torus: &TorusImmersion, phi: &FourierField) -> Result<f64> {
    Ok(second_order_tau(torus, phi)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastica::{homogeneous_torus, shoot_two_lobe};
    use crate::spectral::Family;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn p_examples() {
        let ones = vec![1.0; 32];
        assert!(p_multiplier_apply(&ones, 1.3).iter().all(|v| (v + 1.0).abs() < 1e-14));
        let c: Vec<f64> = (0..32).map(|i| (2.0 * PI * i as f64 / 32.0).cos()).collect();
        let pc = p_multiplier_apply(&c, 1.0);
        assert!(pc.iter().zip(&c).all(|(a, b)| (a + 0.5 * b).abs() < 1e-14));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn p_inverts_shifted_laplacian(coef in proptest::collection::vec(-1.0f64..1.0, 12), b in 0.5f64..4.0) {
            let n = 64;
            let f: Vec<f64> = (0..n).map(|i| {
                let x = 2.0 * PI * b * i as f64 / n as f64;
                coef.iter().enumerate().map(|(j, c)| {
                    let l = (j / 2) as f64 / b;
                    if j % 2 == 0 { c * (l * x).cos() } else { c * (l * x).sin() }
                }).sum::<f64>()
            }).collect();
            let d2 = crate::spectral::periodic::derivative(&f, 2.0 * PI * b, 2);
            let g: Vec<f64> = d2.iter().zip(&f).map(|(a, b)| a - b).collect();
            let back = p_multiplier_apply(&g, b);
            let err = back.iter().zip(&f).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            prop_assert!(err < 1e-10);
        }
    }

    #[test]
    fn ode_residual_separates_solutions() {
        let t = shoot_two_lobe(2.5, 256).unwrap();
        let (x0, dx, n) = (0.3, 0.05, 61);
        let sample = |f: &dyn Fn(f64) -> f64| (0..n).map(|i| f(x0 + dx * i as f64)).collect::<Vec<_>>();
        assert!(kernel_ode_residual(&t, x0, dx, &sample(&|x| x.sinh())).unwrap() < 1e-6);
        assert!(kernel_ode_residual(&t, x0, dx, &sample(&|x| x.cosh())).unwrap() < 1e-6);
        let generic = kernel_ode_residual(&t, x0, dx, &sample(&|x| (1.3 * x).sin() + 0.2 * x * x)).unwrap();
        assert!(generic > 1e-2, "{generic}");
    }

    #[test]
    fn homogeneous_q_kernel_below_branch_point() {
        let t = homogeneous_torus(1.5, 128).unwrap();
        let k = q_kernel(&t, 4, 16).unwrap();
        assert_eq!(k.kernel_dim, 4);
        assert_eq!(k.negative, 2);
        assert_eq!(q1op_kernel(&t, 16).unwrap(), 2);
    }

    #[test]
    fn pi1_vanishes_on_zero_and_scales_quadratically() {
        let t = shoot_two_lobe(2.5, 256).unwrap();
        assert_eq!(pi1_second_variation(&t, &FourierField::zeros(t.b, 4, 2)).unwrap(), 0.0);
        let mut phi = FourierField::zeros(t.b, 4, 2);
        phi.set(Family::CosCos, 2, 1, 0.7);
        phi.set(Family::SinSin, 1, 2, -0.3);
        let a = pi1_second_variation(&t, &phi).unwrap();
        let b = pi1_second_variation(&t, &phi.scale(3.0)).unwrap();
        assert!(a.is_finite() && (b - 9.0 * a).abs() < 1e-10 * (1.0 + a.abs()));
    }
}
