//! FFT-backed helpers for periodic samples in one and two dimensions.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Angular wavenumbers `2πk/L` in FFT order for `n` samples of period `period`.
pub fn wavenumbers(n: usize, period: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * kk / period
        })
        .collect()
}

pub fn fft(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(data.len()).process(data);
}

/// Unnormalized inverse transform.
pub fn ifft(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(data.len()).process(data);
}

/// Applies a real, even Fourier multiplier `m(l)` to periodic samples.
pub fn apply_multiplier(data: &[f64], period: f64, m: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = data.len();
    let mut z: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft(&mut z);
    for (zk, l) in z.iter_mut().zip(wavenumbers(n, period)) {
        *zk *= m(l);
    }
    ifft(&mut z);
    z.iter().map(|c| c.re / n as f64).collect()
}

/// Spectral derivative of the given order. The Nyquist mode is dropped for odd orders.
pub fn derivative(data: &[f64], period: f64, order: u32) -> Vec<f64> {
    let n = data.len();
    let mut z: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft(&mut z);
    let ks = wavenumbers(n, period);
    for (k, zk) in z.iter_mut().enumerate() {
        if order % 2 == 1 && n % 2 == 0 && k == n / 2 {
            *zk = Complex64::new(0.0, 0.0);
        } else {
            *zk *= Complex64::new(0.0, ks[k]).powu(order);
        }
    }
    ifft(&mut z);
    z.iter().map(|c| c.re / n as f64).collect()
}

/// Trigonometric interpolant of periodic samples evaluated at `x`.
pub fn trig_interpolate(data: &[f64], period: f64, x: f64) -> f64 {
    let n = data.len();
    let mut z: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft(&mut z);
    let ks = wavenumbers(n, period);
    let mut acc = 0.0;
    for k in 0..n {
        let w = if n % 2 == 0 && k == n / 2 { 0.5 } else { 1.0 };
        let phase = Complex64::new(0.0, ks[k] * x).exp();
        acc += w * (z[k] * phase).re;
        if n % 2 == 0 && k == n / 2 {
            acc += w * (z[k] * Complex64::new(0.0, -ks[k] * x).exp()).re;
        }
    }
    acc / n as f64
}

/// Real cosine and sine coefficients `0..=nmax` of periodic samples on `2π i / n`.
pub fn trig_coefficients(data: &[f64], nmax: usize) -> (Vec<f64>, Vec<f64>) {
    let n = data.len();
    let mut z: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft(&mut z);
    let mut c = vec![0.0; nmax + 1];
    let mut s = vec![0.0; nmax + 1];
    for k in 0..=nmax {
        let w = if k == 0 || (n % 2 == 0 && k == n / 2) { 1.0 } else { 2.0 };
        c[k] = w * z[k].re / n as f64;
        s[k] = if k == 0 { 0.0 } else { -w * z[k].im / n as f64 };
    }
    (c, s)
}

/// Samples of `Σ c_k cos(2πki/n) + s_k sin(2πki/n)` for `i < n`.
pub fn trig_synthesis(c: &[f64], s: &[f64], n: usize) -> Vec<f64> {
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..c.len() {
        if k == 0 {
            z[0] += c[0];
            continue;
        }
        let half = Complex64::new(0.5 * c[k], -0.5 * s[k]);
        z[k % n] += half;
        z[(n - k % n) % n] += half.conj();
    }
    ifft(&mut z);
    z.iter().map(|v| v.re).collect()
}

/// Two-dimensional transforms on an `nx × ny` array stored x-major.
pub struct Fft2 {
    pub nx: usize,
    pub ny: usize,
    fx: std::sync::Arc<dyn rustfft::Fft<f64>>,
    fy: std::sync::Arc<dyn rustfft::Fft<f64>>,
    ix: std::sync::Arc<dyn rustfft::Fft<f64>>,
    iy: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut p = FftPlanner::new();
        Fft2 {
            nx,
            ny,
            fx: p.plan_fft_forward(nx),
            fy: p.plan_fft_forward(ny),
            ix: p.plan_fft_inverse(nx),
            iy: p.plan_fft_inverse(ny),
        }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let (fx, fy) = if inverse { (&self.ix, &self.iy) } else { (&self.fx, &self.fy) };
        for row in data.chunks_mut(self.ny) {
            fy.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); self.nx];
        for k in 0..self.ny {
            for i in 0..self.nx {
                col[i] = data[i * self.ny + k];
            }
            fx.process(&mut col);
            for i in 0..self.nx {
                data[i * self.ny + k] = col[i];
            }
        }
    }

    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.run(&mut z, false);
        z
    }

    pub fn forward_complex(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut z = data.to_vec();
        self.run(&mut z, false);
        z
    }

    /// Normalized inverse transform.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let mut z = spec.to_vec();
        self.run(&mut z, true);
        let s = 1.0 / (self.nx * self.ny) as f64;
        z.iter_mut().for_each(|v| *v *= s);
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let n = 32;
        let period = 2.0 * PI * 1.5;
        let x: Vec<f64> = (0..n).map(|i| i as f64 * period / n as f64).collect();
        let f: Vec<f64> = x.iter().map(|&t| (2.0 * t / 1.5).sin()).collect();
        let d = derivative(&f, period, 1);
        for (t, v) in x.iter().zip(d) {
            assert!((v - (2.0 / 1.5) * (2.0 * t / 1.5).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_is_exact_for_band_limited() {
        let n = 16;
        let f: Vec<f64> = (0..n).map(|i| (2.0 * PI * 3.0 * i as f64 / n as f64).cos() + 0.5).collect();
        let v = trig_interpolate(&f, 2.0 * PI, 0.3);
        assert!((v - ((3.0f64 * 0.3).cos() + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn coefficients_round_trip() {
        let n = 20;
        let c = vec![0.3, -1.0, 0.0, 2.0];
        let s = vec![0.0, 0.5, 0.25, -0.75];
        let f = trig_synthesis(&c, &s, n);
        let (c2, s2) = trig_coefficients(&f, 3);
        for k in 0..4 {
            assert!((c[k] - c2[k]).abs() < 1e-13);
            assert!((s[k] - s2[k]).abs() < 1e-13);
        }
    }
}
