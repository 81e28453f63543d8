//! Free hyperbolic elastica: the curvature ODE `κ'' + ½κ³ + (μ−1)κ = 0`, its first integral
//! `κ'² + P₄(κ) = 0`, reconstruction of the profile curve in the upper half plane through an
//! SL(2,ℝ) frame, and shooting for closed two-lobe profiles.

use crate::error::{Error, Result};
use crate::spectral::periodic::derivative;
use crate::spectral::Grid;
use nalgebra::{Matrix2, SVector};
use ode_solvers::dop_shared::OutputType;
use ode_solvers::{Dop853, System};
use roots::{find_root_brent, Convergency};
use std::f64::consts::PI;

pub const RTOL: f64 = 1e-13;
pub const ATOL: f64 = 1e-14;
/// Step cap: far below what the tolerances need, so every step is accepted at the cap and the
/// result depends smoothly on the parameters instead of on the step-size controller.
pub const STEP_CAP: f64 = 0.01;

fn solver<const D: usize, S: System<f64, SVector<f64, D>>>(sys: S, length: f64, dx: f64, y0: SVector<f64, D>) -> Dop853<f64, SVector<f64, D>, S> {
    let h = STEP_CAP.min(length);
    Dop853::from_param(sys, 0.0, length, dx, y0, RTOL, ATOL, 0.9, 0.0, 0.333, 6.0, h, h, 10_000_000, 1000, OutputType::Dense)
}

/// `P₄(κ) = ¼κ⁴ + (μ−1)κ² + ν`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticaParams {
    pub mu: f64,
    pub nu: f64,
}

impl ElasticaParams {
    pub fn p4(&self, k: f64) -> f64 {
        let k2 = k * k;
        0.25 * k2 * k2 + (self.mu - 1.0) * k2 + self.nu
    }

    /// Parameters whose quartic has positive roots `κ_lo ≤ κ_hi`.
    pub fn from_roots(klo: f64, khi: f64) -> Self {
        ElasticaParams { mu: 1.0 - 0.25 * (khi * khi + klo * klo), nu: 0.25 * khi * khi * klo * klo }
    }

    /// Real roots in ascending order; errors if any root is complex.
    pub fn quartic_roots(&self) -> Result<[f64; 4]> {
        let h = 1.0 - self.mu;
        let disc = h * h - self.nu;
        let scale = h * h + self.nu.abs() + 1e-300;
        if disc < -1e-12 * scale {
            return Err(Error::NotOrbitLike(format!("complex roots (discriminant {disc:e})")));
        }
        let r = disc.max(0.0).sqrt();
        let (sp, sm) = (2.0 * (h + r), 2.0 * (h - r));
        let tiny = 1e-12 * scale.sqrt();
        if sm < -tiny {
            return Err(Error::NotOrbitLike(format!("κ² = {sm:e} is negative")));
        }
        let (a, b) = (sm.max(0.0).sqrt(), sp.max(0.0).sqrt());
        Ok([-b, -a, a, b])
    }

    /// Positive roots `(κ_lo, κ_hi)` bounding a periodic orbit.
    pub fn orbit_roots(&self) -> Result<(f64, f64)> {
        let r = self.quartic_roots()?;
        if r[2] <= 0.0 {
            return Err(Error::NotOrbitLike("no positive root pair".into()));
        }
        Ok((r[2], r[3]))
    }
}

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    0.5 * (a + b)
}

/// Period of κ oscillating between `κ_lo` and `κ_hi`: `2π / AGM(κ_hi, κ_lo)`.
pub fn kappa_period(klo: f64, khi: f64) -> Result<f64> {
    if klo <= 1e-12 * khi.max(1.0) {
        return Err(Error::Degenerate("separatrix orbit has infinite period".into()));
    }
    Ok(2.0 * PI / agm(khi, klo))
}

#[derive(Clone)]
struct KappaSystem {
    mu: f64,
}

impl System<f64, SVector<f64, 2>> for KappaSystem {
    fn system(&self, _x: f64, y: &SVector<f64, 2>, dy: &mut SVector<f64, 2>) {
        dy[0] = y[1];
        dy[1] = -0.5 * y[0].powi(3) - (self.mu - 1.0) * y[0];
    }
}

/// State `(κ, κ', F₁₁, F₁₂, F₂₁, F₂₂)` with `F' = F (H + κR)`.
#[derive(Clone)]
struct FrameSystem {
    mu: f64,
}

fn frame_rhs(k: f64, f: [f64; 4]) -> [f64; 4] {
    // H + κR = [[½, κ/2], [−κ/2, −½]]
    let (h11, h12, h21, h22) = (0.5, 0.5 * k, -0.5 * k, -0.5);
    [
        f[0] * h11 + f[1] * h21,
        f[0] * h12 + f[1] * h22,
        f[2] * h11 + f[3] * h21,
        f[2] * h12 + f[3] * h22,
    ]
}

impl System<f64, SVector<f64, 6>> for FrameSystem {
    fn system(&self, _x: f64, y: &SVector<f64, 6>, dy: &mut SVector<f64, 6>) {
        dy[0] = y[1];
        dy[1] = -0.5 * y[0].powi(3) - (self.mu - 1.0) * y[0];
        let d = frame_rhs(y[0], [y[2], y[3], y[4], y[5]]);
        dy[2] = d[0];
        dy[3] = d[1];
        dy[4] = d[2];
        dy[5] = d[3];
    }
}

#[derive(Clone)]
struct DrivenFrame<'a> {
    kappa: &'a dyn Fn(f64) -> f64,
}

impl System<f64, SVector<f64, 4>> for DrivenFrame<'_> {
    fn system(&self, x: f64, y: &SVector<f64, 4>, dy: &mut SVector<f64, 4>) {
        let d = frame_rhs((self.kappa)(x), [y[0], y[1], y[2], y[3]]);
        for i in 0..4 {
            dy[i] = d[i];
        }
    }
}

fn map_err(e: ode_solvers::dop_shared::IntegrationError) -> Error {
    Error::Stiffness(format!("{e:?}"))
}

/// Integrates and returns `n` dense samples at `x = iL/n` plus the state at `x = L`.
fn run<const D: usize, S: System<f64, SVector<f64, D>> + Clone>(
    sys: S,
    y0: SVector<f64, D>,
    length: f64,
    n: usize,
) -> Result<(Vec<SVector<f64, D>>, SVector<f64, D>)> {
    let dx = length / n.max(1) as f64;
    let sys_end = sys.clone();
    let mut dense = solver(sys, length, dx, y0);
    dense.integrate().map_err(map_err)?;
    let ys = dense.y_out();
    if ys.len() < n {
        return Err(Error::Accuracy(format!("dense output produced {} of {n} samples", ys.len())));
    }
    let samples = ys[..n].to_vec();
    let end = endpoint(sys_end, y0, length)?;
    Ok((samples, end))
}

fn endpoint<const D: usize, S: System<f64, SVector<f64, D>>>(sys: S, y0: SVector<f64, D>, length: f64) -> Result<SVector<f64, D>> {
    // Dense output exactly one ulp-safe step short of the end point.
    let mut s = solver(sys, length, length * (1.0 - 4.0 * f64::EPSILON), y0);
    s.integrate().map_err(map_err)?;
    s.y_out().last().copied().ok_or_else(|| Error::Accuracy("no output".into()))
}

#[derive(Clone, Debug)]
pub struct KappaSolution {
    pub x: Vec<f64>,
    pub kappa: Vec<f64>,
    pub dkappa: Vec<f64>,
    /// `max |κ'² + P₄(κ)|` over the samples.
    pub drift: f64,
}

/// Integrates the curvature equation on `[0, length]` at `n` uniform samples.
pub fn integrate_kappa(params: ElasticaParams, k0: f64, dk0: f64, length: f64, n: usize) -> Result<KappaSolution> {
    let e0 = dk0 * dk0 + params.p4(k0);
    if e0.abs() > 1e-10 * (1.0 + k0.powi(4)) {
        return Err(Error::Input(format!("initial state violates the first integral by {e0:e}")));
    }
    let (ys, _) = run(KappaSystem { mu: params.mu }, SVector::from([k0, dk0]), length, n)?;
    let x = (0..n).map(|i| length * i as f64 / n as f64).collect();
    let kappa: Vec<f64> = ys.iter().map(|y| y[0]).collect();
    let dkappa: Vec<f64> = ys.iter().map(|y| y[1]).collect();
    let drift = kappa.iter().zip(&dkappa).fold(0.0f64, |a, (&k, &d)| a.max((d * d + params.p4(k)).abs()));
    if drift > 1e-9 {
        return Err(Error::Accuracy(format!("first-integral drift {drift:e}")));
    }
    Ok(KappaSolution { x, kappa, dkappa, drift })
}

fn mobius(f: &Matrix2<f64>, z: (f64, f64)) -> (f64, f64) {
    let (a, b, c, d) = (f[(0, 0)], f[(0, 1)], f[(1, 0)], f[(1, 1)]);
    let num = (a * z.0 + b, a * z.1);
    let den = (c * z.0 + d, c * z.1);
    let dd = den.0 * den.0 + den.1 * den.1;
    ((num.0 * den.0 + num.1 * den.1) / dd, (num.1 * den.0 - num.0 * den.1) / dd)
}

/// Point `F·i` and tangent `i/(ci+d)²` carried by a frame.
pub fn frame_point(f: &Matrix2<f64>) -> ((f64, f64), (f64, f64)) {
    let z = mobius(f, (0.0, 1.0));
    let (c, d) = (f[(1, 0)], f[(1, 1)]);
    // (ci + d)² = d² − c² + 2cd i; i / w = i w̄ / |w|²
    let (wr, wi) = (d * d - c * c, 2.0 * c * d);
    let w2 = wr * wr + wi * wi;
    (z, (wi / w2, wr / w2))
}

fn hyp_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
    (1.0 + d2 / (2.0 * a.1 * b.1)).acosh()
}

fn mat(y: &[f64]) -> Matrix2<f64> {
    Matrix2::new(y[0], y[1], y[2], y[3])
}

/// Frame monodromy over `length` starting from `F = I`.
pub fn monodromy(params: ElasticaParams, k0: f64, dk0: f64, length: f64) -> Result<Matrix2<f64>> {
    let y0 = SVector::from([k0, dk0, 1.0, 0.0, 0.0, 1.0]);
    let e = endpoint(FrameSystem { mu: params.mu }, y0, length)?;
    Ok(mat(&e.as_slice()[2..]))
}

/// Monodromy over `length` from a curvature maximum, where κ is even about both `0` and
/// `length/2` (one κ-period, or any length for constant κ). With `S = [[0,1],[1,0]]`,
/// `S A(κ) S = −A(κ)` gives `F(−s) = S F(s) S`, hence `M = H S H⁻¹ S` with `H = F(length/2)`.
/// Only half the frame growth is integrated, which squares down the round-off.
pub fn symmetric_monodromy(params: ElasticaParams, khi: f64, length: f64) -> Result<Matrix2<f64>> {
    let h = monodromy(params, khi, 0.0, 0.5 * length)?;
    let s = Matrix2::new(0.0, 1.0, 1.0, 0.0);
    // H⁻¹ for det H = 1.
    let hinv = Matrix2::new(h[(1, 1)], -h[(0, 1)], -h[(1, 0)], h[(0, 0)]);
    Ok(h * s * hinv * s)
}

/// Closure data of the profile generated by one κ-orbit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosureResidual {
    /// Hyperbolic distance between start and end point after `lobes` periods.
    pub gap_translation: f64,
    /// `min ‖Mⁿ ∓ I‖_F`.
    pub gap_frame: f64,
    /// Rotation angle of one period's monodromy about its fixed point.
    pub lobe_angle: f64,
    pub trace: f64,
    pub lobes: usize,
}

/// Period over which the frame is advanced: the κ-period, or the circumference for constant κ.
fn frame_period(klo: f64, khi: f64) -> Result<f64> {
    if khi - klo <= 1e-7 * khi {
        let k = 0.5 * (klo + khi);
        if k <= 1.0 {
            return Err(Error::Degenerate(format!("constant curvature {k} ≤ 1 does not close")));
        }
        Ok(2.0 * PI / (k * k - 1.0).sqrt())
    } else {
        kappa_period(klo, khi)
    }
}

pub fn closure_residual(params: ElasticaParams, k0: f64, dk0: f64) -> Result<ClosureResidual> {
    let (klo, khi) = params.orbit_roots()?;
    let e0 = dk0 * dk0 + params.p4(k0);
    if e0.abs() > 1e-10 * (1.0 + k0.powi(4)) {
        return Err(Error::Input(format!("start state is off the orbit by {e0:e}")));
    }
    let period = frame_period(klo, khi)?;
    let m = if dk0 == 0.0 && (k0 - khi).abs() <= 1e-14 * khi {
        symmetric_monodromy(params, khi, period)?
    } else {
        monodromy(params, k0, dk0, period)?
    };
    Ok(closure_from_monodromy(&m))
}

fn closure_from_monodromy(m: &Matrix2<f64>) -> ClosureResidual {
    let trace = m.trace();
    let lobe_angle = if trace.abs() <= 2.0 + 1e-8 { 2.0 * (0.5 * trace).clamp(-1.0, 1.0).acos() } else { 0.0 };
    let lobes = if lobe_angle > 2.0 * PI / 64.0 { (2.0 * PI / lobe_angle).round().max(1.0) as usize } else { 64 };
    let mut p = Matrix2::identity();
    for _ in 0..lobes {
        p *= m;
    }
    let id = Matrix2::identity();
    let gap_frame = (p - id).norm().min((p + id).norm());
    let gap_translation = hyp_dist((0.0, 1.0), mobius(&p, (0.0, 1.0)));
    ClosureResidual { gap_translation, gap_frame, lobe_angle, trace, lobes }
}

/// Upper-half-plane fixed point of an elliptic Möbius map.
fn fixed_point(m: &Matrix2<f64>) -> Result<(f64, f64)> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let disc = (a - d).powi(2) + 4.0 * b * c;
    if disc >= 0.0 || c == 0.0 {
        return Err(Error::Degenerate("monodromy is not elliptic".into()));
    }
    let im = (-disc).sqrt() / (2.0 * c);
    let re = (a - d) / (2.0 * c);
    Ok((re, im.abs()))
}

fn frame0(d: f64) -> Matrix2<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix2::new((0.5 * d).exp(), 0.0, 0.0, (-0.5 * d).exp()) * Matrix2::new(s, s, -s, s)
}

/// Start frame placing the symmetry centre of the profile on the imaginary axis at `i`.
fn centred_frame(params: ElasticaParams, klo: f64, khi: f64) -> Result<Matrix2<f64>> {
    let homogeneous = khi - klo <= 1e-7 * khi;
    let t = frame_period(klo, khi)? * if homogeneous { 0.5 } else { 1.0 };
    let m = symmetric_monodromy(params, khi, t)?;
    let z = fixed_point(&m)?;
    let dist = hyp_dist((0.0, 1.0), z);
    let best = [dist, -dist]
        .into_iter()
        .map(|d| {
            let w = mobius(&frame0(d), z);
            ((w.0.powi(2) + (w.1 - 1.0).powi(2)).sqrt(), d)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    Ok(frame0(best.1))
}

/// Samples of a profile curve with unit hyperbolic speed, `x_i = 2πb·i/n`.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    pub b: f64,
    pub n_samples: usize,
    pub x: Vec<f64>,
    pub kappa: Vec<f64>,
    pub dkappa: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub lobes: usize,
    pub start_frame: Matrix2<f64>,
    /// Point and tangent at `x = 2πb`.
    pub end_point: (f64, f64),
    pub end_tangent: (f64, f64),
}

/// Scale-free local data at one sample, normalised to `u = 0`, `v = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveLocal {
    pub c: f64,
    pub s: f64,
    pub k: f64,
    pub kp: f64,
    pub ddu: f64,
    pub ddv: f64,
    pub d3u: f64,
    pub d3v: f64,
}

impl CurveLocal {
    pub fn new(c: f64, s: f64, k: f64, kp: f64) -> Self {
        let ddu = -s * k + 2.0 * c * s;
        let ddv = c * k - (c * c - s * s);
        let d3u = -ddv * k - s * kp + 2.0 * (ddu * s + c * ddv) - 2.0 * c * s * s;
        let d3v = ddu * k + c * kp - (2.0 * c * ddu - 2.0 * s * ddv) + (c * c - s * s) * s;
        CurveLocal { c, s, k, kp, ddu, ddv, d3u, d3v }
    }
}

impl ProfileCurve {
    pub fn length(&self) -> f64 {
        2.0 * PI * self.b
    }

    pub fn local(&self, i: usize) -> CurveLocal {
        CurveLocal::new(self.du[i] / self.v[i], self.dv[i] / self.v[i], self.kappa[i], self.dkappa[i])
    }

    pub fn locals(&self) -> Vec<CurveLocal> {
        (0..self.n_samples).map(|i| self.local(i)).collect()
    }

    /// `max | |γ'|_g − 1 |`.
    pub fn arclength_defect(&self) -> f64 {
        (0..self.n_samples).fold(0.0f64, |a, i| a.max((self.du[i].hypot(self.dv[i]) / self.v[i] - 1.0).abs()))
    }

    /// Scale-free mismatch between the state at `x = 2πb` and at `x = 0`.
    pub fn periodicity_gap(&self) -> f64 {
        let (z, t) = (self.end_point, self.end_tangent);
        let dz = hyp_dist((self.u[0], self.v[0]), z);
        let dt = ((t.0 / z.1 - self.du[0] / self.v[0]).powi(2) + (t.1 / z.1 - self.dv[0] / self.v[0]).powi(2)).sqrt();
        dz.max(dt)
    }

    /// `max |κ'' + ½κ³ + (μ−1)κ|` with κ'' from spectral differentiation of κ'.
    pub fn el_residual(&self, mu: f64) -> f64 {
        let d2 = derivative(&self.dkappa, self.length(), 1);
        d2.iter().zip(&self.kappa).fold(0.0f64, |a, (&dd, &k)| a.max((dd + 0.5 * k.powi(3) + (mu - 1.0) * k).abs()))
    }

    pub fn first_integral_drift(&self, params: ElasticaParams) -> f64 {
        self.kappa.iter().zip(&self.dkappa).fold(0.0f64, |a, (&k, &d)| a.max((d * d + params.p4(k)).abs()))
    }
}

/// Frame reconstruction for an arbitrary curvature function.
pub fn reconstruct_curve(
    kappa: &dyn Fn(f64) -> f64,
    length: f64,
    n: usize,
    start: Matrix2<f64>,
) -> Result<Vec<((f64, f64), (f64, f64))>> {
    let y0 = SVector::from([start[(0, 0)], start[(0, 1)], start[(1, 0)], start[(1, 1)]]);
    let (ys, _) = run(DrivenFrame { kappa }, y0, length, n)?;
    let pts: Vec<_> = ys.iter().map(|y| frame_point(&mat(y.as_slice()))).collect();
    if let Some(p) = pts.iter().find(|p| !(p.0 .1 > 1e-12) || !p.0 .1.is_finite()) {
        return Err(Error::BoundaryCollision(format!("v = {:e}", p.0 .1)));
    }
    Ok(pts)
}

/// Samples the closed profile with curvature range `[κ_lo, κ_hi]`, starting at the maximum.
pub fn sample_profile(klo: f64, khi: f64, b: f64, n: usize) -> Result<ProfileCurve> {
    if n < 8 {
        return Err(Error::Input(format!("{n} samples are too few")));
    }
    let params = ElasticaParams::from_roots(klo, khi);
    let f0 = centred_frame(params, klo, khi)?;
    let period = frame_period(klo, khi)?;
    let monod = symmetric_monodromy(params, khi, period)?;
    let closure = closure_from_monodromy(&monod);
    let length = 2.0 * PI * b;
    let lobes = closure.lobes;
    let per_lobe_exact = (lobes as f64 * period - length).abs() <= 1e-9 * length && n % lobes == 0;
    let y0 = SVector::from([khi, 0.0, 1.0, 0.0, 0.0, 1.0]);
    let sys = FrameSystem { mu: params.mu };
    let mut states: Vec<SVector<f64, 6>> = Vec::with_capacity(n);
    let end;
    if per_lobe_exact && lobes > 1 {
        let m = n / lobes;
        let (ys, _) = run(sys, y0, period, m)?;
        let mut power: Matrix2<f64> = Matrix2::identity();
        for _ in 0..lobes {
            for y in &ys {
                let f: Matrix2<f64> = power * mat(&y.as_slice()[2..]);
                states.push(SVector::from([y[0], y[1], f[(0, 0)], f[(0, 1)], f[(1, 0)], f[(1, 1)]]));
            }
            power *= monod;
        }
        end = frame_point(&(f0 * power));
    } else {
        let (ys, e) = run(sys, y0, length, n)?;
        states = ys;
        end = frame_point(&(f0 * mat(&e.as_slice()[2..])));
    }
    let mut c = ProfileCurve {
        b,
        n_samples: n,
        x: (0..n).map(|i| length * i as f64 / n as f64).collect(),
        kappa: Vec::with_capacity(n),
        dkappa: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        du: Vec::with_capacity(n),
        dv: Vec::with_capacity(n),
        lobes,
        start_frame: f0,
        end_point: end.0,
        end_tangent: end.1,
    };
    for y in &states {
        let (z, t) = frame_point(&(f0 * mat(&y.as_slice()[2..])));
        if !(z.1 > 1e-12) {
            return Err(Error::BoundaryCollision(format!("v = {:e}", z.1)));
        }
        c.kappa.push(y[0]);
        c.dkappa.push(y[1]);
        c.u.push(z.0);
        c.v.push(z.1);
        c.du.push(t.0);
        c.dv.push(t.1);
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Branch {
    Homogeneous,
    TwoLobe,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Homogeneous => "homogeneous",
            Branch::TwoLobe => "two-lobe",
        }
    }
}

/// Equivariant torus `(x, y) ↦ (u, v cos y, v sin y)` over a closed free elastica.
#[derive(Clone, Debug)]
pub struct TorusImmersion {
    pub curve: ProfileCurve,
    pub b: f64,
    pub params: ElasticaParams,
    /// Multiplier of the conformal constraint in the Lagrangian `½W − β·2π² Im τ`.
    pub beta: f64,
    pub energy: f64,
    pub branch: Branch,
    pub closure: ClosureResidual,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
}

impl TorusImmersion {
    fn build(curve: ProfileCurve, klo: f64, khi: f64, branch: Branch) -> Result<Self> {
        let params = ElasticaParams::from_roots(klo, khi);
        let closure = closure_residual(params, khi, 0.0)?;
        let energy = crate::surface::willmore_energy_of_curve(&curve);
        Ok(TorusImmersion { b: curve.b, beta: 0.5 * params.mu, energy, branch, closure, kappa_lo: klo, kappa_hi: khi, params, curve })
    }

    /// Grid whose x-samples coincide with the curve samples.
    pub fn grid(&self, ny: usize) -> Grid {
        Grid::new(self.b, self.curve.n_samples, ny)
    }

    /// Same torus sampled at a different resolution.
    pub fn resampled(&self, n: usize) -> Result<Self> {
        let curve = sample_profile(self.kappa_lo, self.kappa_hi, self.b, n)?;
        Ok(TorusImmersion { curve, ..self.clone() })
    }
}

/// Constant-curvature profile `κ = √(1 + 1/b²)`: a hyperbolic circle of circumference 2πb.
pub fn homogeneous_torus(b: f64, n: usize) -> Result<TorusImmersion> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("b = {b} must be positive")));
    }
    let k = (1.0 + 1.0 / (b * b)).sqrt();
    let curve = sample_profile(k, k, b, n)?;
    TorusImmersion::build(curve, k, k, Branch::Homogeneous)
}

/// Branch point of the two-lobe family.
pub fn two_lobe_b0() -> f64 {
    3f64.sqrt()
}

/// Relative Brent tolerance with an iteration cap.
pub(crate) struct Tol {
    pub(crate) x: f64,
    pub(crate) iters: usize,
}

impl Convergency<f64> for Tol {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.x * (1.0 + a.abs())
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.iters
    }
}

/// Continuation state for the two-lobe branch, parametrised by the half-amplitude `a`
/// and centre `c` of the curvature range `[c − a, c + a]`.
#[derive(Clone, Copy, Debug)]
pub struct TwoLobeSolver {
    pub a: f64,
    pub c: f64,
    pub b: f64,
}

impl Default for TwoLobeSolver {
    fn default() -> Self {
        TwoLobeSolver { a: 0.0, c: 2.0 / 3f64.sqrt(), b: two_lobe_b0() }
    }
}

fn trace_at(c: f64, a: f64) -> Result<f64> {
    let (klo, khi) = (c - a, c + a);
    let params = ElasticaParams::from_roots(klo, khi);
    Ok(symmetric_monodromy(params, khi, frame_period(klo, khi)?)?.trace())
}

impl TwoLobeSolver {
    /// Centre with vanishing monodromy trace at half-amplitude `a`.
    fn centre(a: f64, guess: f64) -> Result<f64> {
        let f = |c: f64| trace_at(c, a).unwrap_or(f64::NAN);
        let lo_floor = a + 1e-9;
        let (mut lo, mut hi) = ((guess * 0.9).max(lo_floor), guess * 1.1);
        let (mut flo, mut fhi) = (f(lo), f(hi));
        let mut tries = 0;
        while !(flo * fhi <= 0.0) {
            tries += 1;
            if tries > 20 {
                return Err(Error::NoConvergence(format!("no trace bracket at a = {a}")));
            }
            lo = (lo - 0.1 * guess).max(lo_floor);
            hi += 0.1 * guess;
            flo = f(lo);
            fhi = f(hi);
        }
        find_root_brent(lo, hi, f, &mut Tol { x: 1e-15, iters: 200 })
            .map_err(|e| Error::NoConvergence(format!("centre solve at a = {a}: {e:?}")))
    }

    fn b_of(a: f64, c: f64) -> Result<f64> {
        if a == 0.0 {
            return Ok(2.0 / c);
        }
        Ok(kappa_period(c - a, c + a)? / PI)
    }

    /// Advances along the branch to `b` and builds the torus there.
    pub fn torus(&mut self, b: f64, n: usize) -> Result<TorusImmersion> {
        let (klo, khi) = self.solve(b)?;
        two_lobe_from_roots(klo, khi, b, n)
    }

    /// Advances along the branch to parameter `b` and returns `(κ_lo, κ_hi)`.
    pub fn solve(&mut self, b: f64) -> Result<(f64, f64)> {
        let b0 = two_lobe_b0();
        if !(b > b0 + 1e-12) {
            return Err(Error::OutOfBranch(format!("b = {b} below bifurcation √3")));
        }
        if b == self.b && self.a > 0.0 {
            return Ok((self.c - self.a, self.c + self.a));
        }
        if b < self.b {
            *self = TwoLobeSolver::default();
        }
        let mut da = 0.02;
        loop {
            let a_new = self.a + da;
            let step = TwoLobeSolver::centre(a_new, self.c).and_then(|c| Ok((c, TwoLobeSolver::b_of(a_new, c)?)));
            let (c_new, b_new) = match step {
                Ok(v) if v.1.is_finite() => v,
                _ => {
                    da *= 0.5;
                    if da < 1e-6 {
                        return Err(Error::NoConvergence(format!("continuation stalled at a = {}", self.a)));
                    }
                    continue;
                }
            };
            if b_new >= b {
                let c_guess = self.c;
                let g = |a: f64| {
                    TwoLobeSolver::centre(a, c_guess)
                        .and_then(|c| TwoLobeSolver::b_of(a, c))
                        .map(|bb| bb - b)
                        .unwrap_or(f64::NAN)
                };
                let a = if (b_new - b).abs() == 0.0 {
                    a_new
                } else {
                    find_root_brent(self.a, a_new, g, &mut Tol { x: 1e-14, iters: 200 })
                        .map_err(|e| Error::NoConvergence(format!("amplitude solve for b = {b}: {e:?}")))?
                };
                let c = TwoLobeSolver::centre(a, c_guess)?;
                *self = TwoLobeSolver { a, c, b };
                return Ok((c - a, c + a));
            }
            *self = TwoLobeSolver { a: a_new, c: c_new, b: b_new };
        }
    }
}

pub fn shoot_two_lobe(b: f64, n: usize) -> Result<TorusImmersion> {
    let mut s = TwoLobeSolver::default();
    let (klo, khi) = s.solve(b)?;
    two_lobe_from_roots(klo, khi, b, n)
}

fn two_lobe_from_roots(klo: f64, khi: f64, b: f64, n: usize) -> Result<TorusImmersion> {
    let curve = sample_profile(klo, khi, b, n)?;
    if curve.lobes != 2 {
        return Err(Error::NoConvergence(format!("shooting produced {} lobes", curve.lobes)));
    }
    TorusImmersion::build(curve, klo, khi, Branch::TwoLobe)
}

/// Tori on a grid of `b` values; the two-lobe branch is followed by continuation.
pub fn family_sweep(bs: &[f64], branch: Branch, n: usize) -> Result<Vec<TorusImmersion>> {
    if bs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("b grid must be strictly increasing".into()));
    }
    let mut solver = TwoLobeSolver::default();
    bs.iter()
        .map(|&b| match branch {
            Branch::Homogeneous => homogeneous_torus(b, n),
            Branch::TwoLobe => solver.torus(b, n),
        })
        .collect()
}
