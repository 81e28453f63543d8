//! Pointwise geometry of the normally deformed torus `F_t = F + tφν`, generic over the scalar
//! so that the same expressions give values (`f64`) and exact second-order jets ([`Jet2`]).
//!
//! Every quantity here is invariant under hyperbolic translations `u ↦ u + c` and dilations,
//! so the curve is normalised to `u = 0`, `v = 1` at each sample (see [`CurveLocal`]).
//!
//! [`Jet2`]: crate::spectral::Jet2

use crate::elastica::CurveLocal;
use crate::spectral::Scalar;

/// Value and first/second partials of φ at one grid point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhiPoint {
    pub p: f64,
    pub px: f64,
    pub py: f64,
    pub pxx: f64,
    pub pxy: f64,
    pub pyy: f64,
}

/// Profile coordinates of `F_t` and their partials.
struct Pieces<S> {
    v: S,
    ux: S,
    vx: S,
    uy: S,
    vy: S,
    uxx: S,
    vxx: S,
    uxy: S,
    vxy: S,
    uyy: S,
    vyy: S,
}

fn pieces<S: Scalar>(cl: &CurveLocal, f: &PhiPoint, t: S) -> Pieces<S> {
    let (c, s) = (cl.c, cl.s);
    Pieces {
        v: t * (c * f.p) + 1.0,
        ux: -(t * (cl.ddv * f.p + s * f.px)) + c,
        vx: t * (cl.ddu * f.p + c * f.px) + s,
        uy: -(t * (s * f.py)),
        vy: t * (c * f.py),
        uxx: -(t * (cl.d3v * f.p + 2.0 * cl.ddv * f.px + s * f.pxx)) + cl.ddu,
        vxx: t * (cl.d3u * f.p + 2.0 * cl.ddu * f.px + c * f.pxx) + cl.ddv,
        uxy: -(t * (cl.ddv * f.py + s * f.pxy)),
        vxy: t * (cl.ddu * f.py + c * f.pxy),
        uyy: -(t * (s * f.pyy)),
        vyy: t * (c * f.pyy),
    }
}

/// Induced metric `(g_xx, g_xy, g_yy)` in the conformally flat model `(du² + dv²)/v² + dy²`.
pub fn metric_at<S: Scalar>(cl: &CurveLocal, f: &PhiPoint, t: S) -> (S, S, S) {
    let q = pieces(cl, f, t);
    let iv = S::cst(1.0) / q.v;
    let (a1, a2, b1, b2) = (q.ux * iv, q.vx * iv, q.uy * iv, q.vy * iv);
    (a1 * a1 + a2 * a2, a1 * b1 + a2 * b2, b1 * b1 + b2 * b2 + 1.0)
}

/// Second fundamental form `(L_xx, L_xy, L_yy)` and the metric, in the same model.
pub fn second_fundamental_form_at<S: Scalar>(cl: &CurveLocal, f: &PhiPoint, t: S) -> ([S; 3], [S; 3]) {
    let q = pieces(cl, f, t);
    let iv = S::cst(1.0) / q.v;
    let x = [q.ux * iv, q.vx * iv];
    let y = [q.uy * iv, q.vy * iv];
    // ν ∝ Y × X with X = (x₀, x₁, 0), Y = (y₀, y₁, 1)
    let (n1, n2, n3) = (-x[1], x[0], y[0] * x[1] - y[1] * x[0]);
    let nn = (n1 * n1 + n2 * n2 + n3 * n3).sqrt();
    let (n1, n2) = (n1 / nn, n2 / nn);
    let cov = |aij: S, bij: S, ai: S, aj: S, bi: S, bj: S| {
        let cu = aij - (ai * bj + bi * aj) * iv;
        let cv = bij + (ai * aj - bi * bj) * iv;
        (cu * n1 + cv * n2) * iv
    };
    let lxx = cov(q.uxx, q.vxx, q.ux, q.ux, q.vx, q.vx);
    let lxy = cov(q.uxy, q.vxy, q.ux, q.uy, q.vx, q.vy);
    let lyy = cov(q.uyy, q.vyy, q.uy, q.uy, q.vy, q.vy);
    let e = x[0] * x[0] + x[1] * x[1];
    let ff = x[0] * y[0] + x[1] * y[1];
    let g = y[0] * y[0] + y[1] * y[1] + 1.0;
    ([lxx, lxy, lyy], [e, ff, g])
}

/// `(H² − K) dA` per unit `dx dy`.
pub fn willmore_density_at<S: Scalar>(cl: &CurveLocal, f: &PhiPoint, t: S) -> S {
    let ([lxx, lxy, lyy], [e, ff, g]) = second_fundamental_form_at(cl, f, t);
    let det = e * g - ff * ff;
    let h = (e * lyy - ff * lxy * 2.0 + g * lxx) / (det * 2.0);
    let k = (lxx * lyy - lxy * lxy) / det;
    (h * h - k) * det.sqrt()
}

/// `⅛(κ_g² − 2μ) ds` per unit `dx` for the profile moved by `t f(x)` along its normal.
pub fn curve_density_at<S: Scalar>(cl: &CurveLocal, f: f64, fx: f64, fxx: f64, t: S, mu: f64) -> S {
    let (c, s) = (cl.c, cl.s);
    let v = t * (c * f) + 1.0;
    let ux = -(t * (cl.ddv * f + s * fx)) + c;
    let vx = t * (cl.ddu * f + c * fx) + s;
    let uxx = -(t * (cl.d3v * f + 2.0 * cl.ddv * fx + s * fxx)) + cl.ddu;
    let vxx = t * (cl.d3u * f + 2.0 * cl.ddu * fx + c * fxx) + cl.ddv;
    let sp2 = ux * ux + vx * vx;
    let sp = sp2.sqrt();
    let ke = (ux * vxx - vx * uxx) / (sp2 * sp);
    let kg = v * ke + ux / sp;
    let ds = sp / v;
    (kg * kg * ds - ds * (2.0 * mu)) * 0.125
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fd_second_derivative;
    use crate::spectral::Jet2;

    fn sample_local() -> CurveLocal {
        let th = 0.7f64;
        CurveLocal::new(th.cos(), th.sin(), 1.3, -0.4)
    }

    #[test]
    fn unperturbed_values() {
        let cl = sample_local();
        let z = PhiPoint::default();
        let (gxx, gxy, gyy) = metric_at(&cl, &z, 0.0);
        assert!((gxx - 1.0).abs() < 1e-15 && gxy == 0.0 && gyy == 1.0);
        let ([lxx, lxy, lyy], _) = second_fundamental_form_at(&cl, &z, 0.0);
        assert!((lxx - 1.3).abs() < 1e-14 && lxy.abs() < 1e-15 && lyy.abs() < 1e-15);
        assert!((willmore_density_at(&cl, &z, 0.0) - 1.3 * 1.3 / 4.0).abs() < 1e-14);
        assert!((curve_density_at(&cl, 0.0, 0.0, 0.0, 0.0, 0.2) - 0.125 * (1.69 - 0.4)).abs() < 1e-14);
    }

    #[test]
    fn jets_match_finite_differences() {
        let cl = sample_local();
        let f = PhiPoint { p: 0.3, px: -0.2, py: 0.5, pxx: 0.1, pxy: -0.7, pyy: 0.4 };
        let j = willmore_density_at(&cl, &f, Jet2::var());
        let fd = fd_second_derivative(|t| willmore_density_at(&cl, &f, t), 1e-2, 5);
        assert!((j.d2() - fd.value).abs() < 1e-7 * (1.0 + fd.value.abs()));
        let j = curve_density_at(&cl, 0.3, -0.2, 0.1, Jet2::var(), 0.3);
        let fd = fd_second_derivative(|t| curve_density_at(&cl, 0.3, -0.2, 0.1, t, 0.3), 1e-2, 5);
        assert!((j.d2() - fd.value).abs() < 1e-7 * (1.0 + fd.value.abs()));
    }
}
