//! Upper-half-plane hyperbolic geometry: metric, normals, geodesic curvature,
//! Killing fields, and the normal components of ambient conformal fields.

use crate::elastica::{ProfileCurve, TorusImmersion};
use crate::error::{Error, Result};
use crate::spectral::{numerical_rank, FourierField, Grid, RankInfo};
use nalgebra::DMatrix;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    pub u: f64,
    pub v: f64,
}

impl HPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if v > 0.0 && v.is_finite() && u.is_finite() {
            Ok(HPoint { u, v })
        } else {
            Err(Error::Domain(format!("point ({u}, {v}) is not in the upper half plane")))
        }
    }
}

/// Components in the `∂u, ∂v` frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVec {
    pub du: f64,
    pub dv: f64,
}

pub fn hyp_norm(p: HPoint, t: TangentVec) -> Result<f64> {
    if p.v <= 0.0 {
        return Err(Error::Domain(format!("v = {} is not positive", p.v)));
    }
    Ok(t.du.hypot(t.dv) / p.v)
}

/// Hyperbolic inner product at `p`.
pub fn hyp_inner(p: HPoint, a: TangentVec, b: TangentVec) -> f64 {
    (a.du * b.du + a.dv * b.dv) / (p.v * p.v)
}

/// Oriented normal `(−v', u')` of a tangent `(u', v')`.
pub fn normal_field(du: f64, dv: f64) -> Result<TangentVec> {
    if du == 0.0 && dv == 0.0 {
        return Err(Error::Domain("zero tangent has no normal".into()));
    }
    Ok(TangentVec { du: -dv, dv: du })
}

/// Position and first two derivatives of an arclength-parametrized curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
    pub ddu: f64,
    pub ddv: f64,
}

/// Inverts `u'' = −v'κ + 2u'v'/v`, `v'' = u'κ − (u'²−v'²)/v` for κ.
pub fn geodesic_curvature(s: &CurveSample) -> Result<f64> {
    if s.v <= 0.0 {
        return Err(Error::Domain(format!("v = {} is not positive", s.v)));
    }
    let v2 = s.v * s.v;
    let speed2 = s.du * s.du + s.dv * s.dv;
    if (speed2 - v2).abs() > 1e-8 * v2 {
        return Err(Error::Inconsistency(format!("|u'|²+|v'|² = {speed2:e} but v² = {v2:e}")));
    }
    // Residual vectors of the two equations; normal part gives κ, tangential part must vanish.
    let ru = s.ddu - 2.0 * s.du * s.dv / s.v;
    let rv = s.ddv + (s.du * s.du - s.dv * s.dv) / s.v;
    let kappa = (-s.dv * ru + s.du * rv) / speed2;
    let tangential = (s.du * ru + s.dv * rv) / speed2;
    let scale = 1.0 + kappa.abs();
    if tangential.abs() > 1e-8 * scale {
        return Err(Error::Inconsistency(format!(
            "the two curvature equations disagree (tangential defect {tangential:e})"
        )));
    }
    Ok(kappa)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KillingKind {
    Translation,
    Dilation,
    Special,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KillingField {
    pub label: KillingKind,
}

impl KillingField {
    pub fn eval(&self, p: HPoint) -> TangentVec {
        match self.label {
            KillingKind::Translation => TangentVec { du: 1.0, dv: 0.0 },
            KillingKind::Dilation => TangentVec { du: p.u, dv: p.v },
            KillingKind::Special => TangentVec { du: p.u * p.u - p.v * p.v, dv: 2.0 * p.u * p.v },
        }
    }

    /// Hyperbolic normal component along a curve with tangent `t`, in units of the unit normal.
    pub fn normal_component(&self, p: HPoint, t: TangentVec) -> f64 {
        let k = self.eval(p);
        (-t.dv * k.du + t.du * k.dv) / (p.v * p.v)
    }
}

/// `∂u`, `u∂u + v∂v`, `(u²−v²)∂u + 2uv∂v`.
pub fn isometry_basis() -> [KillingField; 3] {
    [
        KillingField { label: KillingKind::Translation },
        KillingField { label: KillingKind::Dilation },
        KillingField { label: KillingKind::Special },
    ]
}

/// Normal component of one conformal field, split exactly into y-modes:
/// `φ(x, y) = mode0(x) + cos_part(x) cos y + sin_part(x) sin y`.
#[derive(Clone, Debug)]
pub struct MobiusProfile {
    pub label: &'static str,
    pub mode0: Vec<f64>,
    pub cos_part: Vec<f64>,
    pub sin_part: Vec<f64>,
}

impl MobiusProfile {
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid_samples(grid, |i, y| self.mode0[i] + self.cos_part[i] * y.cos() + self.sin_part[i] * y.sin())
    }
}

fn grid_samples(grid: &Grid, f: impl Fn(usize, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.nx {
        for k in 0..grid.ny {
            out.push(f(i, grid.y(k)));
        }
    }
    out
}

/// Normal components `⟨V, ν⟩/v²`, `ν = (−v', u' cos y, u' sin y)`, of the ten conformal
/// fields of ℝ³ on the torus `(u, v cos y, v sin y)`.
pub fn mobius_profiles(curve: &ProfileCurve) -> Vec<MobiusProfile> {
    let n = curve.n_samples;
    let zero = vec![0.0; n];
    let per = |f: &dyn Fn(f64, f64, f64, f64) -> f64| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let (u, v, du, dv) = (curve.u[i], curve.v[i], curve.du[i], curve.dv[i]);
                f(u, v, du, dv) / (v * v)
            })
            .collect()
    };
    let special_axis = per(&|u, v, du, dv| 2.0 * u * du * v - u * u * dv + v * v * dv);
    let special_side = per(&|u, v, du, dv| 2.0 * v * (du * v - u * dv) - (u * u + v * v) * du);
    let rot_side = per(&|u, v, du, dv| v * dv + u * du);
    let trans_side = per(&|_, _, du, _| du);
    vec![
        MobiusProfile { label: "translation e1", mode0: per(&|_, _, _, dv| -dv), cos_part: zero.clone(), sin_part: zero.clone() },
        MobiusProfile { label: "translation e2", mode0: zero.clone(), cos_part: trans_side.clone(), sin_part: zero.clone() },
        MobiusProfile { label: "translation e3", mode0: zero.clone(), cos_part: zero.clone(), sin_part: trans_side },
        MobiusProfile { label: "rotation e1", mode0: zero.clone(), cos_part: zero.clone(), sin_part: zero.clone() },
        MobiusProfile {
            label: "rotation e2",
            mode0: zero.clone(),
            cos_part: zero.clone(),
            sin_part: rot_side.iter().map(|x| -x).collect(),
        },
        MobiusProfile { label: "rotation e3", mode0: zero.clone(), cos_part: rot_side, sin_part: zero.clone() },
        MobiusProfile { label: "dilation", mode0: per(&|u, v, du, dv| du * v - u * dv), cos_part: zero.clone(), sin_part: zero.clone() },
        MobiusProfile { label: "special e1", mode0: special_axis, cos_part: zero.clone(), sin_part: zero.clone() },
        MobiusProfile { label: "special e2", mode0: zero.clone(), cos_part: special_side.clone(), sin_part: zero.clone() },
        MobiusProfile { label: "special e3", mode0: zero.clone(), cos_part: zero, sin_part: special_side },
    ]
}

/// Ambient conformal fields projected to the normal, with the ranks of their span.
#[derive(Clone, Debug)]
pub struct MobiusSpan {
    pub profiles: Vec<MobiusProfile>,
    pub fields: Vec<FourierField>,
    pub rank: RankInfo,
    pub mode0_rank: RankInfo,
    pub mode1_rank: RankInfo,
}

/// Rank threshold and gap used for all Möbius span computations.
pub const MOBIUS_RANK_TOL: f64 = 1e-8;
pub const MOBIUS_RANK_GAP: f64 = 10.0;

fn profile_matrix(curve: &ProfileCurve, cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = curve.n_samples;
    let rows = cols.first().map(|c| c.len()).unwrap_or(0);
    let w = (2.0 * PI * curve.b / n as f64).sqrt();
    let mut m = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for (i, x) in c.iter().enumerate() {
            m[(i, j)] = w * x / (norm * w);
        }
    }
    m
}

pub fn ambient_mobius_normal_fields(torus: &TorusImmersion, jmax: usize, kmax: usize) -> Result<MobiusSpan> {
    let curve = &torus.curve;
    let profiles = mobius_profiles(curve);
    let full: Vec<Vec<f64>> = profiles
        .iter()
        .map(|p| {
            let mut c: Vec<f64> = p.mode0.iter().map(|x| x * (2.0f64).sqrt()).collect();
            c.extend(&p.cos_part);
            c.extend(&p.sin_part);
            c
        })
        .collect();
    let m0: Vec<Vec<f64>> = profiles.iter().map(|p| p.mode0.clone()).collect();
    let m1: Vec<Vec<f64>> = profiles
        .iter()
        .map(|p| p.cos_part.iter().chain(&p.sin_part).copied().collect())
        .collect();
    let rank = numerical_rank(&profile_matrix(curve, &full), MOBIUS_RANK_TOL, MOBIUS_RANK_GAP)?;
    let mode0_rank = numerical_rank(&profile_matrix(curve, &m0), MOBIUS_RANK_TOL, MOBIUS_RANK_GAP)?;
    let mode1_rank = numerical_rank(&profile_matrix(curve, &m1), MOBIUS_RANK_TOL, MOBIUS_RANK_GAP)?;
    let ny = (2 * kmax + 2).max(8);
    let grid = Grid::new(curve.b, curve.n_samples, ny);
    let fields = profiles
        .iter()
        .map(|p| FourierField::analyze(&p.sample(&grid), &grid, jmax, kmax))
        .collect::<Result<Vec<_>>>()?;
    Ok(MobiusSpan { profiles, fields, rank, mode0_rank, mode1_rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn norm_examples() {
        assert_eq!(hyp_norm(HPoint { u: 0.0, v: 1.0 }, TangentVec { du: 1.0, dv: 0.0 }).unwrap(), 1.0);
        assert_eq!(hyp_norm(HPoint { u: 0.0, v: 2.0 }, TangentVec { du: 2.0, dv: 0.0 }).unwrap(), 1.0);
        let n = hyp_norm(HPoint { u: 3.0, v: 0.5 }, TangentVec { du: 0.3, dv: 0.4 }).unwrap();
        assert!((n - 1.0).abs() < 1e-15);
        assert!(HPoint::new(0.0, -1.0).is_err());
        assert!(hyp_norm(HPoint { u: 0.0, v: 0.0 }, TangentVec { du: 1.0, dv: 0.0 }).is_err());
    }

    #[test]
    fn normal_examples() {
        assert_eq!(normal_field(1.0, 0.0).unwrap(), TangentVec { du: 0.0, dv: 1.0 });
        assert_eq!(normal_field(0.0, 1.0).unwrap(), TangentVec { du: -1.0, dv: 0.0 });
        assert_eq!(normal_field(0.6, 0.8).unwrap(), TangentVec { du: -0.8, dv: 0.6 });
        assert!(normal_field(0.0, 0.0).is_err());
    }

    #[test]
    fn killing_examples() {
        let p = HPoint { u: 0.0, v: 1.0 };
        let [t, d, s] = isometry_basis();
        assert_eq!(t.eval(p), TangentVec { du: 1.0, dv: 0.0 });
        assert_eq!(d.eval(p), TangentVec { du: 0.0, dv: 1.0 });
        assert_eq!(s.eval(p), TangentVec { du: -1.0, dv: 0.0 });
    }

    /// Killing equation for g = (du²+dv²)/v²: K·∇(1/v²)δ_ij + (∂_i K_j + ∂_j K_i)/v² = 0 in components.
    #[test]
    fn killing_equation_by_finite_differences() {
        let h = 1e-5;
        for f in isometry_basis() {
            for &(u, v) in &[(0.3, 0.7), (-1.2, 2.5), (2.0, 0.4), (0.0, 1.0)] {
                let p = HPoint { u, v };
                let d = |du: f64, dv: f64| f.eval(HPoint { u: u + du, v: v + dv });
                let ku_u = (d(h, 0.0).du - d(-h, 0.0).du) / (2.0 * h);
                let ku_v = (d(0.0, h).du - d(0.0, -h).du) / (2.0 * h);
                let kv_u = (d(h, 0.0).dv - d(-h, 0.0).dv) / (2.0 * h);
                let kv_v = (d(0.0, h).dv - d(0.0, -h).dv) / (2.0 * h);
                let k = f.eval(p);
                // Lie derivative of λ δ_ij with λ = 1/v²: K(λ) δ_ij + λ(∂_i K^j + ∂_j K^i).
                let lam = 1.0 / (v * v);
                let klam = k.dv * (-2.0 / (v * v * v));
                let r_uu = klam + lam * 2.0 * ku_u;
                let r_vv = klam + lam * 2.0 * kv_v;
                let r_uv = lam * (ku_v + kv_u);
                assert!(r_uu.abs() < 1e-8 && r_vv.abs() < 1e-8 && r_uv.abs() < 1e-8, "{:?} at {:?}", f.label, p);
            }
        }
    }

    #[test]
    fn curvature_of_horocycle_and_geodesic() {
        let v0 = 0.7;
        let s = CurveSample { u: 0.0, v: v0, du: v0, dv: 0.0, ddu: 0.0, ddv: 0.0 };
        assert!((geodesic_curvature(&s).unwrap() - 1.0).abs() < 1e-12);
        // Unit semicircle through i, arclength: u = tanh x, v = sech x.
        for &x in &[-0.8f64, 0.0, 0.3, 1.1] {
            let (t, sc) = (x.tanh(), 1.0 / x.cosh());
            let s = CurveSample {
                u: t,
                v: sc,
                du: sc * sc,
                dv: -sc * t,
                ddu: -2.0 * sc * sc * t,
                ddv: -sc * (sc * sc - t * t),
            };
            assert!(geodesic_curvature(&s).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn inconsistent_sample_rejected() {
        let s = CurveSample { u: 0.0, v: 1.0, du: 2.0, dv: 0.0, ddu: 0.0, ddv: 0.0 };
        assert!(matches!(geodesic_curvature(&s), Err(Error::Inconsistency(_))));
    }

    proptest! {
        #[test]
        fn normal_is_orthogonal_with_equal_norm(u in -5.0f64..5.0, v in 0.01f64..10.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            prop_assume!(a.abs() + b.abs() > 1e-6);
            let p = HPoint { u, v };
            let t = TangentVec { du: a, dv: b };
            let n = normal_field(a, b).unwrap();
            prop_assert!(hyp_inner(p, t, n).abs() <= 1e-12 * hyp_inner(p, t, t));
            prop_assert!((hyp_norm(p, n).unwrap() - hyp_norm(p, t).unwrap()).abs() <= 1e-12 * hyp_norm(p, t).unwrap());
        }
    }
}
