//! Zero crossings of the homogeneous-family Hessian, one profile frequency at a time.

use super::forms::{mode_hessian_on, XBasis};
use crate::elastica::{homogeneous_torus, Tol};
use crate::error::{Error, Result};
use crate::spectral::sym_eig;
use nalgebra::DMatrix;
use roots::find_root_brent;
use serde::Serialize;

/// Profile samples used for each homogeneous torus in a scan.
pub const SCAN_SAMPLES: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub b_star: f64,
    /// Profile frequency `j` of the `cos(jx/b)`, `sin(jx/b)` pair.
    pub j: usize,
    pub mode: String,
    /// `√(j² − 1)`.
    pub predicted: f64,
}

/// Smallest eigenvalue of the y-mode-0 Hessian of the homogeneous torus `f^b` on the
/// pair `cos(jx/b)`, `sin(jx/b)`.
pub fn profile_eigenvalue(b: f64, j: usize) -> Result<f64> {
    profile_eigenvalue_with(b, j, SCAN_SAMPLES)
}

/// [`profile_eigenvalue`] with a given number of profile samples.
pub fn profile_eigenvalue_with(b: f64, j: usize, samples: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::Input("the constant profile is removed by the constraint".into()));
    }
    let t = homogeneous_torus(b, samples.max(16 * j + 64))?;
    let basis = XBasis { b, jmax: j };
    let h = mode_hessian_on(&t, &basis, 0);
    let block = DMatrix::from_fn(2, 2, |r, c| h[(2 * j - 1 + r, 2 * j - 1 + c)]);
    Ok(sym_eig(&block)?.values[0])
}

/// Sign changes of `profile_eigenvalue(·, j)` for `2 ≤ j ≤ j_max` over `resolution` equal
/// steps, each refined by Brent's method. `j = 1` is omitted: its pair is spanned by
/// Möbius directions and stays in the kernel for every `b`.
pub fn bifurcation_scan(b_min: f64, b_max: f64, resolution: usize) -> Result<Vec<Crossing>> {
    bifurcation_scan_with(b_min, b_max, resolution, SCAN_SAMPLES)
}

/// [`bifurcation_scan`] with a given number of profile samples per torus.
pub fn bifurcation_scan_with(b_min: f64, b_max: f64, resolution: usize, samples: usize) -> Result<Vec<Crossing>> {
    if !(b_min > 0.0) || !(b_max >= b_min) || resolution == 0 {
        return Err(Error::Input(format!("invalid scan [{b_min}, {b_max}] with {resolution} steps")));
    }
    if b_max == b_min {
        return Ok(Vec::new());
    }
    let j_max = 2 * b_max.ceil() as usize + 2;
    let bs: Vec<f64> = (0..=resolution).map(|i| b_min + (b_max - b_min) * i as f64 / resolution as f64).collect();
    let mut out = Vec::new();
    for j in 2..=j_max {
        let vals = bs.iter().map(|&b| profile_eigenvalue_with(b, j, samples)).collect::<Result<Vec<_>>>()?;
        for w in 0..resolution {
            if vals[w] == 0.0 || vals[w].signum() == vals[w + 1].signum() {
                continue;
            }
            let mut err = None;
            let f = |b: f64| {
                profile_eigenvalue_with(b, j, samples).unwrap_or_else(|e| {
                    err = Some(e);
                    f64::NAN
                })
            };
            let root = find_root_brent(bs[w], bs[w + 1], f, &mut Tol { x: 1e-10, iters: 100 });
            if let Some(e) = err {
                return Err(e);
            }
            let b_star = root.map_err(|e| Error::NoConvergence(format!("crossing refinement for j = {j}: {e:?}")))?;
            out.push(Crossing { b_star, j, mode: format!("cos/sin({j}x)"), predicted: ((j * j - 1) as f64).sqrt() });
        }
    }
    out.sort_by(|a, b| a.b_star.total_cmp(&b.b_star));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_at_sqrt3() {
        let c = bifurcation_scan(1.5, 2.0, 10).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].j, 2);
        assert!((c[0].b_star - 3f64.sqrt()).abs() < 1e-3, "{}", c[0].b_star);
    }

    #[test]
    fn crossing_at_sqrt8() {
        let c = bifurcation_scan(2.5, 3.0, 10).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].b_star - 8f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn no_crossing_near_clifford() {
        assert!(bifurcation_scan(1.0, 1.5, 10).unwrap().is_empty());
    }
}
