//! Dense symmetric eigendecomposition and numerical rank.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct SymEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &v| a.max(v.abs()))
}

pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn sym_eig(m: &DMatrix<f64>) -> Result<SymEig> {
    if m.nrows() != m.ncols() {
        return Err(Error::Input(format!("non-square {}x{} matrix", m.nrows(), m.ncols())));
    }
    let asym = asymmetry(m);
    if asym > 1e-10 * (1.0 + max_abs(m)) {
        return Err(Error::Input(format!("matrix not symmetric (max |M - Mᵀ| = {asym:e})")));
    }
    let sym = (m + m.transpose()) * 0.5;
    let e = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| e.eigenvectors[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

/// Spectral norm of a symmetric matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0, |a, &v| a.max(v))
}

#[derive(Clone, Debug)]
pub struct RankInfo {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

/// Rank with relative threshold `rel_tol`, demanding a gap factor `gap` at the cut.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64, gap: f64) -> Result<RankInfo> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(RankInfo { rank: 0, singular_values: s });
    }
    let rank = s.iter().filter(|&&v| v > rel_tol * top).count();
    if rank < s.len() && rank > 0 && s[rank - 1] < gap * s[rank] {
        return Err(Error::Conditioning(format!(
            "rank ambiguous: retained {:e} vs discarded {:e}",
            s[rank - 1],
            s[rank]
        )));
    }
    Ok(RankInfo { rank, singular_values: s })
}

/// Orthonormal basis (columns) of the orthogonal complement of `c`.
pub fn complement_basis(c: &DVector<f64>) -> DMatrix<f64> {
    let n = c.len();
    let norm = c.norm();
    if norm == 0.0 {
        return DMatrix::identity(n, n);
    }
    let u = c / norm;
    let proj = DMatrix::identity(n, n) - &u * u.transpose();
    let e = nalgebra::SymmetricEigen::new(proj);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| e.eigenvalues[i] > 0.5)
        .map(|i| e.eigenvectors.column(i).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

/// Orthonormal basis of the column span, using the given rank tolerance.
pub fn orthonormal_span(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.iter().fold(0.0, |a: f64, &v| a.max(v));
    let cols: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > rel_tol * top)
        .map(|i| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Classification of a spectrum by a zero tolerance and a required gap factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
    pub tol: f64,
    /// Smallest |λ| outside the zero band divided by the largest |λ| inside it, or by `tol` when the band is empty.
    pub gap: f64,
}

pub fn inertia(values: &[f64], tol: f64) -> Inertia {
    let zero = values.iter().filter(|v| v.abs() < tol).count();
    let negative = values.iter().filter(|&&v| v <= -tol).count();
    let positive = values.len() - zero - negative;
    let inside = values.iter().filter(|v| v.abs() < tol).fold(0.0, |a: f64, v| a.max(v.abs()));
    let outside = values.iter().filter(|v| v.abs() >= tol).fold(f64::INFINITY, |a: f64, v| a.min(v.abs()));
    let gap = outside / tol.max(inside);
    Inertia { negative, zero, positive, tol, gap }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_diagonal() {
        let e = sym_eig(&DMatrix::identity(5, 5)).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -1.0, 0.0]));
        let e = sym_eig(&d).unwrap();
        assert_eq!(e.values, vec![-1.0, 0.0, 2.0]);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DMatrix::from_fn(50, 50, |_, _| rng.gen_range(-1.0..1.0));
        let m = &a + a.transpose();
        let e = sym_eig(&m).unwrap();
        let lam = DMatrix::from_diagonal(&DVector::from_vec(e.values.clone()));
        let rec = &e.vectors * lam * e.vectors.transpose();
        assert!(max_abs(&(rec - &m)) < 1e-9);
        let orth = e.vectors.transpose() * &e.vectors - DMatrix::identity(50, 50);
        assert!(max_abs(&orth) < 1e-10);
        let norm = spectral_norm(&m);
        for (i, &l) in e.values.iter().enumerate() {
            let v = e.vectors.column(i);
            assert!((&m * v - v * l).norm() < 1e-9 * norm);
        }
    }

    #[test]
    fn asymmetric_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_eig(&m), Err(Error::Input(_))));
    }

    #[test]
    fn rank_and_complement() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        assert_eq!(numerical_rank(&m, 1e-8, 10.0).unwrap().rank, 2);
        let c = DVector::from_vec(vec![1.0, 1.0, 0.0, 2.0]);
        let z = complement_basis(&c);
        assert_eq!(z.ncols(), 3);
        assert!((z.transpose() * &c).norm() < 1e-14);
        assert!(max_abs(&(z.transpose() * &z - DMatrix::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn ambiguous_rank() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-7, 5e-8]));
        assert!(numerical_rank(&d, 6e-8, 10.0).is_err());
    }

    #[test]
    fn inertia_counts() {
        let i = inertia(&[-1.0, -1e-9, 2e-9, 0.5, 3.0], 1e-6);
        assert_eq!((i.negative, i.zero, i.positive), (1, 2, 2));
        assert!(i.gap > 10.0);
    }
}
