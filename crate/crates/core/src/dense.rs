//! Small dense linear-algebra helpers on top of `faer`.

use faer::linalg::solvers::DenseSolveCore;
use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, Par, Side};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub fn from_rows(rows: &[Vec<f64>]) -> Mat<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    Mat::from_fn(n, m, |i, j| rows[i][j])
}

pub fn from_csr(a: &CsrMatrix) -> Mat<f64> {
    let mut m = Mat::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplets() {
        m[(i, j)] = v;
    }
    m
}

pub fn inverse(a: &Mat<f64>) -> Mat<f64> {
    a.partial_piv_lu().inverse()
}

/// Eigenvalues (ascending) and eigenvectors of a symmetric matrix.
pub fn sym_eigen(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let e = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let vals = (0..a.nrows()).map(|i| e.S()[i]).collect();
    Ok((vals, e.U().to_owned()))
}

/// Solve `a x = lambda b x` for symmetric `a` and SPD `b`; eigenvectors are
/// `b`-orthonormal.
pub fn generalized_sym_eigen(a: &Mat<f64>, b: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let llt = b.llt(Side::Lower).map_err(|e| Error::Factorization(format!("mass matrix: {e:?}")))?;
    let l = llt.L().to_owned();
    // c = L^{-1} a L^{-T}
    let mut c = a.clone();
    solve_lower_triangular_in_place(l.as_ref(), c.as_mut(), Par::Seq);
    let mut c = c.transpose().to_owned();
    solve_lower_triangular_in_place(l.as_ref(), c.as_mut(), Par::Seq);
    let c = Mat::from_fn(c.nrows(), c.ncols(), |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let (vals, mut y) = sym_eigen(&c)?;
    solve_upper_triangular_in_place(l.transpose(), y.as_mut(), Par::Seq);
    Ok((vals, y))
}

/// Orthonormal basis of the null space of `a` (columns), using the SVD with
/// a relative singular-value cutoff.
pub fn null_space(a: &Mat<f64>, rel_tol: f64) -> Result<Mat<f64>> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return Ok(Mat::identity(n, n));
    }
    let svd = a.svd().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = svd.S();
    let k = a.nrows().min(n);
    let smax = (0..k).map(|i| s[i]).fold(0.0, f64::max);
    let rank = (0..k).filter(|&i| s[i] > rel_tol * smax).count();
    let v = svd.V();
    Ok(Mat::from_fn(n, n - rank, |i, j| v[(i, rank + j)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generalized_eigen_two_by_two() {
        let a = from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]);
        let b = from_rows(&[vec![1.0, 0.0], vec![0.0, 0.5]]);
        let (vals, x) = generalized_sym_eigen(&a, &b).unwrap();
        assert!((vals[0] - 2.0).abs() < 1e-14);
        assert!((vals[1] - 6.0).abs() < 1e-14);
        let xbx = x.transpose() * &b * &x;
        assert!((xbx[(0, 0)] - 1.0).abs() < 1e-14 && xbx[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = from_rows(&[vec![1.0, 1.0, 0.0]]);
        let z = null_space(&a, 1e-12).unwrap();
        assert_eq!(z.ncols(), 2);
        let az = &a * &z;
        assert!((0..2).all(|j| az[(0, j)].abs() < 1e-14));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]);
        let p = &a * inverse(&a);
        assert!((p[(0, 0)] - 1.0).abs() < 1e-15 && p[(1, 0)].abs() < 1e-15);
    }
}
