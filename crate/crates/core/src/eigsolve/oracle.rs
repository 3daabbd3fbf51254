//! Dense brute-force eigenvalues of the constrained problem, for checking
//! the iterative solver on small systems.

use faer::Mat;

use crate::assembly::AssembledSystem;
use crate::dense::{from_csr as dense, generalized_sym_eigen, null_space};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Largest `n_V + n_U` accepted by the dense path.
pub const DENSE_LIMIT: usize = 4000;

/// Orthonormal (Euclidean) basis of `ker B` as columns.
pub fn constraint_null_space(b: &CsrMatrix, n_v: usize) -> Result<Mat<f64>> {
    if n_v + b.nrows() > DENSE_LIMIT {
        return Err(Error::TooLarge { size: n_v + b.nrows(), limit: DENSE_LIMIT });
    }
    if b.nrows() == 0 {
        return Ok(Mat::identity(n_v, n_v));
    }
    null_space(&dense(b), 1e-12)
}

/// The `k` smallest eigenvalues of `(Z^T K Z) y = lambda (Z^T M Z) y`.
pub fn dense_oracle_eigs_with(stiff: &CsrMatrix, m: &CsrMatrix, b: &CsrMatrix, k: usize) -> Result<Vec<f64>> {
    let z = constraint_null_space(b, m.nrows())?;
    let kz = z.transpose() * dense(stiff) * &z;
    let mz = z.transpose() * dense(m) * &z;
    let (vals, _) = generalized_sym_eigen(&kz, &mz)?;
    Ok(vals.into_iter().take(k).collect())
}

pub fn dense_oracle_eigs(system: &AssembledSystem, k: usize) -> Result<Vec<f64>> {
    dense_oracle_eigs_with(&system.atilde, &system.m, &system.b, k)
}

/// Projected matrices `Z^T K Z` and `Z^T M Z`, with `Z`.
pub fn projected(system: &AssembledSystem) -> Result<(Mat<f64>, Mat<f64>, Mat<f64>)> {
    let z = constraint_null_space(&system.b, system.n_v())?;
    let kz = z.transpose() * dense(&system.atilde) * &z;
    let mz = z.transpose() * dense(&system.m) * &z;
    Ok((kz, mz, z))
}
