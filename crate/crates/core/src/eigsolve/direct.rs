//! Sparse direct solves for the source problems.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LltError;
use faer::sparse::SparseColMat;
use faer::{Mat, Side};

use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::sparse::{norm2, CsrMatrix};

/// A factorized sparse matrix.
pub enum Factor {
    Cholesky(faer::sparse::linalg::solvers::Llt<usize, f64>),
    Lu(faer::sparse::linalg::solvers::Lu<usize, f64>),
}

impl Factor {
    /// Sparse Cholesky; a breakdown reports the failing pivot.
    pub fn cholesky(a: &CsrMatrix) -> Result<Self> {
        let fa: SparseColMat<usize, f64> = a.to_faer();
        match fa.sp_cholesky(Side::Lower) {
            Ok(l) => Ok(Factor::Cholesky(l)),
            Err(LltError::Numeric(e)) => Err(Error::Factorization(format!("matrix not positive definite ({e:?})"))),
            Err(e) => Err(Error::Factorization(format!("{e:?}"))),
        }
    }

    pub fn lu(a: &CsrMatrix) -> Result<Self> {
        let fa: SparseColMat<usize, f64> = a.to_faer();
        fa.sp_lu().map(Factor::Lu).map_err(|e| Error::Factorization(format!("{e:?}")))
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        match self {
            Factor::Cholesky(l) => l.solve_in_place(x.as_mut()),
            Factor::Lu(l) => l.solve_in_place(x.as_mut()),
        }
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }
}

/// `||a x - b|| / ||b||` (or `||a x||` when `b = 0`).
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let r: Vec<f64> = a.matvec(x).iter().zip(b).map(|(ax, bi)| ax - bi).collect();
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / nb
    }
}

fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Factorization("solution is not finite (singular matrix)".into()))
    }
}

/// Solve `A w = load` for the unconstrained source problem. Cholesky is
/// tried first and LU takes over when `A` is indefinite.
pub fn solve_source(system: &AssembledSystem, load: &[f64]) -> Result<Vec<f64>> {
    let f = match Factor::cholesky(&system.a) {
        Ok(f) => f,
        Err(e) => {
            log::info!("{e}; the DG matrix is not positive definite at this penalty, using LU");
            Factor::lu(&system.a)?
        }
    };
    let x = f.solve(load);
    check_finite(&x)?;
    Ok(x)
}

/// Solve `[atilde B^T; B 0] [u; s] = [load; 0]`, returning `(u, s)`.
pub fn solve_constrained_source(system: &AssembledSystem, load: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = CsrMatrix::saddle(&system.atilde, &system.b, None);
    let f = Factor::lu(&k)?;
    let mut rhs = load.to_vec();
    rhs.resize(k.nrows(), 0.0);
    let x = f.solve(&rhs);
    check_finite(&x)?;
    let n = system.n_v();
    Ok((x[..n].to_vec(), x[n..].to_vec()))
}
