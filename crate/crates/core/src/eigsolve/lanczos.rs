//! Shift-invert Lanczos for the constrained generalized eigenproblem
//!
//! ```text
//! K u + B^T s = lambda M u,   B u = 0
//! ```
//!
//! The operator `T v = x`, where `[K - sigma M, B^T; B, 0] [x; y] = [M v; 0]`,
//! is self-adjoint in the `M` inner product on `ker B`, and its eigenvalues
//! are `theta = 1 / (lambda - sigma)`. Infinite eigenvalues of the block
//! pencil map to `theta = 0` and never surface. Lanczos runs with full
//! reorthogonalization and thick restarts.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::AssembledSystem;
use crate::dense::sym_eigen;
use crate::eigsolve::direct::Factor;
use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix};

#[derive(Clone, Debug)]
pub struct EigenOptions {
    pub k: usize,
    /// Shift `sigma`; eigenvalues nearest to it are returned.
    pub sigma: f64,
    /// Relative Ritz residual tolerance.
    pub tol: f64,
    pub max_restarts: usize,
    /// Krylov dimension; `None` picks `max(2k + 10, 24)`.
    pub krylov_dim: Option<usize>,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { k: 5, sigma: 0.0, tol: 1e-12, max_restarts: 50, krylov_dim: None, seed: 17 }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: f64,
    /// `M`-normalized eigenvector.
    pub u: Vec<f64>,
    pub multiplier: Vec<f64>,
    /// `||K u + B^T s - lambda M u|| / ||lambda M u||`
    pub alg_residual: f64,
    /// `||B u|| / ||u||_M`
    pub constraint_residual: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    /// Operator applications.
    pub iterations: usize,
    pub restarts: usize,
    pub shift: f64,
    /// Shift perturbations after a failed factorization.
    pub shift_retries: usize,
    pub factor_dim: usize,
    pub factor_nnz: usize,
    pub discarded: usize,
    /// Pairs added by the deflated passes.
    pub deflations: usize,
    pub converged: bool,
}

/// Modes with a larger constraint residual are discarded as spurious.
pub const CONSTRAINT_CUTOFF: f64 = 1e-6;
/// Modes with a larger eigenvalue are discarded as infinite.
pub const LAMBDA_CUTOFF: f64 = 1e12;
/// Upper bound on deflated restarts after the first run.
pub const DEFLATION_PASSES: usize = 4;

struct ShiftInvert<'a> {
    m: &'a CsrMatrix,
    block: CsrMatrix,
    factor: Factor,
    /// The constraint rows are stored as `scale * B`.
    scale: f64,
    n: usize,
}

impl ShiftInvert<'_> {
    /// Block solve with one step of iterative refinement.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.factor.solve(rhs);
        let res: Vec<f64> = rhs.iter().zip(self.block.matvec(&x)).map(|(r, a)| r - a).collect();
        for (xi, d) in x.iter_mut().zip(self.factor.solve(&res)) {
            *xi += d;
        }
        x
    }

    fn apply(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut rhs = self.m.matvec(v);
        rhs.resize(self.block.nrows(), 0.0);
        let x = self.solve(&rhs);
        (x[..self.n].to_vec(), x[self.n..].iter().map(|y| y * self.scale).collect())
    }
}

fn factorize<'a>(stiff: &CsrMatrix, m: &'a CsrMatrix, b: &CsrMatrix, sigma: f64, seed: u64) -> Result<(ShiftInvert<'a>, usize)> {
    let shifted = if sigma == 0.0 { stiff.clone() } else { stiff.lin_comb(1.0, m, -sigma) };
    // Balance the constraint rows against the stiffness block; the penalty
    // entries grow like h^-3 while B entries shrink like h.
    let bmax = b.max_abs();
    let scale = if bmax > 0.0 { (shifted.max_abs() / bmax).log2().round().exp2() } else { 1.0 };
    let scaled_b = b.scaled(scale);
    let block = CsrMatrix::saddle(&shifted, &scaled_b, None);
    let factor = Factor::lu(&block)?;
    let nnz = block.nnz();
    let op = ShiftInvert { m, block, factor, scale, n: m.nrows() };
    // probe for numerical singularity
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let r: Vec<f64> = (0..op.block.nrows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x = op.solve(&r);
    let res: Vec<f64> = op.block.matvec(&x).iter().zip(&r).map(|(a, b)| a - b).collect();
    if !x.iter().all(|v| v.is_finite()) || norm2(&res) > 1e-6 * norm2(&r) {
        return Err(Error::Factorization(format!("shifted block matrix is singular at sigma = {sigma}")));
    }
    Ok((op, nnz))
}

fn combine(vs: &[Vec<f64>], s: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; vs[0].len()];
    for (j, v) in vs.iter().enumerate() {
        let c = s(j);
        if c != 0.0 {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
    }
    out
}

/// Eigenpairs of the constrained problem with `atilde` as stiffness.
pub fn solve_eigs(system: &AssembledSystem, opts: &EigenOptions) -> Result<(Vec<EigenPair>, SolveReport)> {
    solve_eigs_with(&system.atilde, &system.m, &system.b, opts)
}

/// A converged Ritz triple of the shift-invert operator: `theta`, the
/// `M`-normalized vector and the multiplier part of `T u`.
struct Ritz {
    theta: f64,
    u: Vec<f64>,
    y: Vec<f64>,
}

/// Subtract the `M`-projection onto `locked` from `w`.
fn deflate(w: &mut [f64], locked: &[Ritz], m_locked: &[Vec<f64>]) {
    for (l, ml) in locked.iter().zip(m_locked) {
        let c = dot(ml, w);
        for (wk, uk) in w.iter_mut().zip(&l.u) {
            *wk -= c * uk;
        }
    }
}

/// Thick-restart Lanczos on the `M`-complement of `locked`, returning up to
/// `want` Ritz triples of largest `|theta|`.
#[allow(clippy::too_many_arguments)]
fn lanczos(
    op: &ShiftInvert<'_>,
    start: Vec<f64>,
    locked: &[Ritz],
    want: usize,
    mdim: usize,
    opts: &EigenOptions,
    report: &mut SolveReport,
) -> Result<(Vec<Ritz>, bool)> {
    let m = op.m;
    let m_locked: Vec<Vec<f64>> = locked.iter().map(|l| m.matvec(&l.u)).collect();
    let keep = (want + (mdim - want) / 2).min(mdim - 1).max(want.min(mdim - 1));
    let (mut f, _) = op.apply(&start);
    report.iterations += 1;
    deflate(&mut f, locked, &m_locked);
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(mdim + 1);
    let mut mvs: Vec<Vec<f64>> = Vec::with_capacity(mdim + 1);
    let mut ys: Vec<Vec<f64>> = Vec::with_capacity(mdim + 1);
    let mut h = Mat::<f64>::zeros(mdim, mdim);
    {
        let mf = m.matvec(&f);
        let nrm = dot(&mf, &f).sqrt();
        if nrm.is_nan() || nrm <= 0.0 {
            return Ok((Vec::new(), true));
        }
        vs.push(f.iter().map(|x| x / nrm).collect());
        mvs.push(mf.iter().map(|x| x / nrm).collect());
    }

    let mut ritz: Vec<(f64, Vec<f64>)>;
    let mut j = 0;
    let converged = loop {
        let mut beta_last = 0.0;
        let mut breakdown = false;
        while j < mdim {
            let (mut w, y) = op.apply(&vs[j]);
            report.iterations += 1;
            ys.truncate(j);
            ys.push(y);
            let mut hcol = vec![0.0; j + 1];
            for _ in 0..2 {
                deflate(&mut w, locked, &m_locked);
                for i in 0..=j {
                    let c = dot(&mvs[i], &w);
                    hcol[i] += c;
                    for (wk, vk) in w.iter_mut().zip(&vs[i]) {
                        *wk -= c * vk;
                    }
                }
            }
            for (i, &c) in hcol.iter().enumerate() {
                h[(i, j)] = c;
                h[(j, i)] = c;
            }
            let mw = m.matvec(&w);
            let beta = dot(&mw, &w).max(0.0).sqrt();
            let scale = hcol.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(h[(0, 0)].abs());
            beta_last = beta;
            j += 1;
            if beta <= 1e-13 * scale {
                breakdown = true;
                break;
            }
            vs.truncate(j);
            mvs.truncate(j);
            vs.push(w.iter().map(|x| x / beta).collect());
            mvs.push(mw.iter().map(|x| x / beta).collect());
        }
        let msize = j;
        let hm = Mat::from_fn(msize, msize, |a, b| h[(a, b)]);
        let (vals, vecs) = sym_eigen(&hm)?;
        let mut order: Vec<usize> = (0..msize).collect();
        order.sort_by(|&a, &b| vals[b].abs().total_cmp(&vals[a].abs()));
        ritz = order.iter().map(|&i| (vals[i], (0..msize).map(|r| vecs[(r, i)]).collect())).collect();
        let converged =
            breakdown || ritz.iter().take(want).all(|(theta, s)| beta_last * s[msize - 1].abs() <= opts.tol * theta.abs());
        if converged || report.restarts >= opts.max_restarts {
            break converged;
        }
        // thick restart: keep the best Ritz vectors plus the residual direction
        report.restarts += 1;
        let kept: Vec<&(f64, Vec<f64>)> = ritz.iter().take(keep).collect();
        let new_v: Vec<Vec<f64>> = kept.iter().map(|(_, s)| combine(&vs[..msize], |r| s[r])).collect();
        let new_mv: Vec<Vec<f64>> = kept.iter().map(|(_, s)| combine(&mvs[..msize], |r| s[r])).collect();
        let new_y: Vec<Vec<f64>> = kept.iter().map(|(_, s)| combine(&ys[..msize], |r| s[r])).collect();
        let resid_v = vs.pop().unwrap();
        let resid_mv = mvs.pop().unwrap();
        vs = new_v;
        mvs = new_mv;
        ys = new_y;
        h = Mat::zeros(mdim, mdim);
        for (i, (theta, _)) in kept.iter().enumerate() {
            h[(i, i)] = *theta;
        }
        vs.push(resid_v);
        mvs.push(resid_mv);
        j = keep;
    };
    let msize = j;
    let out = ritz
        .iter()
        .take(want)
        .map(|(theta, s)| Ritz { theta: *theta, u: combine(&vs[..msize], |r| s[r]), y: combine(&ys[..msize], |r| s[r]) })
        .collect();
    Ok((out, converged))
}

/// The `k` eigenpairs nearest `opts.sigma` of `K u + B^T s = lambda M u,
/// B u = 0`, sorted by eigenvalue. Unconverged runs return what they have
/// with `converged = false`.
///
/// Single-vector Lanczos can miss copies of a multiple eigenvalue, so each
/// run is followed by deflated runs from fresh start vectors in the
/// `M`-complement of the accepted vectors; the result is final once such a
/// run finds nothing nearer the shift than the current `k`-th pair.
pub fn solve_eigs_with(stiff: &CsrMatrix, m: &CsrMatrix, b: &CsrMatrix, opts: &EigenOptions) -> Result<(Vec<EigenPair>, SolveReport)> {
    let n = m.nrows();
    let nu = b.nrows();
    if opts.k == 0 {
        return Err(Error::InvalidArgument("eigenvalue count must be positive".into()));
    }
    let zdim = n.saturating_sub(nu);
    if opts.k > zdim {
        return Err(Error::InvalidArgument(format!("asked for {} eigenpairs of a {zdim}-dimensional problem", opts.k)));
    }
    let mut report = SolveReport { shift: opts.sigma, ..Default::default() };
    let (op, nnz) = loop {
        match factorize(stiff, m, b, report.shift, opts.seed) {
            Ok(r) => break r,
            Err(e) if report.shift_retries >= 3 => return Err(e),
            Err(e) => {
                log::warn!("{e}; perturbing the shift");
                report.shift_retries += 1;
                report.shift += 1e-3 * report.shift.abs().max(1.0) * report.shift_retries as f64;
            }
        }
    };
    report.factor_dim = n + nu;
    report.factor_nnz = nnz;
    let sigma = report.shift;
    let mdim = opts.krylov_dim.unwrap_or((2 * opts.k + 10).max(24)).min(zdim).max(opts.k);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut random = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let (mut found, mut converged) = lanczos(&op, random(n), &[], opts.k, mdim, opts, &mut report)?;
    found.retain(|r| r.theta != 0.0);
    for _ in 0..DEFLATION_PASSES {
        if found.len() >= zdim {
            break;
        }
        let extra_dim = mdim.min(zdim - found.len());
        let (extra, ok) = lanczos(&op, random(n), &found, opts.k.min(extra_dim), extra_dim, opts, &mut report)?;
        converged &= ok;
        let kth = found.iter().map(|r| r.theta.abs()).fold(f64::INFINITY, f64::min);
        let better: Vec<Ritz> = extra.into_iter().filter(|r| r.theta != 0.0 && (found.len() < opts.k || r.theta.abs() > kth * (1.0 + 1e-10))).collect();
        if better.is_empty() {
            break;
        }
        report.deflations += better.len();
        found.extend(better);
        found.sort_by(|a, b| b.theta.abs().total_cmp(&a.theta.abs()));
        found.truncate(opts.k);
    }
    report.converged = converged;

    let mut pairs = Vec::new();
    for r in &found {
        let lambda = sigma + 1.0 / r.theta;
        let multiplier: Vec<f64> = r.y.iter().map(|x| x / r.theta).collect();
        let mu = m.matvec(&r.u);
        let unorm = dot(&mu, &r.u).sqrt();
        let mut res = stiff.matvec(&r.u);
        for (ri, bt) in res.iter_mut().zip(b.matvec_t(&multiplier)) {
            *ri += bt;
        }
        for (ri, mi) in res.iter_mut().zip(&mu) {
            *ri -= lambda * mi;
        }
        let alg_residual = norm2(&res) / (lambda.abs() * norm2(&mu));
        let constraint_residual = if nu == 0 { 0.0 } else { norm2(&b.matvec(&r.u)) / unorm };
        if constraint_residual > CONSTRAINT_CUTOFF || lambda.abs() > LAMBDA_CUTOFF {
            report.discarded += 1;
            continue;
        }
        pairs.push(EigenPair { lambda, u: r.u.clone(), multiplier, alg_residual, constraint_residual });
    }
    pairs.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok((pairs, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `K = diag(d)`, `M = I`, one constraint `u_0 = 0`.
    fn diagonal(d: &[f64]) -> (CsrMatrix, CsrMatrix, CsrMatrix) {
        let n = d.len();
        let k = CsrMatrix::from_triplets(n, n, d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect());
        let b = CsrMatrix::from_triplets(1, n, vec![(0, 0, 1.0)]);
        (k, CsrMatrix::identity(n), b)
    }

    #[test]
    fn finds_every_copy_of_a_multiple_eigenvalue() {
        let mut d = vec![0.5, 2.0, 2.0, 2.0, 3.0];
        d.extend((0..60).map(|i| 4.0 + i as f64));
        let (k, m, b) = diagonal(&d);
        for seed in 0..5 {
            let opts = EigenOptions { k: 4, seed, ..Default::default() };
            let (pairs, report) = solve_eigs_with(&k, &m, &b, &opts).unwrap();
            let got: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
            assert_eq!(got.len(), 4, "{got:?}");
            for (g, w) in got.iter().zip([2.0, 2.0, 2.0, 3.0]) {
                assert!((g - w).abs() < 1e-10, "seed {seed}: {got:?}");
            }
            assert!(report.converged);
            assert!(pairs.iter().all(|p| p.constraint_residual < 1e-12 && p.alg_residual < 1e-9));
        }
    }

    #[test]
    fn shift_selects_nearest_pairs() {
        let d: Vec<f64> = (0..40).map(|i| 1.0 + i as f64).collect();
        let (k, m, b) = diagonal(&d);
        let opts = EigenOptions { k: 3, sigma: 10.2, ..Default::default() };
        let (pairs, _) = solve_eigs_with(&k, &m, &b, &opts).unwrap();
        let got: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
        for (g, w) in got.iter().zip([9.0, 10.0, 11.0]) {
            assert!((g - w).abs() < 1e-10, "{got:?}");
        }
    }

    #[test]
    fn rejects_oversized_requests() {
        let (k, m, b) = diagonal(&[1.0, 2.0, 3.0]);
        let opts = EigenOptions { k: 3, ..Default::default() };
        assert!(solve_eigs_with(&k, &m, &b, &opts).is_err());
    }
}
