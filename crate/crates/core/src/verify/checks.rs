//! Individual checks. Each builds what it needs from a mesh whose cells
//! already carry their polynomial degree.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CheckReport, Role};
use crate::assembly::{
    assemble_load, assemble_system, dg_error, form_against_basis, interior_jumps, AssembledSystem, AssemblyOptions, DgSpace, ExactField,
    Manufactured, Penalty,
};
use crate::dense::{from_csr, generalized_sym_eigen, null_space, sym_eigen};
use crate::eigsolve::{constraint_null_space, solve_eigs_with, solve_source, EigenOptions, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::Mesh;
use crate::polyspace::basis::{SpaceKind, VJet};
use crate::polyspace::hcurl_rect::{edge_bound_ratio, gram_violations, pi_projector, HcurlGroup, HcurlRectBasis};
use crate::polyspace::legendre::{legendre_phi, legendre_phi_deriv};
use crate::sparse::{dot, norm2};

/// What every row of one mesh/penalty combination shares.
#[derive(Clone, Debug)]
pub struct Case<'a> {
    pub label: String,
    pub mesh: &'a Mesh,
    pub penalty: Penalty,
}

impl<'a> Case<'a> {
    pub fn new(label: impl Into<String>, mesh: &'a Mesh, penalty: Penalty) -> Self {
        Self { label: label.into(), mesh, penalty }
    }

    fn p(&self) -> usize {
        self.mesh.min_degree()
    }

    fn row(&self, check: &str, observed: f64, threshold: f64, pass: bool, role: Role) -> CheckReport {
        CheckReport {
            check: check.into(),
            mesh: self.label.clone(),
            p: self.p(),
            eta1: self.penalty.eta1,
            eta2: self.penalty.eta2,
            observed,
            threshold,
            pass,
            role,
        }
    }

    /// Row that passes when `observed <= threshold`.
    fn at_most(&self, check: &str, observed: f64, threshold: f64) -> CheckReport {
        self.row(check, observed, threshold, observed <= threshold, Role::Check)
    }

    /// Control row that passes when `observed > threshold`.
    fn control_above(&self, check: &str, observed: f64, threshold: f64) -> CheckReport {
        self.row(check, observed, threshold, observed > threshold, Role::Control)
    }

    fn options(&self, with_norm: bool, with_constraint: bool) -> AssemblyOptions {
        AssemblyOptions { penalty: self.penalty, quad_space: SpaceKind::Tensor, with_norm, with_constraint }
    }

    fn system(&self, with_norm: bool, with_constraint: bool) -> Result<AssembledSystem> {
        assemble_system(self.mesh, &self.options(with_norm, with_constraint))
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn exact_jets<'a>(field: &'a dyn ExactField) -> impl Fn(usize, &[Vec3]) -> Vec<VJet> + Sync + 'a {
    move |_, pts: &[Vec3]| pts.iter().map(|x| field.jet(*x)).collect()
}

/// The manufactured field plus a constant: violates `w x n = 0`.
struct Shifted<'a>(&'a Manufactured);

impl ExactField for Shifted<'_> {
    fn jet(&self, x: Vec3) -> VJet {
        let mut j = self.0.jet(x);
        j.val[0] += 1.0;
        j
    }
}

fn require_square(case: &Case<'_>) -> Result<()> {
    let on_square = case.mesh.dim == 2
        && case.mesh.vertices.iter().all(|v| v[0].abs() <= 1.0 + 1e-12 && v[1].abs() <= 1.0 + 1e-12)
        && (case.mesh.measure() - 4.0).abs() < 1e-10;
    if on_square {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("manufactured solution needs the square (-1,1)^2, got {}", case.label)))
    }
}

/// `max_i |a_h(w, phi_i) - (f, phi_i)|` for the manufactured `w`, and the
/// same with `w` shifted off its boundary conditions as a control.
pub fn check_consistency(case: &Case<'_>) -> Result<Vec<CheckReport>> {
    require_square(case)?;
    let man = Manufactured::new();
    let q = man.degree();
    let space = DgSpace::new(case.mesh, SpaceKind::Tensor)?;
    let load = assemble_load(case.mesh, &space, &|x| man.load(x), q)?;
    let aw = form_against_basis(case.mesh, &space, &case.penalty, &exact_jets(&man), q)?;
    let residual: Vec<f64> = aw.iter().zip(&load).map(|(a, f)| a - f).collect();
    let shifted = Shifted(&man);
    let load_s = assemble_load(case.mesh, &space, &|x| { let mut f = man.load(x); f[0] += 1.0; f }, q)?;
    let aw_s = form_against_basis(case.mesh, &space, &case.penalty, &exact_jets(&shifted), q)?;
    let residual_s: Vec<f64> = aw_s.iter().zip(&load_s).map(|(a, f)| a - f).collect();
    Ok(vec![
        case.at_most("consistency", max_abs(&residual), 1e-8),
        case.control_above("consistency_bc_violation", max_abs(&residual_s), 1e-8),
    ])
}

/// Solve the source problem and re-evaluate `a_h(w_h, phi_i) - (f, phi_i)`
/// by quadrature; the control perturbs the load after the solve.
pub fn check_galerkin(case: &Case<'_>) -> Result<Vec<CheckReport>> {
    require_square(case)?;
    let man = Manufactured::new();
    let sys = case.system(false, false)?;
    let load = assemble_load(case.mesh, &sys.space, &|x| man.load(x), man.degree())?;
    let wh = solve_source(&sys, &load)?;
    let aw = form_against_basis(case.mesh, &sys.space, &case.penalty, &|c, pts| sys.space.eval(c, &wh, pts), 0)?;
    let scale = norm2(&load);
    let res: Vec<f64> = aw.iter().zip(&load).map(|(a, f)| a - f).collect();
    let mut perturbed = load.clone();
    perturbed[0] += 1e-6 * scale;
    let res_p: Vec<f64> = aw.iter().zip(&perturbed).map(|(a, f)| a - f).collect();
    Ok(vec![
        case.at_most("galerkin", norm2(&res) / scale, 1e-10),
        case.control_above("galerkin_perturbed_load", norm2(&res_p) / scale, 1e-10),
    ])
}

/// DG-norm error of the source-problem solution against the manufactured
/// field on the square `(-1,1)^2`.
pub fn manufactured_error(mesh: &Mesh, penalty: Penalty) -> Result<f64> {
    let case = Case::new("source", mesh, penalty);
    require_square(&case)?;
    let man = Manufactured::new();
    let sys = case.system(false, false)?;
    let load = assemble_load(mesh, &sys.space, &|x| man.load(x), man.degree())?;
    let wh = solve_source(&sys, &load)?;
    dg_error(mesh, &sys.space, &wh, &man, man.degree())
}

/// Symmetry defects of `A` and `M`, and `M = I` for the orthonormal basis.
pub fn check_matrices(case: &Case<'_>) -> Result<Vec<CheckReport>> {
    let sys = case.system(false, false)?;
    let sym = sys.a.symmetry_defect().max(sys.m.symmetry_defect());
    let eye = crate::sparse::CsrMatrix::identity(sys.n_v());
    let mass = sys.m.lin_comb(1.0, &eye, -1.0).max_abs();
    Ok(vec![case.at_most("symmetry", sym, 1e-12), case.at_most("mass_identity", mass, 1e-10)])
}

/// Increasing either penalty adds a positive semidefinite term: the smallest
/// eigenvalue of `A(2 eta) - A(eta)`, relative to its largest magnitude.
pub fn check_penalty_monotonicity(case: &Case<'_>) -> Result<Vec<CheckReport>> {
    let base = case.system(false, false)?;
    if base.n_v() > DENSE_LIMIT {
        return Err(Error::TooLarge { size: base.n_v(), limit: DENSE_LIMIT });
    }
    let mut rows = Vec::new();
    for (name, scale) in [("penalty_monotone_eta1", (2.0, 1.0)), ("penalty_monotone_eta2", (1.0, 2.0))] {
        let mut opts = case.options(false, false);
        opts.penalty = Penalty { eta1: case.penalty.eta1 * scale.0, eta2: case.penalty.eta2 * scale.1 };
        let bigger = assemble_system(case.mesh, &opts)?;
        let diff = bigger.a.lin_comb(1.0, &base.a, -1.0);
        let (vals, _) = sym_eigen(&from_csr(&diff))?;
        let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        rows.push(case.at_most(name, (-vals[0] / top).max(0.0), 1e-12));
    }
    Ok(rows)
}

/// Sampled `min v^T A v / ||v||_h^2` over `samples` seeded random vectors.
/// With `control` the row is an expected-fail control (weakened penalty).
/// At desk scale the exact minimum (generalized eigenvalue) is recorded too.
pub fn check_coercivity(case: &Case<'_>, samples: usize, seed: u64, control: bool) -> Result<(f64, Vec<CheckReport>)> {
    let sys = case.system(true, false)?;
    let norm = sys.norm.as_ref().expect("norm matrix requested");
    let mut r = rng(seed);
    let mut c0 = f64::INFINITY;
    for _ in 0..samples.max(1) {
        let v = random_vec(&mut r, sys.n_v());
        c0 = c0.min(sys.a.quad_form(&v, &v) / norm.quad_form(&v, &v));
    }
    let threshold = 1e-3;
    let mut rows = vec![if control {
        case.row("coercivity_weak_penalty", c0, threshold, c0 <= threshold, Role::Control)
    } else {
        case.row("coercivity_sampled", c0, threshold, c0 > threshold, Role::Check)
    }];
    if sys.n_v() <= DENSE_LIMIT / 2 {
        let (vals, _) = generalized_sym_eigen(&from_csr(&sys.a), &from_csr(norm))?;
        rows.push(case.row("coercivity_exact_min", vals[0], 0.0, vals[0] > 0.0, Role::Observation));
    }
    Ok((c0, rows))
}

/// `max ||v||_h / |v|_h` over seeded random members of `ker B`.
pub fn check_poincare(case: &Case<'_>, samples: usize, seed: u64) -> Result<(f64, Vec<CheckReport>)> {
    let sys = case.system(true, true)?;
    let z = constraint_null_space(&sys.b, sys.n_v())?;
    let norm = sys.norm.as_ref().expect("norm matrix requested");
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples.max(1) {
        let c = random_vec(&mut r, z.ncols());
        let v: Vec<f64> = (0..z.nrows()).map(|i| (0..z.ncols()).map(|j| z[(i, j)] * c[j]).sum()).collect();
        let full = norm.quad_form(&v, &v);
        let semi = full - sys.m.quad_form(&v, &v);
        worst = worst.max((full / semi).sqrt());
    }
    Ok((worst, vec![case.row("poincare_ratio", worst, f64::INFINITY, worst.is_finite(), Role::Check)]))
}

/// Interior-face jump terms of the projection of a global polynomial of the
/// mesh degree (zero up to rounding), and of a random DG vector (control).
pub fn check_jump_vanishing(case: &Case<'_>, seed: u64) -> Result<Vec<CheckReport>> {
    let p = case.p() as i32;
    let space = DgSpace::new(case.mesh, SpaceKind::Tensor)?;
    let field = move |x: Vec3| [x[0].powi(p) + x[1] - 0.5 * x[2], x[0] * x[1].powi(p - 1) + x[2], x[1] * x[2] - x[0].powi(p - 1)];
    let coef = space.project(case.mesh, &field, 0)?;
    let (j0, j1) = interior_jumps(case.mesh, &|c, pts| space.eval(c, &coef, pts), 0)?;
    let noise = random_vec(&mut rng(seed), space.n_dofs());
    let (n0, n1) = interior_jumps(case.mesh, &|c, pts| space.eval(c, &noise, pts), 0)?;
    Ok(vec![case.at_most("jump_vanishing", j0 + j1, 1e-11), case.control_above("jump_vanishing_random_field", n0 + n1, 1e-11)])
}

/// Summary of the eigen checks on one case.
pub fn check_eigen(case: &Case<'_>, k: usize) -> Result<Vec<CheckReport>> {
    let sys = case.system(false, true)?;
    let opts = EigenOptions { k, ..Default::default() };
    let (pairs, report) = solve_eigs_with(&sys.atilde, &sys.m, &sys.b, &opts)?;
    let (pairs_a, _) = solve_eigs_with(&sys.a, &sys.m, &sys.b, &EigenOptions { sigma: 1.0, ..opts.clone() })?;
    let mut rows = Vec::new();
    let converged = report.converged && pairs.len() == k;
    rows.push(case.row("eig_converged", pairs.len() as f64, k as f64, converged, Role::Check));
    let con = pairs.iter().map(|e| e.constraint_residual).fold(0.0, f64::max);
    rows.push(case.at_most("eig_constraint_residual", con, 1e-8));
    let alg = pairs.iter().map(|e| e.alg_residual).fold(0.0, f64::max);
    rows.push(case.at_most("eig_algebraic_residual", alg, 1e-8));
    let mut orth = 0.0f64;
    for (i, a) in pairs.iter().enumerate() {
        let ma = sys.m.matvec(&a.u);
        for (j, b) in pairs.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            orth = orth.max((dot(&ma, &b.u) - want).abs());
        }
    }
    rows.push(case.at_most("eig_m_orthonormality", orth, 1e-9));
    let shift = pairs
        .iter()
        .zip(&pairs_a)
        .map(|(t, a)| (a.lambda - t.lambda - 1.0).abs() / t.lambda.abs().max(1.0))
        .fold(if pairs_a.len() == pairs.len() { 0.0 } else { f64::INFINITY }, f64::max);
    rows.push(case.at_most("eig_shift_identity", shift, 1e-9));
    if sys.n_v() + sys.n_u() <= DENSE_LIMIT {
        let dense = oracle_nearest(&sys, opts.sigma, k)?;
        let rel = pairs.iter().zip(&dense).map(|(e, d)| (e.lambda - d).abs() / d.abs()).fold(0.0, f64::max);
        rows.push(case.at_most("eig_dense_oracle", rel, 1e-9));
    }
    if sys.n_u() > 0 && sys.n_u() <= 2000 {
        let bt = from_csr(&sys.b).transpose().to_owned();
        let s = singular_values(&bt)?;
        let ratio = s.last().copied().unwrap_or(0.0) / s[0];
        rows.push(case.row("constraint_full_rank", ratio, 1e-12, ratio > 1e-12, Role::Check));
    }
    Ok(rows)
}

fn singular_values(a: &Mat<f64>) -> Result<Vec<f64>> {
    let svd = a.svd().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let n = a.nrows().min(a.ncols());
    Ok((0..n).map(|i| svd.S()[i]).collect())
}

/// Dense eigenvalues of the constrained pencil nearest `sigma`, ascending.
fn oracle_nearest(sys: &AssembledSystem, sigma: f64, k: usize) -> Result<Vec<f64>> {
    let z = if sys.n_u() == 0 { Mat::identity(sys.n_v(), sys.n_v()) } else { null_space(&from_csr(&sys.b), 1e-12)? };
    let kz = z.transpose() * from_csr(&sys.atilde) * &z;
    let mz = z.transpose() * from_csr(&sys.m) * &z;
    let (mut vals, _) = generalized_sym_eigen(&kz, &mz)?;
    vals.sort_by(|a, b| (a - sigma).abs().total_cmp(&(b - sigma).abs()));
    vals.truncate(k);
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn basis_row(check: &str, p: usize, observed: f64, threshold: f64, pass: bool, role: Role) -> CheckReport {
    CheckReport { check: check.into(), mesh: "reference_square".into(), p, eta1: 0.0, eta2: 0.0, observed, threshold, pass, role }
}

/// Counts and Gram orthogonality of the rectangular H(curl) listing. Pairs
/// inside the four lowest-order edge functions are not covered by the
/// orthogonality claim; their entries are recorded as observations.
pub fn check_basis_orthogonality(p: usize) -> Vec<CheckReport> {
    let basis = HcurlRectBasis::new(p);
    let mut rows = vec![basis_row(
        "basis_count",
        p,
        basis.len() as f64,
        HcurlRectBasis::expected_len(p) as f64,
        basis.len() == HcurlRectBasis::expected_len(p),
        Role::Check,
    )];
    let lowest = |a: usize| basis.functions()[a].0 == HcurlGroup::EdgeLowest;
    for (name, gram) in [("basis_curl_gram", basis.curl_gram()), ("basis_trace_gram", basis.trace_gram())] {
        let (_, bad) = gram_violations(&gram, 1e-12);
        let scale = gram.iter().enumerate().map(|(i, r)| r[i].abs()).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for (a, row) in gram.iter().enumerate() {
            for (b, v) in row.iter().enumerate().skip(a + 1) {
                if !(lowest(a) && lowest(b)) {
                    worst = worst.max(v.abs() / scale);
                }
            }
        }
        rows.push(basis_row(name, p, worst, 1e-12, worst <= 1e-12, Role::Check));
        for (a, b, v) in bad.into_iter().filter(|(a, b, _)| lowest(*a) && lowest(*b)) {
            let check = format!("{name}_pair_{}_{}", a, b);
            rows.push(basis_row(&check, p, v.abs() / scale, 1e-12, false, Role::Observation));
        }
    }
    rows
}

/// Edge moments of `Pi` for gradients of random members of
/// `Q^{1,p} + Q^{p,1}`: Gauss quadrature against the exact potential
/// differences along each edge.
pub fn check_projector(p: usize, samples: usize, seed: u64) -> CheckReport {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples.max(1) {
        let mut terms = Vec::new();
        for i in 0..=p {
            for j in 0..=p {
                if i <= 1 || j <= 1 {
                    terms.push((i, j, r.gen_range(-1.0..1.0)));
                }
            }
        }
        let g = |x1: f64, x2: f64| terms.iter().map(|(i, j, c)| c * legendre_phi(*i, x1) * legendre_phi(*j, x2)).sum::<f64>();
        let grad = |x1: f64, x2: f64| {
            terms.iter().fold([0.0, 0.0], |acc, (i, j, c)| {
                [
                    acc[0] + c * legendre_phi_deriv(*i, x1) * legendre_phi(*j, x2),
                    acc[1] + c * legendre_phi(*i, x1) * legendre_phi_deriv(*j, x2),
                ]
            })
        };
        let pi = pi_projector(grad, p);
        let exact = [
            0.5 * (g(1.0, -1.0) - g(-1.0, -1.0)),
            0.5 * (g(1.0, 1.0) - g(-1.0, 1.0)),
            0.5 * (g(-1.0, 1.0) - g(-1.0, -1.0)),
            0.5 * (g(1.0, 1.0) - g(1.0, -1.0)),
        ];
        for (a, b) in [pi.bottom, pi.top, pi.left, pi.right].iter().zip(exact) {
            worst = worst.max((a - b).abs());
        }
    }
    basis_row("projector_edge_moments", p, worst, 1e-12, worst <= 1e-12, Role::Check)
}

/// Largest sampled ratio of the weighted edge-function integral to its
/// coefficient sum at degree `p`.
pub fn edge_bound_constant(p: usize, samples: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples.max(1) {
        let c: Vec<[f64; 2]> = (2..=p).map(|_| [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)]).collect();
        worst = worst.max(edge_bound_ratio(p, &c));
    }
    worst
}

/// The edge-function bound constant over `p = 2..=p_max`; passes when the
/// largest constant is within a factor 2 of the one at `p = 2`.
pub fn check_edge_bound(p_max: usize, samples: usize, seed: u64) -> Vec<CheckReport> {
    let consts: Vec<f64> = (2..=p_max).map(|p| edge_bound_constant(p, samples, seed + p as u64)).collect();
    let mut rows: Vec<CheckReport> =
        consts.iter().enumerate().map(|(i, c)| basis_row("edge_bound_constant", i + 2, *c, f64::INFINITY, c.is_finite(), Role::Observation)).collect();
    let growth = consts.iter().fold(0.0f64, |m, c| m.max(*c)) / consts[0];
    rows.push(basis_row("edge_bound_growth", p_max, growth, 2.0, growth <= 2.0, Role::Check));
    rows
}

/// Ratio `max / min` of positive constants, as a stability row.
pub fn stability_row(check: &str, mesh: &str, p: usize, penalty: Penalty, values: &[f64], threshold: f64) -> CheckReport {
    let lo = values.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let hi = values.iter().fold(0.0f64, |m, v| m.max(*v));
    let ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    CheckReport {
        check: check.into(),
        mesh: mesh.into(),
        p,
        eta1: penalty.eta1,
        eta2: penalty.eta2,
        observed: ratio,
        threshold,
        pass: ratio <= threshold,
        role: Role::Check,
    }
}
