//! h- and p-sweeps of the eigenvalue problem.

use std::str::FromStr;
use std::time::Instant;

use quadcurl::assembly::{assemble_system, AssemblyOptions, Penalty};
use quadcurl::eigsolve::{h_rates, p_rate, solve_eigs, EigenOptions};
use quadcurl::mesh::{build_hanging_mesh, build_structured_mesh, CellKind, Domain, Mesh};
use quadcurl::{Error, Result};
use rayon::prelude::*;

use crate::csv::{StudyRow, SweepParam};
use crate::reference::{LSHAPE_HANGING, LSHAPE_REFERENCE, SQUARE_HANGING, SQUARE_REFERENCE};

/// Domain names accepted on the command line. `square` is the unit square
/// used for all square experiments; `centered-square` is `(-1,1)^2`.
pub fn parse_domain(s: &str) -> Result<Domain> {
    match s {
        "square" => Ok(Domain::UnitSquare),
        "centered-square" => Ok(Domain::Square),
        "lshape" => Ok(Domain::LShape),
        "cube" => Ok(Domain::Cube),
        _ => Err(Error::InvalidArgument(format!("unknown domain '{s}' (expected square, centered-square, lshape or cube)"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshKind {
    Tri,
    Quad,
    Tet,
    /// Triangles with a locally refined patch around the origin.
    Hanging,
}

impl FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tri" => Ok(MeshKind::Tri),
            "quad" => Ok(MeshKind::Quad),
            "tet" => Ok(MeshKind::Tet),
            "hanging" => Ok(MeshKind::Hanging),
            _ => Err(Error::InvalidArgument(format!("unknown mesh '{s}' (expected tri, quad, tet or hanging)"))),
        }
    }
}

impl MeshKind {
    pub fn cell_kind(self) -> CellKind {
        match self {
            MeshKind::Tri | MeshKind::Hanging => CellKind::Triangle,
            MeshKind::Quad => CellKind::Quadrilateral,
            MeshKind::Tet => CellKind::Tetrahedron,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    /// Fixed degree, one point per entry of `divisions`.
    H { p: usize, divisions: Vec<usize> },
    /// Fixed mesh, one point per degree.
    P { divisions: usize, degrees: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub domain: Domain,
    pub mesh: MeshKind,
    pub sweep: Sweep,
    pub penalty: Penalty,
    /// Number of eigenvalues.
    pub k: usize,
    /// Shift; eigenvalues nearest to it are computed.
    pub target: f64,
    /// Reference eigenvalues for the error column.
    pub reference: Option<Vec<f64>>,
    /// Points whose DG space exceeds this many unknowns are skipped.
    pub dof_budget: Option<usize>,
    /// Target DOF count for hanging-node meshes.
    pub hanging_target: usize,
    pub seed: u64,
    /// Sweep points solved concurrently.
    pub jobs: usize,
}

impl StudyConfig {
    /// Defaults for `domain`: the per-dimension penalty, 5 eigenvalues, the
    /// published reference values where known.
    pub fn new(domain: Domain, mesh: MeshKind, sweep: Sweep) -> Self {
        let reference = match domain {
            Domain::UnitSquare => Some(SQUARE_REFERENCE.to_vec()),
            Domain::Square => Some(SQUARE_REFERENCE.iter().map(|v| v / 16.0).collect()),
            Domain::LShape => Some(LSHAPE_REFERENCE.to_vec()),
            Domain::Cube => None,
        };
        let hanging_target = if domain == Domain::LShape { LSHAPE_HANGING.0 } else { SQUARE_HANGING.0 };
        Self {
            domain,
            mesh,
            sweep,
            penalty: Penalty::default_for(domain.dim()),
            k: 5,
            target: 0.0,
            reference,
            dof_budget: None,
            hanging_target,
            seed: 17,
            jobs: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mesh.cell_kind().dim() != self.domain.dim() {
            return Err(Error::InvalidArgument(format!("{:?} mesh on a {}-dimensional domain", self.mesh, self.domain.dim())));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("at least one eigenvalue is required".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidArgument("jobs must be positive".into()));
        }
        let degrees = match &self.sweep {
            Sweep::H { p, .. } => vec![*p],
            Sweep::P { degrees, .. } => degrees.clone(),
        };
        if let Some(p) = degrees.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidArgument(format!("degree {p} is below 2")));
        }
        Ok(())
    }

    fn points(&self) -> Vec<(usize, usize)> {
        match &self.sweep {
            Sweep::H { p, divisions } => divisions.iter().map(|&d| (d, *p)).collect(),
            Sweep::P { divisions, degrees } => degrees.iter().map(|&p| (*divisions, p)).collect(),
        }
    }

    fn param(&self) -> SweepParam {
        match self.sweep {
            Sweep::H { .. } => SweepParam::H,
            Sweep::P { .. } => SweepParam::P,
        }
    }
}

/// Number of DG unknowns of a mesh, counted without assembling.
pub fn dg_dofs(mesh: &Mesh) -> usize {
    mesh.cells
        .iter()
        .map(|c| {
            let p = c.degree;
            let scalar = match c.kind {
                CellKind::Triangle => (p + 1) * (p + 2) / 2,
                CellKind::Quadrilateral => (p + 1) * (p + 1),
                CellKind::Tetrahedron => (p + 1) * (p + 2) * (p + 3) / 6,
            };
            scalar * c.kind.dim()
        })
        .sum()
}

/// Triangle mesh with `divisions` cells per side, refined near the origin
/// (the reentrant corner of the L-shape, a corner of the unit square) until
/// the DG space has as close to `target` unknowns as the refinement allows.
/// Cells are marked in order of centroid distance from the origin.
pub fn hanging_demo_mesh(domain: Domain, divisions: usize, p: usize, target: usize) -> Result<Mesh> {
    let base = build_structured_mesh(domain, CellKind::Triangle, divisions, p)?;
    let mut order: Vec<(f64, usize)> = (0..base.n_cells())
        .map(|c| {
            let pts = base.cell_points(c);
            let x = pts.iter().map(|v| v[0]).sum::<f64>() / 3.0;
            let y = pts.iter().map(|v| v[1]).sum::<f64>() / 3.0;
            (x.hypot(y), c)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let build = |m: usize| -> Result<Mesh> {
        let marked: Vec<usize> = order[..m].iter().map(|x| x.1).collect();
        Ok(build_hanging_mesh(&base, &marked)?.mesh)
    };
    if dg_dofs(&base) >= target {
        return Ok(base);
    }
    // smallest marking count reaching the target
    let (mut lo, mut hi) = (0, order.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if dg_dofs(&build(mid)?) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let above = build(lo)?;
    if lo == 0 {
        return Ok(above);
    }
    let below = build(lo - 1)?;
    if target - dg_dofs(&below) < dg_dofs(&above).saturating_sub(target) {
        Ok(below)
    } else {
        Ok(above)
    }
}

/// Mesh of one sweep point.
pub fn study_mesh(cfg: &StudyConfig, divisions: usize, p: usize) -> Result<Mesh> {
    match cfg.mesh {
        MeshKind::Hanging => hanging_demo_mesh(cfg.domain, divisions, p, cfg.hanging_target),
        kind => build_structured_mesh(cfg.domain, kind.cell_kind(), divisions, p),
    }
}

/// Outcome of one sweep point.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub divisions: usize,
    pub h: f64,
    pub p: usize,
    pub n_v: usize,
    pub n_u: usize,
    pub lambda: Vec<f64>,
    pub converged: bool,
}

/// Solve one sweep point; `Ok(None)` when it exceeds the DOF budget.
pub fn solve_point(cfg: &StudyConfig, divisions: usize, p: usize) -> Result<Option<PointResult>> {
    let start = Instant::now();
    let mesh = study_mesh(cfg, divisions, p)?;
    let dofs = dg_dofs(&mesh);
    if let Some(budget) = cfg.dof_budget {
        if dofs > budget {
            log::warn!("skipping divisions={divisions} p={p}: {dofs} DG unknowns exceed the budget of {budget}");
            return Ok(None);
        }
    }
    let mut opts = AssemblyOptions::for_mesh(&mesh);
    opts.penalty = cfg.penalty;
    let system = assemble_system(&mesh, &opts)?;
    let eig = EigenOptions { k: cfg.k, sigma: cfg.target, seed: cfg.seed, ..Default::default() };
    let (pairs, report) = solve_eigs(&system, &eig)?;
    if !report.converged {
        log::warn!("divisions={divisions} p={p}: eigensolver did not converge after {} restarts", report.restarts);
    }
    let mut lambda: Vec<f64> = pairs.iter().map(|e| e.lambda).collect();
    lambda.sort_by(f64::total_cmp);
    log::info!(
        "divisions={divisions} p={p}: n_V={} n_U={} solved in {:.2}s",
        system.n_v(),
        system.n_u(),
        start.elapsed().as_secs_f64()
    );
    Ok(Some(PointResult {
        divisions,
        h: cfg.domain.spacing(divisions),
        p,
        n_v: system.n_v(),
        n_u: system.n_u(),
        lambda,
        converged: report.converged,
    }))
}

/// Solve every sweep point and return the rows in sweep order.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<StudyRow>> {
    cfg.validate()?;
    let points = cfg.points();
    let solve_all = || -> Vec<Result<Option<PointResult>>> { points.par_iter().map(|&(d, p)| solve_point(cfg, d, p)).collect() };
    let results = if cfg.jobs == 1 {
        points.iter().map(|&(d, p)| solve_point(cfg, d, p)).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(solve_all)
    };
    let mut solved = Vec::new();
    for r in results {
        if let Some(pt) = r? {
            solved.push(pt);
        }
    }
    Ok(rows_from_points(cfg.param(), &solved, cfg.reference.as_deref()))
}

/// Long-format rows with relative errors and rates between consecutive
/// points.
pub fn rows_from_points(param: SweepParam, points: &[PointResult], reference: Option<&[f64]>) -> Vec<StudyRow> {
    let k = points.iter().map(|p| p.lambda.len()).max().unwrap_or(0);
    let relerr = |pt: &PointResult, j: usize| -> Option<f64> {
        let r = *reference?.get(j)?;
        Some((pt.lambda[j] - r).abs() / r)
    };
    let mut rates = vec![vec![None; k]; points.len()];
    for j in 0..k {
        let idx: Vec<usize> = (0..points.len()).filter(|&i| j < points[i].lambda.len()).collect();
        let errs: Option<Vec<f64>> = idx.iter().map(|&i| relerr(&points[i], j)).collect();
        let Some(errs) = errs else { continue };
        match param {
            SweepParam::H => {
                let h: Vec<f64> = idx.iter().map(|&i| points[i].h).collect();
                for (r, &i) in h_rates(&errs, &h).into_iter().zip(&idx) {
                    rates[i][j] = r;
                }
            }
            SweepParam::P => {
                for w in 1..idx.len() {
                    let p = [points[idx[w - 1]].p as f64, points[idx[w]].p as f64];
                    rates[idx[w]][j] = p_rate(&errs[w - 1..=w], &p);
                }
            }
        }
    }
    let mut rows = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        for (j, &lambda) in pt.lambda.iter().enumerate() {
            rows.push(StudyRow {
                param,
                h: pt.h,
                p: pt.p,
                n_v: pt.n_v,
                n_u: pt.n_u,
                k: j + 1,
                lambda,
                relerr: relerr(pt, j),
                rate: rates[i][j],
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(h: f64, p: usize, lambda: Vec<f64>) -> PointResult {
        PointResult { divisions: 1, h, p, n_v: 0, n_u: 0, lambda, converged: true }
    }

    #[test]
    fn h_rates_follow_errors() {
        // errors 1e-2, 2.5e-3 at halved h: rate 2
        let pts = vec![point(0.5, 2, vec![101.0]), point(0.25, 2, vec![100.25])];
        let rows = rows_from_points(SweepParam::H, &pts, Some(&[100.0]));
        assert_eq!(rows.len(), 2);
        assert!(rows[0].rate.is_none());
        assert!((rows[1].rate.unwrap() - 2.0).abs() < 1e-12);
        assert!((rows[0].relerr.unwrap() - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn p_rates_are_exponential() {
        let e = |p: f64| (-2.5 * p).exp();
        let pts: Vec<_> = (2..5).map(|p| point(0.125, p, vec![1.0 + e(p as f64)])).collect();
        let rows = rows_from_points(SweepParam::P, &pts, Some(&[1.0]));
        for r in &rows[1..] {
            assert!((r.rate.unwrap() - 2.5).abs() < 1e-6);
        }
    }

    #[test]
    fn no_reference_leaves_columns_empty() {
        let rows = rows_from_points(SweepParam::H, &[point(1.0, 5, vec![1.0, 2.0])], None);
        assert!(rows.iter().all(|r| r.relerr.is_none() && r.rate.is_none()));
        assert_eq!(rows[1].k, 2);
    }

    #[test]
    fn empty_sweep_gives_no_rows() {
        let cfg = StudyConfig::new(Domain::UnitSquare, MeshKind::Tri, Sweep::H { p: 2, divisions: vec![] });
        assert!(run_study(&cfg).unwrap().is_empty());
    }

    #[test]
    fn budget_skips_points() {
        let mut cfg = StudyConfig::new(Domain::UnitSquare, MeshKind::Tri, Sweep::H { p: 2, divisions: vec![2, 64] });
        cfg.dof_budget = Some(1000);
        let rows = run_study(&cfg).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.h == 0.5));
    }

    #[test]
    fn dof_count_matches_assembly() {
        let mesh = hanging_demo_mesh(Domain::UnitSquare, 4, 2, 600).unwrap();
        assert!(!mesh.is_conforming());
        let sys = assemble_system(&mesh, &AssemblyOptions::for_mesh(&mesh)).unwrap();
        assert_eq!(dg_dofs(&mesh), sys.n_v());
    }

    #[test]
    fn invalid_configs() {
        let cfg = StudyConfig::new(Domain::Cube, MeshKind::Tri, Sweep::H { p: 2, divisions: vec![1] });
        assert!(run_study(&cfg).is_err());
        let cfg = StudyConfig::new(Domain::UnitSquare, MeshKind::Tri, Sweep::P { divisions: 2, degrees: vec![1] });
        assert!(run_study(&cfg).is_err());
        assert!(parse_domain("sqaure").is_err());
        assert!("hex".parse::<MeshKind>().is_err());
    }
}
