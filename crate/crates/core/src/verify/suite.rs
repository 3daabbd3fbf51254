//! Suite selection and the standard mesh battery.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::checks::*;
use super::{CheckReport, Role};
use crate::assembly::Penalty;
use crate::error::{Error, Result};
use crate::mesh::{build_structured_mesh, CellKind, Domain, Mesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    All,
    Consistency,
    Galerkin,
    Matrices,
    Coercivity,
    Poincare,
    Jumps,
    Eigen,
    Basis,
}

impl Suite {
    pub const NAMES: [&'static str; 9] = ["all", "consistency", "galerkin", "matrices", "coercivity", "poincare", "jumps", "eigen", "basis"];

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            Suite::All,
            Suite::Consistency,
            Suite::Galerkin,
            Suite::Matrices,
            Suite::Coercivity,
            Suite::Poincare,
            Suite::Jumps,
            Suite::Eigen,
            Suite::Basis,
        ];
        Self::NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| all[i])
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}' (expected one of {})", Self::NAMES.join(", "))))
    }
}

/// One mesh of the battery.
#[derive(Clone, Debug)]
pub struct BatteryMesh {
    pub label: String,
    pub kind: CellKind,
    pub level: usize,
    pub mesh: Mesh,
}

/// Square triangles at levels 0-2, square quadrilaterals at levels 0-1 and
/// the six-tetrahedron cube, each at degrees 2 and 3. Level `l` has
/// `2^(l+1)` cells per side.
pub fn standard_battery() -> Result<Vec<BatteryMesh>> {
    let mut out = Vec::new();
    for p in [2, 3] {
        for (kind, levels) in [(CellKind::Triangle, 0..=2), (CellKind::Quadrilateral, 0..=1)] {
            for level in levels {
                let div = 2 << level;
                out.push(BatteryMesh {
                    label: format!("square-{}-L{level}", kind.name()),
                    kind,
                    level,
                    mesh: build_structured_mesh(Domain::Square, kind, div, p)?,
                });
            }
        }
        out.push(BatteryMesh {
            label: "cube-tetrahedron-L0".into(),
            kind: CellKind::Tetrahedron,
            level: 0,
            mesh: build_structured_mesh(Domain::Cube, CellKind::Tetrahedron, 1, p)?,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Penalty overrides; `None` keeps the per-dimension defaults.
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub seed: u64,
    /// Random samples for the sampled checks.
    pub samples: usize,
    /// Largest level used by dense checks.
    pub dense_level: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { eta1: None, eta2: None, seed: 17, samples: 200, dense_level: 1 }
    }
}

impl SuiteOptions {
    fn penalty(&self, dim: usize) -> Penalty {
        let d = Penalty::default_for(dim);
        Penalty { eta1: self.eta1.unwrap_or(d.eta1), eta2: self.eta2.unwrap_or(d.eta2) }
    }

    /// Penalties below the defaults make coercivity an expected-fail control.
    fn weakened(&self, dim: usize) -> bool {
        let d = Penalty::default_for(dim);
        let p = self.penalty(dim);
        p.eta1 < d.eta1 || p.eta2 < d.eta2
    }
}

fn error_row(case: &Case<'_>, check: &str, e: &Error) -> CheckReport {
    log::error!("{check} on {}: {e}", case.label);
    CheckReport {
        check: format!("{check}_error"),
        mesh: case.label.clone(),
        p: case.mesh.min_degree(),
        eta1: case.penalty.eta1,
        eta2: case.penalty.eta2,
        observed: f64::NAN,
        threshold: 0.0,
        pass: false,
        role: Role::Check,
    }
}

fn collect(rows: &mut Vec<CheckReport>, case: &Case<'_>, check: &str, r: Result<Vec<CheckReport>>) {
    match r {
        Ok(v) => rows.extend(v),
        Err(e) => rows.push(error_row(case, check, &e)),
    }
}

/// Run `suite` over `meshes`. Rows are in battery order.
pub fn run_suite(suite: Suite, meshes: &[BatteryMesh], opts: &SuiteOptions) -> Vec<CheckReport> {
    let mut rows = Vec::new();
    // (kind, p) -> per-level constants
    let mut coercivity: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    let mut poincare: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for bm in meshes {
        let dim = bm.mesh.dim;
        let case = Case::new(bm.label.clone(), &bm.mesh, opts.penalty(dim));
        let p = bm.mesh.min_degree();
        let square = dim == 2;
        let dense_ok = bm.level <= opts.dense_level;
        log::info!("verify {} p={p}", bm.label);
        if suite.includes(Suite::Consistency) && square {
            collect(&mut rows, &case, "consistency", check_consistency(&case));
        }
        if suite.includes(Suite::Galerkin) && square {
            collect(&mut rows, &case, "galerkin", check_galerkin(&case));
        }
        if suite.includes(Suite::Matrices) {
            collect(&mut rows, &case, "matrices", check_matrices(&case));
            if dense_ok {
                collect(&mut rows, &case, "penalty_monotone", check_penalty_monotonicity(&case));
            }
        }
        if suite.includes(Suite::Jumps) {
            collect(&mut rows, &case, "jump_vanishing", check_jump_vanishing(&case, opts.seed));
        }
        if suite.includes(Suite::Coercivity) {
            let weak = opts.weakened(dim);
            match check_coercivity(&case, opts.samples, opts.seed, weak) {
                Ok((c0, r)) => {
                    coercivity.entry((bm.kind.name().into(), p)).or_default().push(c0);
                    rows.extend(r);
                }
                Err(e) => rows.push(error_row(&case, "coercivity", &e)),
            }
        }
        if suite.includes(Suite::Poincare) && dense_ok {
            match check_poincare(&case, opts.samples, opts.seed) {
                Ok((ratio, r)) => {
                    poincare.entry((bm.kind.name().into(), p)).or_default().push(ratio);
                    rows.extend(r);
                }
                Err(e) => rows.push(error_row(&case, "poincare", &e)),
            }
        }
        if suite.includes(Suite::Eigen) && (dense_ok || dim == 3) {
            collect(&mut rows, &case, "eigen", check_eigen(&case, 5));
        }
    }
    let weak = opts.weakened(2);
    for ((kind, p), vals) in &coercivity {
        if vals.len() > 1 && !weak {
            rows.push(stability_row("coercivity_refinement_stability", kind, *p, opts.penalty(2), vals, 2.0));
        }
    }
    for ((kind, p), vals) in &poincare {
        if vals.len() > 1 {
            rows.push(stability_row("poincare_refinement_stability", kind, *p, opts.penalty(2), vals, 2.0));
        }
    }
    if suite.includes(Suite::Basis) {
        for p in 2..=8 {
            rows.extend(check_basis_orthogonality(p));
            rows.push(check_projector(p, 20, opts.seed));
        }
        rows.extend(check_edge_bound(8, 50, opts.seed));
    }
    rows
}
