//! Per-cell degrees of freedom of the discontinuous vector space.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{CellKind, Mesh};
use crate::polyspace::basis::{vector_jets, ScalarBasis, SpaceKind, VJet};

/// `V_h`: on every cell the vector fields `phi_i e_c` built from an
/// L2-orthonormal scalar basis, so the mass matrix is the identity up to
/// rounding. Cell `c` owns the contiguous global range [`DgSpace::range`].
#[derive(Clone, Debug)]
pub struct DgSpace {
    dim: usize,
    bases: Vec<ScalarBasis>,
    offsets: Vec<usize>,
}

/// Scalar space used on cells of the given kind.
pub fn space_kind(kind: CellKind, quad_space: SpaceKind) -> SpaceKind {
    match kind {
        CellKind::Quadrilateral => quad_space,
        _ => SpaceKind::TotalDegree,
    }
}

impl DgSpace {
    /// Build the space with the degrees stored on the mesh cells.
    /// `quad_space` selects `P_p` or `Q_p` on quadrilaterals.
    pub fn new(mesh: &Mesh, quad_space: SpaceKind) -> Result<Self> {
        if let Some(c) = mesh.cells.iter().position(|c| c.degree < 2) {
            return Err(Error::InvalidArgument(format!("cell {c} has degree {} < 2", mesh.cells[c].degree)));
        }
        let bases = (0..mesh.n_cells())
            .into_par_iter()
            .map(|c| {
                let cell = &mesh.cells[c];
                let kind = space_kind(cell.kind, quad_space);
                let (pts, w) = mesh.cell_quadrature(c, 2 * cell.degree)?;
                let (lo, hi) = mesh.cell_bbox(c);
                ScalarBasis::orthonormal(mesh.dim, kind, cell.degree, lo, hi, &pts, &w)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut offsets = vec![0];
        for b in &bases {
            offsets.push(offsets.last().unwrap() + mesh.dim * b.len());
        }
        Ok(Self { dim: mesh.dim, bases, offsets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_cells(&self) -> usize {
        self.bases.len()
    }

    pub fn n_dofs(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn range(&self, c: usize) -> Range<usize> {
        self.offsets[c]..self.offsets[c + 1]
    }

    pub fn n_local(&self, c: usize) -> usize {
        self.offsets[c + 1] - self.offsets[c]
    }

    pub fn basis(&self, c: usize) -> &ScalarBasis {
        &self.bases[c]
    }

    /// Jets of all local vector basis functions of cell `c`, entry
    /// `[q * n_local + f]`.
    pub fn jets(&self, c: usize, points: &[Vec3]) -> Vec<VJet> {
        vector_jets(&self.bases[c].tabulate(points, 3), self.dim)
    }

    /// Jets of the discrete field with global coefficients `coef` at points
    /// of cell `c`.
    pub fn eval(&self, c: usize, coef: &[f64], points: &[Vec3]) -> Vec<VJet> {
        let n = self.n_local(c);
        let local = &coef[self.range(c)];
        let jets = self.jets(c, points);
        (0..points.len())
            .map(|q| {
                let mut out = VJet::default();
                for (f, &a) in local.iter().enumerate() {
                    if a != 0.0 {
                        let j = &jets[q * n + f];
                        for k in 0..3 {
                            out.val[k] += a * j.val[k];
                            out.curl[k] += a * j.curl[k];
                            out.curl2[k] += a * j.curl2[k];
                            out.curl3[k] += a * j.curl3[k];
                        }
                    }
                }
                out
            })
            .collect()
    }

    /// L2 projection of a vector field onto `V_h` (cellwise, since the basis
    /// is orthonormal), with quadrature exactness `2p + extra`.
    pub fn project(&self, mesh: &Mesh, f: &(dyn Fn(Vec3) -> Vec3 + Sync), extra: usize) -> Result<Vec<f64>> {
        let parts = (0..self.n_cells())
            .into_par_iter()
            .map(|c| {
                let (pts, w) = mesh.cell_quadrature(c, 2 * mesh.cells[c].degree + extra)?;
                let n = self.n_local(c);
                let jets = self.jets(c, &pts);
                let mut out = vec![0.0; n];
                for (q, x) in pts.iter().enumerate() {
                    let v = f(*x);
                    for (fi, o) in out.iter_mut().enumerate() {
                        let b = jets[q * n + fi].val;
                        *o += w[q] * (v[0] * b[0] + v[1] * b[1] + v[2] * b[2]);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.concat())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Domain};

    #[test]
    fn ranges_cover_all_dofs() {
        let mesh = build_structured_mesh(Domain::Square, CellKind::Triangle, 2, 2).unwrap();
        let s = DgSpace::new(&mesh, SpaceKind::Tensor).unwrap();
        assert_eq!(s.n_dofs(), 8 * 12);
        let mut next = 0;
        for c in 0..s.n_cells() {
            assert_eq!(s.range(c).start, next);
            next = s.range(c).end;
        }
        assert_eq!(next, s.n_dofs());
        let q = build_structured_mesh(Domain::Square, CellKind::Quadrilateral, 2, 2).unwrap();
        assert_eq!(DgSpace::new(&q, SpaceKind::Tensor).unwrap().n_dofs(), 4 * 18);
        assert_eq!(DgSpace::new(&q, SpaceKind::TotalDegree).unwrap().n_dofs(), 4 * 12);
    }

    #[test]
    fn degree_below_two_rejected() {
        let mesh = build_structured_mesh(Domain::Square, CellKind::Triangle, 2, 1).unwrap();
        assert!(DgSpace::new(&mesh, SpaceKind::Tensor).is_err());
    }

    #[test]
    fn projection_reproduces_polynomials() {
        let mesh = build_structured_mesh(Domain::LShape, CellKind::Triangle, 4, 2).unwrap();
        let s = DgSpace::new(&mesh, SpaceKind::Tensor).unwrap();
        let f = |x: Vec3| [x[0] * x[1], 1.0 - x[0] * x[0], 0.0];
        let coef = s.project(&mesh, &f, 0).unwrap();
        for c in [0, 5, 11] {
            let (pts, _) = mesh.cell_quadrature(c, 3).unwrap();
            for (x, j) in pts.iter().zip(s.eval(c, &coef, &pts)) {
                let e = f(*x);
                assert!((j.val[0] - e[0]).abs() < 1e-12 && (j.val[1] - e[1]).abs() < 1e-12);
                // curl of (xy, 1-x^2) = -2x - x = -3x
                assert!((j.curl[2] + 3.0 * x[0]).abs() < 1e-11);
            }
        }
    }
}
