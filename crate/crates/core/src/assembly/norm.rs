//! The DG energy norm, evaluated by quadrature.

use rayon::prelude::*;

use crate::assembly::dofmap::DgSpace;
use crate::assembly::system::FieldEval;
use crate::error::Result;
use crate::geom::{cross, dot, Vec3};
use crate::mesh::Mesh;
use crate::polyspace::basis::VJet;

/// Squared contributions to the DG norm.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NormParts {
    /// `sum_K ||curl^2 v||^2`
    pub curl2: f64,
    /// `||v||^2`
    pub l2: f64,
    /// `sum_f h^-3 p^6 ||[[v]]||^2`
    pub jump: f64,
    /// `sum_f h^-1 p^2 ||[[curl v]]||^2`
    pub curl_jump: f64,
    /// `sum_f h p^-2 ||{curl^2 v}||^2`
    pub avg2: f64,
    /// `sum_f h^3 p^-6 ||{curl^3 v}||^2`
    pub avg3: f64,
}

impl NormParts {
    pub fn norm(&self) -> f64 {
        (self.seminorm_sq() + self.l2).sqrt()
    }

    pub fn seminorm(&self) -> f64 {
        self.seminorm_sq().sqrt()
    }

    fn seminorm_sq(&self) -> f64 {
        self.curl2 + self.jump + self.curl_jump + self.avg2 + self.avg3
    }
}

/// Norm parts of a field given cellwise, with quadrature exactness
/// `2p + extra` on cells and faces.
pub fn norm_parts(mesh: &Mesh, u: &FieldEval<'_>, extra: usize) -> Result<NormParts> {
    let cells = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let (pts, w) = mesh.cell_quadrature(c, 2 * mesh.cells[c].degree + extra)?;
            let v = u(c, &pts);
            let mut out = NormParts::default();
            for (q, j) in v.iter().enumerate() {
                out.curl2 += w[q] * dot(j.curl2, j.curl2);
                out.l2 += w[q] * dot(j.val, j.val);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let faces = (0..mesh.faces.len()).into_par_iter().map(|f| face_parts(mesh, f, u, extra)).collect::<Result<Vec<_>>>()?;
    let mut total = NormParts::default();
    for x in cells.iter().chain(&faces) {
        total.curl2 += x.curl2;
        total.l2 += x.l2;
        total.jump += x.jump;
        total.curl_jump += x.curl_jump;
        total.avg2 += x.avg2;
        total.avg3 += x.avg3;
    }
    Ok(total)
}

fn face_parts(mesh: &Mesh, f: usize, u: &FieldEval<'_>, extra: usize) -> Result<NormParts> {
    let face = &mesh.faces[f];
    let pmax = face.sides().map(|(c, _)| mesh.cells[c].degree).max().unwrap();
    let (pts, w) = mesh.face_quadrature(f, 2 * pmax + extra)?;
    let omega = if face.is_boundary() { 1.0 } else { 0.5 };
    let sides: Vec<(Vec3, Vec<VJet>)> = face.sides().map(|(c, n)| (n, u(c, &pts))).collect();
    let (h, p) = (face.h, face.degree as f64);
    let mut out = NormParts::default();
    for q in 0..pts.len() {
        let mut j0 = [0.0; 3];
        let mut j1 = [0.0; 3];
        let mut a2 = [0.0; 3];
        let mut a3 = [0.0; 3];
        for (n, v) in &sides {
            let v = &v[q];
            let (x0, x1) = (cross(v.val, *n), cross(v.curl, *n));
            for k in 0..3 {
                j0[k] += x0[k];
                j1[k] += x1[k];
                a2[k] += omega * v.curl2[k];
                a3[k] += omega * v.curl3[k];
            }
        }
        out.jump += w[q] * p.powi(6) / h.powi(3) * dot(j0, j0);
        out.curl_jump += w[q] * p * p / h * dot(j1, j1);
        out.avg2 += w[q] * h / (p * p) * dot(a2, a2);
        out.avg3 += w[q] * h.powi(3) / p.powi(6) * dot(a3, a3);
    }
    Ok(out)
}

/// `(sum h^-3 p^6 ||[[v]]||^2, sum h^-1 p^2 ||[[curl v]]||^2)` over interior
/// faces only.
pub fn interior_jumps(mesh: &Mesh, u: &FieldEval<'_>, extra: usize) -> Result<(f64, f64)> {
    let parts = (0..mesh.faces.len())
        .into_par_iter()
        .filter(|f| !mesh.faces[*f].is_boundary())
        .map(|f| face_parts(mesh, f, u, extra))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.iter().fold((0.0, 0.0), |(a, b), x| (a + x.jump, b + x.curl_jump)))
}

/// `(||v||_h, |v|_h)` of a discrete field.
pub fn dg_norm(mesh: &Mesh, space: &DgSpace, coef: &[f64]) -> Result<(f64, f64)> {
    let parts = norm_parts(mesh, &|c, pts| space.eval(c, coef, pts), 0)?;
    Ok((parts.norm(), parts.seminorm()))
}

/// A smooth field with its curl powers.
pub trait ExactField: Sync {
    fn jet(&self, x: Vec3) -> VJet;
}

/// `||u - u_h||_h` with quadrature exactness `2p + extra`.
pub fn dg_error(mesh: &Mesh, space: &DgSpace, coef: &[f64], exact: &dyn ExactField, extra: usize) -> Result<f64> {
    let diff = |c: usize, pts: &[Vec3]| -> Vec<VJet> {
        space
            .eval(c, coef, pts)
            .into_iter()
            .zip(pts)
            .map(|(h, x)| {
                let e = exact.jet(*x);
                let sub = |a: Vec3, b: Vec3| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                VJet { val: sub(e.val, h.val), curl: sub(e.curl, h.curl), curl2: sub(e.curl2, h.curl2), curl3: sub(e.curl3, h.curl3) }
            })
            .collect()
    };
    Ok(norm_parts(mesh, &diff, extra)?.norm())
}
