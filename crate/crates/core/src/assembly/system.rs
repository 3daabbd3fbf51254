//! Global matrices of the interior-penalty form.
//!
//! With planar fields embedded in 3D (`v = (v1, v2, 0)`, no `z` dependence),
//! a single set of formulas covers both dimensions:
//!
//! ```text
//! [[v]] = sum_s v_s x n_s          {w} = (w_+ + w_-)/2   (one-sided on the boundary)
//! a_h(w,v) = sum_K (curl^2 w, curl^2 v)_K + (w, v)
//!          + sum_f ( {curl^3 w}.[[v]] + {curl^2 w}.[[curl v]]
//!                  + {curl^3 v}.[[w]] + {curl^2 v}.[[curl w]]
//!                  + eta1 p_f^2/h_f [[curl w]].[[curl v]]
//!                  + eta2 p_f^6/h_f^3 [[w]].[[v]] )_f
//! ```

use faer::Mat;
use rayon::prelude::*;

use crate::assembly::dofmap::DgSpace;
use crate::error::{Error, Result};
use crate::geom::{cross, dot, Vec3};
use crate::mesh::{CellKind, Mesh};
use crate::polyspace::basis::{SpaceKind, VJet};
use crate::polyspace::lagrange::LagrangeSpace;
use crate::sparse::CsrMatrix;

/// Penalty parameters `eta1` (on `[[curl v]]`) and `eta2` (on `[[v]]`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Penalty {
    pub eta1: f64,
    pub eta2: f64,
}

impl Penalty {
    /// Defaults used for all experiments: (2.5, 1.6) in 2D, (15.6, 1.35) in 3D.
    pub fn default_for(dim: usize) -> Self {
        if dim == 3 {
            Self { eta1: 15.6, eta2: 1.35 }
        } else {
            Self { eta1: 2.5, eta2: 1.6 }
        }
    }

    /// `(eta1 p^2 / h, eta2 p^6 / h^3)` on a face.
    pub fn weights(&self, h: f64, p: usize) -> (f64, f64) {
        let p = p as f64;
        (self.eta1 * p * p / h, self.eta2 * p.powi(6) / h.powi(3))
    }
}

#[derive(Clone, Debug)]
pub struct AssemblyOptions {
    pub penalty: Penalty,
    /// Scalar space on quadrilaterals.
    pub quad_space: SpaceKind,
    /// Also assemble the Gram matrix of the DG norm.
    pub with_norm: bool,
    /// Build the multiplier space and the constraint matrix.
    pub with_constraint: bool,
}

impl AssemblyOptions {
    pub fn for_mesh(mesh: &Mesh) -> Self {
        Self { penalty: Penalty::default_for(mesh.dim), quad_space: SpaceKind::Tensor, with_norm: false, with_constraint: true }
    }
}

#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub space: DgSpace,
    pub multiplier: Option<LagrangeSpace>,
    /// The full form `a_h`.
    pub a: CsrMatrix,
    pub m: CsrMatrix,
    /// `a - m`.
    pub atilde: CsrMatrix,
    /// `(grad q_j, phi_i)`, `n_U x n_V`.
    pub b: CsrMatrix,
    /// Gram matrix of the DG norm, if requested.
    pub norm: Option<CsrMatrix>,
    pub penalty: Penalty,
    pub degree: usize,
}

impl AssembledSystem {
    pub fn n_v(&self) -> usize {
        self.space.n_dofs()
    }

    pub fn n_u(&self) -> usize {
        self.b.nrows()
    }
}

/// Degree of the multiplier space: `p+1` on simplices (so that its gradients
/// lie in `V_h`), `p` for `Q_p` quadrilaterals and `1` for `P_p`
/// quadrilaterals.
pub fn multiplier_degree(kind: CellKind, quad_space: SpaceKind, p: usize) -> usize {
    match (kind, quad_space) {
        (CellKind::Quadrilateral, SpaceKind::Tensor) => p,
        (CellKind::Quadrilateral, SpaceKind::TotalDegree) => 1,
        _ => p + 1,
    }
}

/// Cell-to-cell block sparsity shared by `a`, `atilde` and the norm matrix.
struct BlockPattern {
    neighbors: Vec<Vec<usize>>,
    /// Per cell: start of each neighbor block within a row.
    block_start: Vec<Vec<usize>>,
    indptr: Vec<usize>,
    indices: Vec<usize>,
}

impl BlockPattern {
    fn new(mesh: &Mesh, space: &DgSpace) -> Self {
        let mut neighbors: Vec<Vec<usize>> = (0..mesh.n_cells()).map(|c| vec![c]).collect();
        for f in &mesh.faces {
            if let Some(m) = f.minus {
                neighbors[f.plus].push(m);
                neighbors[m].push(f.plus);
            }
        }
        let mut block_start = Vec::with_capacity(neighbors.len());
        for nb in &mut neighbors {
            nb.sort_unstable();
            nb.dedup();
        }
        let n = space.n_dofs();
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::new();
        for (c, nb) in neighbors.iter().enumerate() {
            let mut starts = Vec::with_capacity(nb.len());
            let mut s = 0;
            for &d in nb {
                starts.push(s);
                s += space.n_local(d);
            }
            block_start.push(starts);
            for r in space.range(c) {
                for &d in nb {
                    indices.extend(space.range(d));
                }
                indptr[r + 1] = indptr[r] + s;
            }
        }
        Self { neighbors, block_start, indptr, indices }
    }

    fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.indices.len()]
    }

    fn add_block(&self, data: &mut [f64], space: &DgSpace, c: usize, d: usize, block: faer::MatRef<'_, f64>) {
        let k = self.neighbors[c].binary_search(&d).expect("cells are neighbors");
        let start = self.block_start[c][k];
        for (i, r) in space.range(c).enumerate() {
            let base = self.indptr[r] + start;
            for j in 0..block.ncols() {
                data[base + j] += block[(i, j)];
            }
        }
    }

    fn finish(&self, n: usize, data: Vec<f64>) -> CsrMatrix {
        CsrMatrix::from_raw(n, n, self.indptr.clone(), self.indices.clone(), data)
    }
}

/// Rows `3q..3q+3` hold the vector `fill(q, j)` for column `j`.
fn stack(npts: usize, ncols: usize, fill: impl Fn(usize, usize) -> Vec3) -> Mat<f64> {
    let mut m = Mat::zeros(3 * npts, ncols);
    for q in 0..npts {
        for j in 0..ncols {
            let v = fill(q, j);
            m[(3 * q, j)] = v[0];
            m[(3 * q + 1, j)] = v[1];
            m[(3 * q + 2, j)] = v[2];
        }
    }
    m
}

/// `a^T diag(w (x) 1_3) b`
fn wgram(a: &Mat<f64>, b: &Mat<f64>, w: &[f64]) -> Mat<f64> {
    let mut bw = b.clone();
    for (q, &wq) in w.iter().enumerate() {
        for r in 3 * q..3 * q + 3 {
            for j in 0..bw.ncols() {
                bw[(r, j)] *= wq;
            }
        }
    }
    a.transpose() * &bw
}

struct CellLocal {
    /// `(curl^2 u, curl^2 v) + (u, v)`; also the volume part of the norm.
    a: Mat<f64>,
    m: Mat<f64>,
}

fn cell_local(mesh: &Mesh, space: &DgSpace, c: usize) -> Result<CellLocal> {
    let p = mesh.cells[c].degree;
    let (pts, w) = mesh.cell_quadrature(c, 2 * p)?;
    let n = space.n_local(c);
    let jets = space.jets(c, &pts);
    let v = stack(pts.len(), n, |q, j| jets[q * n + j].val);
    let c2 = stack(pts.len(), n, |q, j| jets[q * n + j].curl2);
    let m = wgram(&v, &v, &w);
    let a = wgram(&c2, &c2, &w) + &m;
    Ok(CellLocal { a, m })
}

/// Traces of all basis functions of the face's cells, plus side first.
struct FaceTraces {
    cells: Vec<usize>,
    /// `[[v]]`, `[[curl v]]`, `{curl^2 v}`, `{curl^3 v}` per basis function.
    j0: Mat<f64>,
    j1: Mat<f64>,
    a2: Mat<f64>,
    a3: Mat<f64>,
    w: Vec<f64>,
    h: f64,
    p: usize,
}

fn face_traces(mesh: &Mesh, space: &DgSpace, f: usize) -> Result<FaceTraces> {
    let face = &mesh.faces[f];
    let pmax = face.sides().map(|(c, _)| mesh.cells[c].degree).max().unwrap();
    let (pts, w) = mesh.face_quadrature(f, 2 * pmax)?;
    let omega = if face.is_boundary() { 1.0 } else { 0.5 };
    let sides: Vec<(usize, Vec3, Vec<VJet>)> = face.sides().map(|(c, n)| (c, n, space.jets(c, &pts))).collect();
    let ncols: usize = sides.iter().map(|s| space.n_local(s.0)).sum();
    let locate = |j: usize| -> (usize, usize) {
        let mut j = j;
        for (s, side) in sides.iter().enumerate() {
            let n = space.n_local(side.0);
            if j < n {
                return (s, j);
            }
            j -= n;
        }
        unreachable!()
    };
    let get = |q: usize, j: usize| -> (&VJet, Vec3) {
        let (s, jj) = locate(j);
        let n = space.n_local(sides[s].0);
        (&sides[s].2[q * n + jj], sides[s].1)
    };
    let npts = pts.len();
    Ok(FaceTraces {
        cells: sides.iter().map(|s| s.0).collect(),
        j0: stack(npts, ncols, |q, j| {
            let (v, n) = get(q, j);
            cross(v.val, n)
        }),
        j1: stack(npts, ncols, |q, j| {
            let (v, n) = get(q, j);
            cross(v.curl, n)
        }),
        a2: stack(npts, ncols, |q, j| get(q, j).0.curl2.map(|x| omega * x)),
        a3: stack(npts, ncols, |q, j| get(q, j).0.curl3.map(|x| omega * x)),
        w,
        h: face.h,
        p: face.degree,
    })
}

fn face_form(t: &FaceTraces, penalty: &Penalty) -> Mat<f64> {
    let (c1, c2) = penalty.weights(t.h, t.p);
    let k = wgram(&t.a3, &t.j0, &t.w) + wgram(&t.a2, &t.j1, &t.w);
    let kt = k.transpose().to_owned();
    k + kt + wgram(&t.j1, &t.j1, &t.w) * faer::Scale(c1) + wgram(&t.j0, &t.j0, &t.w) * faer::Scale(c2)
}

fn face_norm(t: &FaceTraces) -> Mat<f64> {
    let (h, p) = (t.h, t.p as f64);
    wgram(&t.j0, &t.j0, &t.w) * faer::Scale(p.powi(6) / h.powi(3))
        + wgram(&t.a3, &t.a3, &t.w) * faer::Scale(h.powi(3) / p.powi(6))
        + wgram(&t.a2, &t.a2, &t.w) * faer::Scale(h / (p * p))
        + wgram(&t.j1, &t.j1, &t.w) * faer::Scale(p * p / h)
}

fn scatter_face(pattern: &BlockPattern, data: &mut [f64], space: &DgSpace, cells: &[usize], k: &Mat<f64>) {
    let mut off = Vec::with_capacity(cells.len());
    let mut s = 0;
    for &c in cells {
        off.push(s);
        s += space.n_local(c);
    }
    for (a, &ca) in cells.iter().enumerate() {
        for (b, &cb) in cells.iter().enumerate() {
            let blk = k.as_ref().submatrix(off[a], off[b], space.n_local(ca), space.n_local(cb));
            pattern.add_block(data, space, ca, cb, blk);
        }
    }
}

const CHUNK: usize = 2048;

/// Assemble `a_h`, the mass matrix, `a_h - M`, the constraint matrix and
/// optionally the norm Gram matrix, with the degrees stored on the mesh.
pub fn assemble_system(mesh: &Mesh, opts: &AssemblyOptions) -> Result<AssembledSystem> {
    let AssemblyOptions { penalty, quad_space, with_norm, with_constraint } = opts.clone();
    if !(penalty.eta1 > 0.0 && penalty.eta2 > 0.0) {
        return Err(Error::InvalidArgument(format!("penalties must be positive, got ({}, {})", penalty.eta1, penalty.eta2)));
    }
    let space = DgSpace::new(mesh, quad_space)?;
    let n = space.n_dofs();
    let pattern = BlockPattern::new(mesh, &space);
    let mut a = pattern.zeros();
    let mut nm = if with_norm { pattern.zeros() } else { Vec::new() };
    let mut m_trip = Vec::new();

    for chunk in (0..mesh.n_cells()).collect::<Vec<_>>().chunks(CHUNK) {
        let locals = chunk.par_iter().map(|&c| cell_local(mesh, &space, c)).collect::<Result<Vec<_>>>()?;
        for (&c, loc) in chunk.iter().zip(&locals) {
            pattern.add_block(&mut a, &space, c, c, loc.a.as_ref());
            if with_norm {
                pattern.add_block(&mut nm, &space, c, c, loc.a.as_ref());
            }
            let r = space.range(c);
            for i in 0..r.len() {
                for j in 0..r.len() {
                    m_trip.push((r.start + i, r.start + j, loc.m[(i, j)]));
                }
            }
        }
    }
    for chunk in (0..mesh.faces.len()).collect::<Vec<_>>().chunks(CHUNK) {
        let locals = chunk
            .par_iter()
            .map(|&f| {
                let t = face_traces(mesh, &space, f)?;
                let k = face_form(&t, &penalty);
                let nk = if with_norm { Some(face_norm(&t)) } else { None };
                Ok((t.cells, k, nk))
            })
            .collect::<Result<Vec<_>>>()?;
        for (cells, k, nk) in &locals {
            scatter_face(&pattern, &mut a, &space, cells, k);
            if let Some(nk) = nk {
                scatter_face(&pattern, &mut nm, &space, cells, nk);
            }
        }
    }

    let m = CsrMatrix::from_triplets(n, n, m_trip);
    let a = pattern.finish(n, a);
    let atilde = a.lin_comb(1.0, &m, -1.0);
    let norm = if with_norm { Some(pattern.finish(n, nm)) } else { None };
    let (multiplier, b) = if with_constraint {
        let k = multiplier_degree(mesh.kind(), quad_space, mesh.min_degree());
        let lag = LagrangeSpace::new(mesh, k)?;
        let b = assemble_constraint(mesh, &space, &lag)?;
        (Some(lag), b)
    } else {
        (None, CsrMatrix::zeros(0, n))
    };
    Ok(AssembledSystem { space, multiplier, a, m, atilde, b, norm, penalty, degree: mesh.min_degree() })
}

/// `B[j, i] = (grad q_j, phi_i)`.
pub fn assemble_constraint(mesh: &Mesh, space: &DgSpace, lag: &LagrangeSpace) -> Result<CsrMatrix> {
    let dim = mesh.dim;
    let locals = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let p = mesh.cells[c].degree;
            let (pts, w) = mesh.cell_quadrature(c, p + lag.degree())?;
            let (_, grad) = lag.local_jets(c, &pts);
            let jets = space.basis(c).tabulate(&pts, 0);
            let nb = jets.n;
            let nn = lag.cell_dofs(c).len();
            let mut loc = vec![0.0; nn * dim * nb];
            for q in 0..pts.len() {
                for a in 0..nn {
                    let g = grad[q * nn + a];
                    for comp in 0..dim {
                        let s = w[q] * g[comp];
                        for i in 0..nb {
                            loc[a * dim * nb + comp * nb + i] += s * jets.val[q * nb + i];
                        }
                    }
                }
            }
            Ok(loc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Vec::new();
    for (c, loc) in locals.iter().enumerate() {
        let r = space.range(c);
        for (a, combo) in lag.cell_dofs(c).iter().enumerate() {
            for &(d, wt) in combo {
                for f in 0..r.len() {
                    t.push((d, r.start + f, wt * loc[a * r.len() + f]));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(lag.n_dofs(), space.n_dofs(), t))
}

/// Evaluator of a field on a cell: jets at the given points.
pub type FieldEval<'a> = dyn Fn(usize, &[Vec3]) -> Vec<VJet> + Sync + 'a;

/// `a_h(u, phi_i)` for every basis function, by quadrature with exactness
/// `2p + extra`, for a field given by cellwise jets. For a discrete field
/// this reproduces `A u`; for a smooth field it measures consistency.
pub fn form_against_basis(mesh: &Mesh, space: &DgSpace, penalty: &Penalty, u: &FieldEval<'_>, extra: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; space.n_dofs()];
    let cells = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let (pts, w) = mesh.cell_quadrature(c, 2 * mesh.cells[c].degree + extra)?;
            let n = space.n_local(c);
            let jets = space.jets(c, &pts);
            let uj = u(c, &pts);
            let mut r = vec![0.0; n];
            for q in 0..pts.len() {
                for (f, rf) in r.iter_mut().enumerate() {
                    let b = &jets[q * n + f];
                    *rf += w[q] * (dot(uj[q].curl2, b.curl2) + dot(uj[q].val, b.val));
                }
            }
            Ok((c, r))
        })
        .collect::<Result<Vec<_>>>()?;
    for (c, r) in cells {
        for (i, v) in space.range(c).zip(r) {
            out[i] += v;
        }
    }
    let faces = (0..mesh.faces.len())
        .into_par_iter()
        .map(|f| {
            let face = &mesh.faces[f];
            let pmax = face.sides().map(|(c, _)| mesh.cells[c].degree).max().unwrap();
            let (pts, w) = mesh.face_quadrature(f, 2 * pmax + extra)?;
            let omega = if face.is_boundary() { 1.0 } else { 0.5 };
            let (c1, c2) = penalty.weights(face.h, face.degree);
            let sides: Vec<(usize, Vec3)> = face.sides().collect();
            let uj: Vec<Vec<VJet>> = sides.iter().map(|&(c, _)| u(c, &pts)).collect();
            let mut contrib = Vec::new();
            for &(c, n_s) in &sides {
                let nl = space.n_local(c);
                let jets = space.jets(c, &pts);
                let mut r = vec![0.0; nl];
                for q in 0..pts.len() {
                    let mut jump0 = [0.0; 3];
                    let mut jump1 = [0.0; 3];
                    let mut avg2 = [0.0; 3];
                    let mut avg3 = [0.0; 3];
                    for (t, &(_, n_t)) in sides.iter().enumerate() {
                        let v = &uj[t][q];
                        for k in 0..3 {
                            jump0[k] += cross(v.val, n_t)[k];
                            jump1[k] += cross(v.curl, n_t)[k];
                            avg2[k] += omega * v.curl2[k];
                            avg3[k] += omega * v.curl3[k];
                        }
                    }
                    for (f, rf) in r.iter_mut().enumerate() {
                        let b = &jets[q * nl + f];
                        let bj0 = cross(b.val, n_s);
                        let bj1 = cross(b.curl, n_s);
                        let val = dot(avg3, bj0)
                            + dot(avg2, bj1)
                            + omega * dot(b.curl3, jump0)
                            + omega * dot(b.curl2, jump1)
                            + c1 * dot(jump1, bj1)
                            + c2 * dot(jump0, bj0);
                        *rf += w[q] * val;
                    }
                }
                contrib.push((c, r));
            }
            Ok(contrib)
        })
        .collect::<Result<Vec<_>>>()?;
    for contrib in faces {
        for (c, r) in contrib {
            for (i, v) in space.range(c).zip(r) {
                out[i] += v;
            }
        }
    }
    Ok(out)
}

/// Load vector `(f, phi_i)` with quadrature exactness `p + q_f`.
pub fn assemble_load(mesh: &Mesh, space: &DgSpace, f: &(dyn Fn(Vec3) -> Vec3 + Sync), q_f: usize) -> Result<Vec<f64>> {
    let parts = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let (pts, w) = mesh.cell_quadrature(c, mesh.cells[c].degree + q_f)?;
            let n = space.n_local(c);
            let jets = space.jets(c, &pts);
            let mut r = vec![0.0; n];
            for (q, x) in pts.iter().enumerate() {
                let fx = f(*x);
                for (i, ri) in r.iter_mut().enumerate() {
                    *ri += w[q] * dot(fx, jets[q * n + i].val);
                }
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.concat())
}
