//! Continuous nodal spaces with homogeneous boundary values, used for the
//! divergence multiplier.
//!
//! Nodes sit on the equispaced lattice of each cell and are identified
//! topologically: a node is keyed by the vertices carrying its barycentric
//! (or bilinear) weight, so neighboring cells agree on shared nodes without
//! comparing coordinates. Nodes on the fine side of a hanging edge are
//! slaves: their value is the coarse cell's trace at that point.

use std::collections::{BTreeSet, HashMap};

use faer::Mat;

use crate::dense::inverse;
use crate::error::{Error, Result};
use crate::geom::{add, scale, Vec3};
use crate::mesh::{CellKind, Mesh};
use crate::polyspace::basis::{ScalarBasis, SpaceKind};

type NodeKey = Vec<(usize, usize)>;

struct LocalNode {
    key: NodeKey,
    /// Vertices with nonzero weight, sorted.
    support: Vec<usize>,
    point: Vec3,
}

fn sorted_key(mut k: NodeKey) -> NodeKey {
    k.retain(|&(_, w)| w > 0);
    k.sort_unstable();
    k
}

fn simplex_lattice(k: usize, nv: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut m = vec![0; nv];
    fn rec(pos: usize, left: usize, m: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == m.len() {
            m[pos] = left;
            out.push(m.clone());
            return;
        }
        for a in (0..=left).rev() {
            m[pos] = a;
            rec(pos + 1, left - a, m, out);
        }
    }
    rec(0, k, &mut m, &mut out);
    out
}

fn local_nodes(mesh: &Mesh, c: usize, k: usize) -> Vec<LocalNode> {
    let cell = &mesh.cells[c];
    let pts = mesh.cell_points(c);
    let vs = &cell.vertices;
    match cell.kind {
        CellKind::Triangle | CellKind::Tetrahedron => simplex_lattice(k, vs.len())
            .into_iter()
            .map(|m| {
                let mut x = [0.0; 3];
                for (i, &mi) in m.iter().enumerate() {
                    x = add(x, scale(mi as f64 / k as f64, pts[i]));
                }
                let key = sorted_key(vs.iter().copied().zip(m.iter().copied()).collect());
                let support = key.iter().map(|&(v, _)| v).collect();
                LocalNode { key, support, point: x }
            })
            .collect(),
        CellKind::Quadrilateral => {
            let (center, axes, _) = mesh.cell_map(c);
            let mut out = Vec::new();
            for j in 0..=k {
                for i in 0..=k {
                    let xi = -1.0 + 2.0 * i as f64 / k as f64;
                    let eta = -1.0 + 2.0 * j as f64 / k as f64;
                    let point = add(center, add(scale(xi, axes[0]), scale(eta, axes[1])));
                    let on_edge = i == 0 || i == k || j == 0 || j == k;
                    let key = if j == 0 {
                        sorted_key(vec![(vs[0], k - i), (vs[1], i)])
                    } else if j == k {
                        sorted_key(vec![(vs[3], k - i), (vs[2], i)])
                    } else if i == 0 {
                        sorted_key(vec![(vs[0], k - j), (vs[3], j)])
                    } else if i == k {
                        sorted_key(vec![(vs[1], k - j), (vs[2], j)])
                    } else {
                        vec![(usize::MAX, c), (i, j)]
                    };
                    let support = if on_edge { key.iter().map(|&(v, _)| v).collect() } else { vs.clone() };
                    out.push(LocalNode { key, support, point });
                }
            }
            out
        }
    }
}

#[derive(Clone, Debug)]
enum NodeState {
    Boundary,
    Free(usize),
    Slave(Vec<(usize, f64)>),
}

/// Continuous piecewise polynomials of degree `k` vanishing on the boundary.
#[derive(Clone, Debug)]
pub struct LagrangeSpace {
    degree: usize,
    n_dofs: usize,
    /// Per cell, per local node: combination of global dofs.
    cell_dofs: Vec<Vec<Vec<(usize, f64)>>>,
    bases: Vec<ScalarBasis>,
    /// Per cell, nodal coefficients over the modal basis (row = node).
    nodal: Vec<Mat<f64>>,
}

impl LagrangeSpace {
    /// Degree-`k` space: `P_k` on simplices, `Q_k` on quadrilaterals.
    pub fn new(mesh: &Mesh, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("Lagrange degree must be positive".into()));
        }
        let kind = match mesh.kind() {
            CellKind::Quadrilateral => SpaceKind::Tensor,
            _ => SpaceKind::TotalDegree,
        };
        let locals: Vec<Vec<LocalNode>> = (0..mesh.n_cells()).map(|c| local_nodes(mesh, c, k)).collect();

        let mut bases = Vec::with_capacity(mesh.n_cells());
        let mut nodal = Vec::with_capacity(mesh.n_cells());
        for (c, nodes) in locals.iter().enumerate() {
            let (pts, w) = mesh.cell_quadrature(c, 2 * k)?;
            let (lo, hi) = mesh.cell_bbox(c);
            let b = ScalarBasis::orthonormal(mesh.dim, kind, k, lo, hi, &pts, &w)?;
            let xs: Vec<Vec3> = nodes.iter().map(|n| n.point).collect();
            let v = b.tabulate(&xs, 0);
            let n = b.len();
            debug_assert_eq!(n, nodes.len());
            let vand = Mat::from_fn(n, n, |a, i| v.val[a * n + i]);
            nodal.push(inverse(&vand).transpose().to_owned());
            bases.push(b);
        }

        // boundary sub-simplices
        let mut boundary: BTreeSet<Vec<usize>> = BTreeSet::new();
        for f in mesh.faces.iter().filter(|f| f.is_boundary()) {
            let mut vs = f.vertices.clone();
            vs.sort_unstable();
            for mask in 1..(1usize << vs.len()) {
                boundary.insert((0..vs.len()).filter(|b| mask >> b & 1 == 1).map(|b| vs[b]).collect());
            }
        }
        let hanging_by_mid: HashMap<usize, usize> = mesh.hanging.iter().enumerate().map(|(i, h)| (h.mid, i)).collect();

        let mut ids: HashMap<NodeKey, usize> = HashMap::new();
        let mut first: Vec<(usize, usize)> = Vec::new();
        let mut cell_nodes = Vec::with_capacity(mesh.n_cells());
        for (c, nodes) in locals.iter().enumerate() {
            let mut row = Vec::with_capacity(nodes.len());
            for (a, n) in nodes.iter().enumerate() {
                let next = ids.len();
                let id = *ids.entry(n.key.clone()).or_insert(next);
                if id == first.len() {
                    first.push((c, a));
                }
                row.push(id);
            }
            cell_nodes.push(row);
        }

        let mut states = Vec::with_capacity(first.len());
        let mut n_dofs = 0;
        for &(c, a) in &first {
            let node = &locals[c][a];
            let slave_of = node.support.iter().find_map(|v| hanging_by_mid.get(v)).map(|&h| &mesh.hanging[h]).filter(|h| {
                node.support.iter().all(|&v| v == h.mid || v == h.ends[0]) || node.support.iter().all(|&v| v == h.mid || v == h.ends[1])
            });
            let state = if boundary.contains(&node.support) {
                NodeState::Boundary
            } else if let Some(h) = slave_of {
                let cc = h.coarse_cell;
                let v = bases[cc].tabulate(&[node.point], 0);
                let nb = bases[cc].len();
                let mut expr = Vec::new();
                for (b, cn) in locals[cc].iter().enumerate() {
                    if cn.support.iter().all(|&v| v == h.ends[0] || v == h.ends[1]) {
                        let w: f64 = (0..nb).map(|i| nodal[cc][(b, i)] * v.val[i]).sum();
                        expr.push((cell_nodes[cc][b], w));
                    }
                }
                NodeState::Slave(expr)
            } else {
                n_dofs += 1;
                NodeState::Free(n_dofs - 1)
            };
            states.push(state);
        }

        let mut resolved: Vec<Option<Vec<(usize, f64)>>> = vec![None; states.len()];
        fn resolve(id: usize, states: &[NodeState], memo: &mut [Option<Vec<(usize, f64)>>], depth: usize) -> Result<Vec<(usize, f64)>> {
            if let Some(r) = &memo[id] {
                return Ok(r.clone());
            }
            if depth > 64 {
                return Err(Error::Structure("cyclic hanging-node constraints".into()));
            }
            let r = match &states[id] {
                NodeState::Boundary => Vec::new(),
                NodeState::Free(d) => vec![(*d, 1.0)],
                NodeState::Slave(expr) => {
                    let mut acc: Vec<(usize, f64)> = Vec::new();
                    for &(m, w) in expr {
                        for (d, x) in resolve(m, states, memo, depth + 1)? {
                            match acc.iter_mut().find(|e| e.0 == d) {
                                Some(e) => e.1 += w * x,
                                None => acc.push((d, w * x)),
                            }
                        }
                    }
                    acc
                }
            };
            memo[id] = Some(r.clone());
            Ok(r)
        }
        let mut cell_dofs = Vec::with_capacity(mesh.n_cells());
        for row in &cell_nodes {
            let mut out = Vec::with_capacity(row.len());
            for &id in row {
                out.push(resolve(id, &states, &mut resolved, 0)?);
            }
            cell_dofs.push(out);
        }
        Ok(Self { degree: k, n_dofs, cell_dofs, bases, nodal })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    /// Local node to global dof combinations of cell `c`.
    pub fn cell_dofs(&self, c: usize) -> &[Vec<(usize, f64)>] {
        &self.cell_dofs[c]
    }

    /// Values and gradients of the local nodal basis of cell `c` at `points`,
    /// entry `[q * n + a]`.
    pub fn local_jets(&self, c: usize, points: &[Vec3]) -> (Vec<f64>, Vec<Vec3>) {
        let j = self.bases[c].tabulate(points, 1);
        let n = self.bases[c].len();
        let t = &self.nodal[c];
        let mut val = vec![0.0; points.len() * n];
        let mut grad = vec![[0.0; 3]; points.len() * n];
        for q in 0..points.len() {
            for a in 0..n {
                let mut v = 0.0;
                let mut g = [0.0; 3];
                for i in 0..n {
                    let w = t[(a, i)];
                    v += w * j.val[q * n + i];
                    g = add(g, scale(w, j.grad[q * n + i]));
                }
                val[q * n + a] = v;
                grad[q * n + a] = g;
            }
        }
        (val, grad)
    }

    /// Value and gradient of the global function with dof vector `coef` at
    /// points of cell `c`.
    pub fn evaluate(&self, c: usize, coef: &[f64], points: &[Vec3]) -> Vec<(f64, Vec3)> {
        let (val, grad) = self.local_jets(c, points);
        let n = self.cell_dofs[c].len();
        let local: Vec<f64> = self.cell_dofs[c].iter().map(|e| e.iter().map(|&(d, w)| w * coef[d]).sum()).collect();
        (0..points.len())
            .map(|q| {
                let mut v = 0.0;
                let mut g = [0.0; 3];
                for a in 0..n {
                    v += local[a] * val[q * n + a];
                    g = add(g, scale(local[a], grad[q * n + a]));
                }
                (v, g)
            })
            .collect()
    }
}
