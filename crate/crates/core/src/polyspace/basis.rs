//! Per-cell modal bases for the DG space and their curl evaluators.
//!
//! A scalar basis is stored as monomial coefficients in cell-local
//! coordinates `xi = (x - center) / half_width` (the cell bounding box mapped
//! to `[-1,1]^d`) and orthonormalized in `L^2(K)` on the physical cell. The
//! vector DG space is the Cartesian product `e_c * phi_i`, so with affine
//! cells all curls reduce to exact derivatives of the scalar modes:
//!
//! ```text
//! curl   (phi e_c) = grad(phi) x e_c
//! curl^2 (phi e_c) = grad(d_c phi) - e_c lap(phi)
//! curl^3 (phi e_c) = e_c x grad(lap(phi))
//! ```

use crate::error::{Error, Result};
use crate::geom::{cross, Vec3};
use crate::mesh::CellKind;
use crate::polyspace::legendre::legendre_coefficients;
use crate::polyspace::quadrature::{quadrature_rule, RefShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Total degree `<= p` (`P_p`).
    TotalDegree,
    /// Degree `<= p` in each variable (`Q_p`).
    Tensor,
}

/// Exponent triples spanning the scalar space, ordered by total degree.
pub fn exponents(dim: usize, kind: SpaceKind, p: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    let zmax = if dim == 3 { p } else { 0 };
    for c in 0..=zmax {
        for b in 0..=p {
            for a in 0..=p {
                let ok = match kind {
                    SpaceKind::TotalDegree => a + b + c <= p,
                    SpaceKind::Tensor => true,
                };
                if ok {
                    out.push([a as u8, b as u8, c as u8]);
                }
            }
        }
    }
    out.sort_by_key(|e| (e[0] as u32 + e[1] as u32 + e[2] as u32, e[2], e[1], e[0]));
    out
}

/// Dimension of `P_p` in `dim` variables.
pub fn total_degree_dim(dim: usize, p: usize) -> usize {
    match dim {
        1 => p + 1,
        2 => (p + 1) * (p + 2) / 2,
        3 => (p + 1) * (p + 2) * (p + 3) / 6,
        _ => unreachable!(),
    }
}

/// Values and derivatives (through third order) of every basis function at
/// every point; entry `[q * n + i]` belongs to function `i` at point `q`.
#[derive(Clone, Debug)]
pub struct Jets {
    pub n: usize,
    pub npts: usize,
    pub val: Vec<f64>,
    pub grad: Vec<Vec3>,
    /// `[xx, yy, zz, xy, xz, yz]`
    pub hess: Vec<[f64; 6]>,
    pub grad_lap: Vec<Vec3>,
}

#[derive(Clone, Debug)]
pub struct ScalarBasis {
    dim: usize,
    degree: usize,
    kind: SpaceKind,
    center: Vec3,
    inv_half: Vec3,
    exps: Vec<[u8; 3]>,
    coef: Vec<f64>,
}

fn falling(a: u8, b: u8) -> f64 {
    if b > a {
        return 0.0;
    }
    (0..b).map(|k| (a - k) as f64).product()
}

// Derivative multi-indices in evaluation order.
const B0: [u8; 3] = [0, 0, 0];
const B1: [[u8; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
const B2: [[u8; 3]; 6] = [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [1, 0, 1], [0, 1, 1]];
// d_i lap: rows i, three terms each.
const B3: [[[u8; 3]; 3]; 3] = [
    [[3, 0, 0], [1, 2, 0], [1, 0, 2]],
    [[2, 1, 0], [0, 3, 0], [0, 1, 2]],
    [[2, 0, 1], [0, 2, 1], [0, 0, 3]],
];

/// In-place lower Cholesky of a row-major SPD matrix.
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) -> Option<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
        for k in j + 1..n {
            a[j * n + k] = 0.0;
        }
    }
    Some(())
}

impl ScalarBasis {
    /// L2(K)-orthonormal basis of the requested space on the cell whose
    /// bounding box is `[lo, hi]`, using the cell quadrature `(points, weights)`
    /// which must integrate degree `2p` (per variable for `Tensor`) exactly.
    pub fn orthonormal(
        dim: usize,
        kind: SpaceKind,
        degree: usize,
        lo: Vec3,
        hi: Vec3,
        points: &[Vec3],
        weights: &[f64],
    ) -> Result<Self> {
        let exps = exponents(dim, kind, degree);
        let n = exps.len();
        let mut center = [0.0; 3];
        let mut inv_half = [1.0; 3];
        for k in 0..dim {
            center[k] = 0.5 * (lo[k] + hi[k]);
            inv_half[k] = 2.0 / (hi[k] - lo[k]);
        }
        // Start from tensor Legendre products on the bounding box.
        let lc: Vec<Vec<f64>> = (0..=degree).map(legendre_coefficients).collect();
        let index_of = |e: [u8; 3]| exps.iter().position(|x| *x == e).expect("downward closed");
        let mut coef = vec![0.0; n * n];
        for (i, a) in exps.iter().enumerate() {
            for b0 in 0..=a[0] {
                for b1 in 0..=a[1] {
                    for b2 in 0..=a[2] {
                        let c = lc[a[0] as usize][b0 as usize] * lc[a[1] as usize][b1 as usize] * lc[a[2] as usize][b2 as usize];
                        if c != 0.0 {
                            coef[i * n + index_of([b0, b1, b2])] += c;
                        }
                    }
                }
            }
        }
        let mut basis = Self { dim, degree, kind, center, inv_half, exps, coef };
        for _ in 0..2 {
            basis.reorthonormalize(points, weights)?;
        }
        Ok(basis)
    }

    fn reorthonormalize(&mut self, points: &[Vec3], weights: &[f64]) -> Result<()> {
        let n = self.len();
        let jets = self.tabulate(points, 0);
        let mut gram = vec![0.0; n * n];
        for (q, w) in weights.iter().enumerate() {
            let v = &jets.val[q * n..(q + 1) * n];
            for i in 0..n {
                let wi = w * v[i];
                for j in 0..=i {
                    gram[i * n + j] += wi * v[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                gram[j * n + i] = gram[i * n + j];
            }
        }
        cholesky_in_place(&mut gram, n).ok_or_else(|| Error::Structure("cell Gram matrix not positive definite".into()))?;
        // coef <- L^{-1} coef by forward substitution, row by row.
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for m in 0..n {
                let mut s = self.coef[i * n + m];
                for k in 0..i {
                    s -= gram[i * n + k] * out[k * n + m];
                }
                out[i * n + m] = s / gram[i * n + i];
            }
        }
        self.coef = out;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Tabulate derivatives up to `order` (0, 1, 2 or 3) at physical points.
    /// Third order only computes `grad(lap(phi))`.
    pub fn tabulate(&self, points: &[Vec3], order: usize) -> Jets {
        let n = self.len();
        let npts = points.len();
        let mut jets = Jets {
            n,
            npts,
            val: vec![0.0; npts * n],
            grad: if order >= 1 { vec![[0.0; 3]; npts * n] } else { Vec::new() },
            hess: if order >= 2 { vec![[0.0; 6]; npts * n] } else { Vec::new() },
            grad_lap: if order >= 3 { vec![[0.0; 3]; npts * n] } else { Vec::new() },
        };
        let p = self.degree;
        let mut pw = vec![[0.0; 3]; p + 1];
        let mut mono = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        let axes = self.dim;
        for (q, x) in points.iter().enumerate() {
            let mut xi = [0.0; 3];
            for k in 0..axes {
                xi[k] = (x[k] - self.center[k]) * self.inv_half[k];
            }
            for k in 0..3 {
                pw[0][k] = 1.0;
                for e in 1..=p {
                    pw[e][k] = pw[e - 1][k] * xi[k];
                }
            }
            let mut apply = |beta: [u8; 3], out: &mut [f64]| {
                let mut fac = 1.0;
                for k in 0..3 {
                    fac *= self.inv_half[k].powi(beta[k] as i32);
                }
                for (m, a) in self.exps.iter().enumerate() {
                    let mut v = fac;
                    for k in 0..3 {
                        if beta[k] > a[k] {
                            v = 0.0;
                            break;
                        }
                        v *= falling(a[k], beta[k]) * pw[(a[k] - beta[k]) as usize][k];
                    }
                    mono[m] = v;
                }
                for i in 0..n {
                    let row = &self.coef[i * n..(i + 1) * n];
                    out[i] = row.iter().zip(&mono).map(|(c, m)| c * m).sum();
                }
            };
            let base = q * n;
            apply(B0, &mut tmp);
            jets.val[base..base + n].copy_from_slice(&tmp);
            if order >= 1 {
                for (k, beta) in B1.iter().enumerate().take(axes) {
                    apply(*beta, &mut tmp);
                    for i in 0..n {
                        jets.grad[base + i][k] = tmp[i];
                    }
                }
            }
            if order >= 2 {
                for (k, beta) in B2.iter().enumerate() {
                    if axes == 2 && beta[2] > 0 {
                        continue;
                    }
                    apply(*beta, &mut tmp);
                    for i in 0..n {
                        jets.hess[base + i][k] = tmp[i];
                    }
                }
            }
            if order >= 3 {
                for (k, row) in B3.iter().enumerate().take(axes) {
                    for beta in row {
                        if axes == 2 && beta[2] > 0 {
                            continue;
                        }
                        apply(*beta, &mut tmp);
                        for i in 0..n {
                            jets.grad_lap[base + i][k] += tmp[i];
                        }
                    }
                }
            }
        }
        jets
    }
}

/// Value and curl powers of a vector basis function at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VJet {
    pub val: Vec3,
    pub curl: Vec3,
    pub curl2: Vec3,
    pub curl3: Vec3,
}

fn unit(c: usize) -> Vec3 {
    let mut e = [0.0; 3];
    e[c] = 1.0;
    e
}

/// Vector jets of the product space `(span phi)^dim`; function `c * n + i`
/// is `phi_i e_c`. Entry `[q * dim * n + f]`.
pub fn vector_jets(jets: &Jets, dim: usize) -> Vec<VJet> {
    let n = jets.n;
    let nf = dim * n;
    let mut out = vec![VJet::default(); jets.npts * nf];
    for q in 0..jets.npts {
        for i in 0..n {
            let s = q * n + i;
            let g = jets.grad[s];
            let h = jets.hess[s];
            let gl = jets.grad_lap[s];
            let lap = h[0] + h[1] + h[2];
            // columns of the Hessian
            let hcol = [[h[0], h[3], h[4]], [h[3], h[1], h[5]], [h[4], h[5], h[2]]];
            for c in 0..dim {
                let e = unit(c);
                let mut curl2 = hcol[c];
                curl2[c] -= lap;
                out[q * nf + c * n + i] = VJet {
                    val: { let mut v = [0.0; 3]; v[c] = jets.val[s]; v },
                    curl: cross(g, e),
                    curl2,
                    curl3: cross(e, gl),
                };
            }
        }
    }
    out
}

/// Vector DG space of one reference cell with its curl evaluators.
#[derive(Clone, Debug)]
pub struct ElementBasis {
    pub kind: CellKind,
    scalar: ScalarBasis,
}

impl ElementBasis {
    /// Orthonormal basis of `(P_p)^d` (simplices) or `(Q_p)^2` (the square
    /// `[-1,1]^2`) on the reference cell.
    pub fn reference(kind: CellKind, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidArgument(format!("degree {p} < 2")));
        }
        let (shape, space, lo, hi) = match kind {
            CellKind::Triangle => (RefShape::Triangle, SpaceKind::TotalDegree, [0.0; 3], [1.0, 1.0, 0.0]),
            CellKind::Tetrahedron => (RefShape::Tetrahedron, SpaceKind::TotalDegree, [0.0; 3], [1.0; 3]),
            CellKind::Quadrilateral => (RefShape::Quadrilateral, SpaceKind::Tensor, [-1.0, -1.0, 0.0], [1.0, 1.0, 0.0]),
        };
        let rule = quadrature_rule(shape, 2 * p)?;
        let scalar = ScalarBasis::orthonormal(kind.dim(), space, p, lo, hi, &rule.points, &rule.weights)?;
        Ok(Self { kind, scalar })
    }

    pub fn degree(&self) -> usize {
        self.scalar.degree()
    }

    pub fn n_funcs(&self) -> usize {
        self.kind.dim() * self.scalar.len()
    }

    /// Value, curl, curl^2 and curl^3 of every function at every point;
    /// entry `[q * n_funcs + f]`.
    pub fn evaluate(&self, points: &[Vec3]) -> Vec<VJet> {
        vector_jets(&self.scalar.tabulate(points, 3), self.kind.dim())
    }
}

/// L2-orthonormal modal basis of `(P_p)^dim` on the reference simplex.
pub fn simplex_modal_basis(p: usize, dim: usize) -> Result<ElementBasis> {
    match dim {
        2 => ElementBasis::reference(CellKind::Triangle, p),
        3 => ElementBasis::reference(CellKind::Tetrahedron, p),
        _ => Err(Error::InvalidArgument(format!("dimension {dim}"))),
    }
}
