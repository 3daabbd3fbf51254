//! Affine simplicial and quadrilateral meshes with oriented faces, including
//! 1-irregular hanging-node meshes in 2D.

mod io;
mod refine;
mod structured;

pub use io::{read_mesh, write_mesh};
pub use refine::{build_hanging_mesh, refine_uniform, HangingRefinement};
pub use structured::{build_structured_mesh, Domain};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{self, Vec3};
use crate::polyspace::quadrature::{quadrature_rule, RefShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Triangle,
    Quadrilateral,
    Tetrahedron,
}

impl CellKind {
    pub fn dim(self) -> usize {
        match self {
            CellKind::Triangle | CellKind::Quadrilateral => 2,
            CellKind::Tetrahedron => 3,
        }
    }

    pub fn n_vertices(self) -> usize {
        match self {
            CellKind::Triangle => 3,
            CellKind::Quadrilateral | CellKind::Tetrahedron => 4,
        }
    }

    /// Local vertex lists of the facets. Quadrilateral vertices are stored
    /// counterclockwise, so facet `k` joins vertices `k` and `k+1`.
    pub fn facets(self) -> &'static [&'static [usize]] {
        match self {
            CellKind::Triangle => &[&[0, 1], &[1, 2], &[2, 0]],
            CellKind::Quadrilateral => &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
            CellKind::Tetrahedron => &[&[1, 2, 3], &[0, 2, 3], &[0, 1, 3], &[0, 1, 2]],
        }
    }

    pub fn ref_shape(self) -> RefShape {
        match self {
            CellKind::Triangle => RefShape::Triangle,
            CellKind::Quadrilateral => RefShape::Quadrilateral,
            CellKind::Tetrahedron => RefShape::Tetrahedron,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CellKind::Triangle => "triangle",
            CellKind::Quadrilateral => "quadrilateral",
            CellKind::Tetrahedron => "tetrahedron",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "triangle" | "tri" => Some(CellKind::Triangle),
            "quadrilateral" | "quad" => Some(CellKind::Quadrilateral),
            "tetrahedron" | "tet" => Some(CellKind::Tetrahedron),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub kind: CellKind,
    pub vertices: Vec<usize>,
    /// Diameter: largest vertex-to-vertex distance.
    pub h: f64,
    /// Polynomial degree `p_K`.
    pub degree: usize,
    /// Refinement depth relative to the initial mesh.
    pub level: u32,
    pub measure: f64,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub plus: usize,
    pub minus: Option<usize>,
    /// Unit normal pointing out of `plus` (into `minus`).
    pub normal: Vec3,
    pub measure: f64,
    /// `max(h_plus, h_minus)`.
    pub h: f64,
    /// `min(p_plus, p_minus)`.
    pub degree: usize,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }

    /// `(cell, outward normal)` for each adjacent cell, plus side first.
    pub fn sides(&self) -> impl Iterator<Item = (usize, Vec3)> + '_ {
        std::iter::once((self.plus, self.normal)).chain(self.minus.map(|m| (m, geom::scale(-1.0, self.normal))))
    }
}

/// A coarse edge whose neighbor side was refined once: the edge `ends`
/// carries the hanging vertex `mid`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HangingEdge {
    pub coarse_cell: usize,
    pub ends: [usize; 2],
    pub mid: usize,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub dim: usize,
    pub vertices: Vec<Vec3>,
    pub cells: Vec<Cell>,
    pub faces: Vec<Face>,
    pub hanging: Vec<HangingEdge>,
}

/// `(h_f, p_f)` for a face from its adjacent cells' `(h_K, p_K)`.
pub fn face_parameters(plus: (f64, usize), minus: Option<(f64, usize)>) -> (f64, usize) {
    match minus {
        Some((h, p)) => (plus.0.max(h), plus.1.min(p)),
        None => plus,
    }
}

fn vertex_key(v: Vec3) -> [u64; 3] {
    // +0.0 and -0.0 must coincide
    v.map(|c| if c == 0.0 { 0 } else { c.to_bits() })
}

pub(crate) fn midpoint(a: Vec3, b: Vec3) -> Vec3 {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

impl Mesh {
    /// Build a mesh from vertices and cell vertex lists, computing cell
    /// geometry and the face structure. All cells get degree `degree` and the
    /// given levels (zero when `levels` is `None`).
    pub fn from_cells(
        dim: usize,
        vertices: Vec<Vec3>,
        kind: CellKind,
        cell_vertices: Vec<Vec<usize>>,
        degree: usize,
        levels: Option<Vec<u32>>,
    ) -> Result<Self> {
        if kind.dim() != dim {
            return Err(Error::Unsupported(format!("{} cells in dimension {dim}", kind.name())));
        }
        let mut cells = Vec::with_capacity(cell_vertices.len());
        for (id, vs) in cell_vertices.into_iter().enumerate() {
            if vs.len() != kind.n_vertices() {
                return Err(Error::Structure(format!("cell {id} has {} vertices", vs.len())));
            }
            if let Some(bad) = vs.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Structure(format!("cell {id} references missing vertex {bad}")));
            }
            let pts: Vec<Vec3> = vs.iter().map(|&v| vertices[v]).collect();
            let measure = cell_measure(kind, &pts);
            if !(measure > 1e-14 * diameter(&pts).powi(dim as i32)) {
                return Err(Error::DegenerateCell { cell: id, measure });
            }
            let level = levels.as_ref().map_or(0, |l| l[id]);
            cells.push(Cell { kind, h: diameter(&pts), vertices: vs, degree, level, measure });
        }
        let mut mesh = Mesh { dim, vertices, cells, faces: Vec::new(), hanging: Vec::new() };
        mesh.build_faces()?;
        Ok(mesh)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn kind(&self) -> CellKind {
        self.cells[0].kind
    }

    pub fn cell_points(&self, c: usize) -> Vec<Vec3> {
        self.cells[c].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn boundary_tags(&self) -> Vec<bool> {
        self.faces.iter().map(Face::is_boundary).collect()
    }

    pub fn measure(&self) -> f64 {
        self.cells.iter().map(|c| c.measure).sum()
    }

    /// Largest cell diameter.
    pub fn h_max(&self) -> f64 {
        self.cells.iter().map(|c| c.h).fold(0.0, f64::max)
    }

    pub fn min_degree(&self) -> usize {
        self.cells.iter().map(|c| c.degree).min().unwrap_or(0)
    }

    pub fn is_conforming(&self) -> bool {
        self.hanging.is_empty()
    }

    /// Assign a uniform polynomial degree and refresh face degrees.
    pub fn set_degree(&mut self, p: usize) {
        for c in &mut self.cells {
            c.degree = p;
        }
        self.refresh_face_parameters();
    }

    pub fn refresh_face_parameters(&mut self) {
        for f in &mut self.faces {
            let plus = &self.cells[f.plus];
            let minus = f.minus.map(|m| (self.cells[m].h, self.cells[m].degree));
            let (h, p) = face_parameters((plus.h, plus.degree), minus);
            f.h = h;
            f.degree = p;
        }
    }

    pub fn vertex_lookup(&self) -> HashMap<[u64; 3], usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (vertex_key(*v), i)).collect()
    }

    /// Affine map of the cell: physical point of a reference point, and the
    /// absolute Jacobian determinant.
    pub fn cell_map(&self, c: usize) -> (Vec3, [Vec3; 3], f64) {
        let cell = &self.cells[c];
        let p = self.cell_points(c);
        match cell.kind {
            CellKind::Triangle => {
                let e1 = geom::sub(p[1], p[0]);
                let e2 = geom::sub(p[2], p[0]);
                (p[0], [e1, e2, [0.0; 3]], geom::norm(geom::cross(e1, e2)))
            }
            CellKind::Quadrilateral => {
                // x = center + e1 xi + e2 eta on [-1,1]^2 (parallelogram)
                let e1 = geom::scale(0.5, geom::sub(p[1], p[0]));
                let e2 = geom::scale(0.5, geom::sub(p[3], p[0]));
                let center = geom::add(p[0], geom::add(e1, e2));
                (center, [e1, e2, [0.0; 3]], geom::norm(geom::cross(e1, e2)))
            }
            CellKind::Tetrahedron => {
                let e1 = geom::sub(p[1], p[0]);
                let e2 = geom::sub(p[2], p[0]);
                let e3 = geom::sub(p[3], p[0]);
                (p[0], [e1, e2, e3], geom::dot(geom::cross(e1, e2), e3).abs())
            }
        }
    }

    /// Physical quadrature points and weights on cell `c`, exact to degree `q`.
    pub fn cell_quadrature(&self, c: usize, q: usize) -> Result<(Vec<Vec3>, Vec<f64>)> {
        let rule = quadrature_rule(self.cells[c].kind.ref_shape(), q)?;
        let (origin, axes, det) = self.cell_map(c);
        let pts = rule
            .points
            .iter()
            .map(|r| {
                let mut x = origin;
                for k in 0..3 {
                    x = geom::add(x, geom::scale(r[k], axes[k]));
                }
                x
            })
            .collect();
        let w = rule.weights.iter().map(|w| w * det).collect();
        Ok((pts, w))
    }

    /// Physical quadrature points and weights on face `f`, exact to degree `q`.
    pub fn face_quadrature(&self, f: usize, q: usize) -> Result<(Vec<Vec3>, Vec<f64>)> {
        let face = &self.faces[f];
        let p: Vec<Vec3> = face.vertices.iter().map(|&v| self.vertices[v]).collect();
        if self.dim == 2 {
            let rule = quadrature_rule(RefShape::Interval, q)?;
            let half = 0.5 * face.measure;
            let pts = rule.points.iter().map(|r| geom::add(p[0], geom::scale(0.5 * (r[0] + 1.0), geom::sub(p[1], p[0])))).collect();
            Ok((pts, rule.weights.iter().map(|w| w * half).collect()))
        } else {
            let rule = quadrature_rule(RefShape::Triangle, q)?;
            let e1 = geom::sub(p[1], p[0]);
            let e2 = geom::sub(p[2], p[0]);
            let pts = rule.points.iter().map(|r| geom::add(p[0], geom::add(geom::scale(r[0], e1), geom::scale(r[1], e2)))).collect();
            Ok((pts, rule.weights.iter().map(|w| w * 2.0 * face.measure).collect()))
        }
    }

    /// Axis-aligned bounding box of a cell.
    pub fn cell_bbox(&self, c: usize) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in self.cell_points(c) {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    fn make_face(&self, vertices: Vec<usize>, a: usize, b: Option<usize>) -> Face {
        let (plus, minus) = match b {
            Some(b) if b < a => (b, Some(a)),
            other => (a, other),
        };
        let p: Vec<Vec3> = vertices.iter().map(|&v| self.vertices[v]).collect();
        let (mut normal, measure) = if self.dim == 2 {
            let t = geom::sub(p[1], p[0]);
            let len = geom::norm(t);
            ([t[1] / len, -t[0] / len, 0.0], len)
        } else {
            let n = geom::cross(geom::sub(p[1], p[0]), geom::sub(p[2], p[0]));
            let len = geom::norm(n);
            (geom::scale(1.0 / len, n), 0.5 * len)
        };
        let outward = geom::sub(geom::centroid(&p), geom::centroid(&self.cell_points(plus)));
        if geom::dot(normal, outward) < 0.0 {
            normal = geom::scale(-1.0, normal);
        }
        let (h, degree) = face_parameters(
            (self.cells[plus].h, self.cells[plus].degree),
            minus.map(|m| (self.cells[m].h, self.cells[m].degree)),
        );
        Face { vertices, plus, minus, normal, measure, h, degree }
    }

    /// Rebuild faces from cell connectivity. Facets shared by two cells become
    /// interior faces; in 2D a facet whose midpoint is a vertex and whose two
    /// halves belong to other cells is split into two sub-faces.
    pub(crate) fn build_faces(&mut self) -> Result<()> {
        let mut owners: HashMap<Vec<usize>, Vec<(usize, Vec<usize>)>> = HashMap::new();
        for (c, cell) in self.cells.iter().enumerate() {
            for facet in cell.kind.facets() {
                let vs: Vec<usize> = facet.iter().map(|&l| cell.vertices[l]).collect();
                let mut key = vs.clone();
                key.sort_unstable();
                owners.entry(key).or_default().push((c, vs));
            }
        }
        let mut keys: Vec<&Vec<usize>> = owners.keys().collect();
        keys.sort();
        let lookup = self.vertex_lookup();
        let mut faces = Vec::new();
        let mut hanging = Vec::new();
        let mut consumed: std::collections::HashSet<Vec<usize>> = Default::default();
        let mut singles = Vec::new();
        for key in keys {
            let own = &owners[key];
            match own.len() {
                2 => faces.push(self.make_face(own[0].1.clone(), own[0].0, Some(own[1].0))),
                1 => singles.push(key.clone()),
                n => return Err(Error::Structure(format!("facet {key:?} shared by {n} cells"))),
            }
        }
        if self.dim == 2 {
            for key in &singles {
                let (a, b) = (key[0], key[1]);
                let Some(&m) = lookup.get(&vertex_key(midpoint(self.vertices[a], self.vertices[b]))) else {
                    continue;
                };
                let half = |u: usize, v: usize| {
                    let mut k = vec![u, v];
                    k.sort_unstable();
                    k
                };
                let (ka, kb) = (half(a, m), half(m, b));
                let fine_a = owners.get(&ka).filter(|o| o.len() == 1);
                let fine_b = owners.get(&kb).filter(|o| o.len() == 1);
                if let (Some(fa), Some(fb)) = (fine_a, fine_b) {
                    let coarse = owners[key][0].0;
                    faces.push(self.make_face(fa[0].1.clone(), coarse, Some(fa[0].0)));
                    faces.push(self.make_face(fb[0].1.clone(), coarse, Some(fb[0].0)));
                    consumed.insert(key.clone());
                    consumed.insert(ka);
                    consumed.insert(kb);
                    hanging.push(HangingEdge { coarse_cell: coarse, ends: [a, b], mid: m });
                }
            }
        }
        for key in singles {
            if !consumed.contains(&key) {
                let (c, vs) = owners[&key][0].clone();
                faces.push(self.make_face(vs, c, None));
            }
        }
        faces.sort_by(|x, y| (x.plus, x.minus.unwrap_or(usize::MAX), &x.vertices).cmp(&(y.plus, y.minus.unwrap_or(usize::MAX), &y.vertices)));
        self.faces = faces;
        self.hanging = hanging;
        Ok(())
    }
}

fn diameter(p: &[Vec3]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            d = d.max(geom::dist(p[i], p[j]));
        }
    }
    d
}

fn cell_measure(kind: CellKind, p: &[Vec3]) -> f64 {
    match kind {
        CellKind::Triangle => 0.5 * geom::norm(geom::cross(geom::sub(p[1], p[0]), geom::sub(p[2], p[0]))),
        CellKind::Quadrilateral => {
            0.5 * geom::norm(geom::cross(geom::sub(p[1], p[0]), geom::sub(p[2], p[0])))
                + 0.5 * geom::norm(geom::cross(geom::sub(p[2], p[0]), geom::sub(p[3], p[0])))
        }
        CellKind::Tetrahedron => {
            geom::dot(geom::cross(geom::sub(p[1], p[0]), geom::sub(p[2], p[0])), geom::sub(p[3], p[0])).abs() / 6.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_parameter_rule() {
        assert_eq!(face_parameters((0.5, 2), Some((0.25, 3))), (0.5, 2));
        assert_eq!(face_parameters((0.1, 4), None), (0.1, 4));
        assert_eq!(face_parameters((0.2, 3), Some((0.2, 3))), (0.2, 3));
    }

    #[test]
    fn degenerate_cell_reports_id() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0, 0.0, 0.0]];
        let err = Mesh::from_cells(2, v, CellKind::Triangle, vec![vec![0, 1, 2], vec![0, 1, 3]], 2, None).unwrap_err();
        assert!(matches!(err, Error::DegenerateCell { cell: 1, .. }));
    }

    #[test]
    fn single_triangle_faces_are_outward() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let m = Mesh::from_cells(2, v, CellKind::Triangle, vec![vec![0, 1, 2]], 2, None).unwrap();
        assert_eq!(m.faces.len(), 3);
        for f in &m.faces {
            assert!(f.is_boundary());
            let mid = geom::centroid(&f.vertices.iter().map(|&i| m.vertices[i]).collect::<Vec<_>>());
            assert!(geom::dot(f.normal, geom::sub(mid, [1.0 / 3.0, 1.0 / 3.0, 0.0])) > 0.0);
        }
    }
}
