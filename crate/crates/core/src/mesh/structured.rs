//! Uniform grids on the squares `(-1,1)^2` and `(0,1)^2`, the L-shape
//! `(-1,1)^2 \ (-1,0]x[0,1)` and the cube `(-1,1)^3`.

use super::{CellKind, Mesh};
use crate::error::{Error, Result};
use crate::geom::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Square,
    UnitSquare,
    LShape,
    Cube,
}

impl Domain {
    pub fn measure(self) -> f64 {
        match self {
            Domain::Square => 4.0,
            Domain::UnitSquare => 1.0,
            Domain::LShape => 3.0,
            Domain::Cube => 8.0,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Domain::Square | Domain::UnitSquare | Domain::LShape => 2,
            Domain::Cube => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Square => "square",
            Domain::UnitSquare => "unit-square",
            Domain::LShape => "lshape",
            Domain::Cube => "cube",
        }
    }

    /// Side length of one grid cell for `divisions` cells per side.
    pub fn spacing(self, divisions: usize) -> f64 {
        let side = if self == Domain::UnitSquare { 1.0 } else { 2.0 };
        side / divisions as f64
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "square" => Some(Domain::Square),
            "unit-square" => Some(Domain::UnitSquare),
            "lshape" => Some(Domain::LShape),
            "cube" => Some(Domain::Cube),
            _ => None,
        }
    }
}

/// Uniform mesh with `divisions` cells along each side of the domain, so the
/// grid spacing is `Domain::spacing(divisions)`. Squares are split along the `(1,1)`
/// diagonal; cubes are split into six tetrahedra sharing the main diagonal.
/// Every cell gets degree `degree`.
pub fn build_structured_mesh(domain: Domain, kind: CellKind, divisions: usize, degree: usize) -> Result<Mesh> {
    if divisions == 0 {
        return Err(Error::InvalidArgument("divisions must be at least 1".into()));
    }
    let supported = matches!(
        (domain, kind),
        (Domain::Square | Domain::UnitSquare | Domain::LShape, CellKind::Triangle | CellKind::Quadrilateral) | (Domain::Cube, CellKind::Tetrahedron)
    );
    if !supported {
        return Err(Error::Unsupported(format!("{} mesh of {} cells", domain.name(), kind.name())));
    }
    if domain == Domain::LShape && divisions % 2 != 0 {
        return Err(Error::InvalidArgument("L-shape needs an even number of divisions".into()));
    }
    let n = divisions;
    let unit = domain == Domain::UnitSquare;
    let coord = move |i: usize| if unit { i as f64 / n as f64 } else { (2.0 * i as f64 - n as f64) / n as f64 };
    if domain == Domain::Cube {
        return cube(n, coord, degree);
    }
    let removed = |i: usize, j: usize| domain == Domain::LShape && 2 * i < n && 2 * j >= n;
    let mut index = vec![usize::MAX; (n + 1) * (n + 1)];
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut cells = Vec::new();
    let mut vid = |i: usize, j: usize, vertices: &mut Vec<Vec3>| {
        let k = j * (n + 1) + i;
        if index[k] == usize::MAX {
            index[k] = vertices.len();
            vertices.push([coord(i), coord(j), 0.0]);
        }
        index[k]
    };
    for j in 0..n {
        for i in 0..n {
            if removed(i, j) {
                continue;
            }
            let v00 = vid(i, j, &mut vertices);
            let v10 = vid(i + 1, j, &mut vertices);
            let v11 = vid(i + 1, j + 1, &mut vertices);
            let v01 = vid(i, j + 1, &mut vertices);
            match kind {
                CellKind::Triangle => {
                    cells.push(vec![v00, v10, v11]);
                    cells.push(vec![v00, v11, v01]);
                }
                _ => cells.push(vec![v00, v10, v11, v01]),
            }
        }
    }
    Mesh::from_cells(2, vertices, kind, cells, degree, None)
}

fn cube(n: usize, coord: impl Fn(usize) -> f64, degree: usize) -> Result<Mesh> {
    let id = |i: usize, j: usize, k: usize| (k * (n + 1) + j) * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([coord(i), coord(j), coord(k)]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut at = [i, j, k];
                    let mut tet = vec![id(at[0], at[1], at[2])];
                    for axis in perm {
                        at[axis] += 1;
                        tet.push(id(at[0], at[1], at[2]));
                    }
                    cells.push(tet);
                }
            }
        }
    }
    Mesh::from_cells(3, vertices, CellKind::Tetrahedron, cells, degree, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_triangles() {
        let m = build_structured_mesh(Domain::Square, CellKind::Triangle, 2, 2).unwrap();
        assert_eq!(m.n_cells(), 8);
        assert_eq!(m.vertices.len(), 9);
        assert!((m.measure() - 4.0).abs() < 1e-12);
        assert_eq!(m.faces.len(), 16);
        assert_eq!(m.faces.iter().filter(|f| f.is_boundary()).count(), 8);
    }

    #[test]
    fn unit_square_quads() {
        let m = build_structured_mesh(Domain::UnitSquare, CellKind::Quadrilateral, 4, 2).unwrap();
        assert_eq!(m.n_cells(), 16);
        assert!((m.measure() - 1.0).abs() < 1e-12);
        assert!((Domain::UnitSquare.spacing(4) - 0.25).abs() < 1e-15);
        assert!(m.vertices.iter().all(|v| (0.0..=1.0).contains(&v[0]) && (0.0..=1.0).contains(&v[1])));
        assert!((m.h_max() - 0.25 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn cube_six_tetrahedra() {
        let m = build_structured_mesh(Domain::Cube, CellKind::Tetrahedron, 1, 2).unwrap();
        assert_eq!(m.n_cells(), 6);
        assert_eq!(m.vertices.len(), 8);
        assert!((m.measure() - 8.0).abs() < 1e-12);
        // 12 boundary triangles + 6 interior faces around the diagonal
        assert_eq!(m.faces.iter().filter(|f| f.is_boundary()).count(), 12);
        assert_eq!(m.faces.len(), 18);
        for c in &m.cells {
            assert!((c.h - 2.0 * 3f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn lshape_triangles() {
        let m = build_structured_mesh(Domain::LShape, CellKind::Triangle, 2, 2).unwrap();
        assert_eq!(m.n_cells(), 6);
        assert!((m.measure() - 3.0).abs() < 1e-12);
        // no vertex in the open removed quadrant
        assert!(m.vertices.iter().all(|v| !(v[0] < 0.0 && v[1] > 0.0)));
    }

    #[test]
    fn unsupported_combinations() {
        assert!(build_structured_mesh(Domain::LShape, CellKind::Tetrahedron, 2, 2).is_err());
        assert!(build_structured_mesh(Domain::Cube, CellKind::Triangle, 2, 2).is_err());
        assert!(build_structured_mesh(Domain::Square, CellKind::Triangle, 0, 2).is_err());
    }

    #[test]
    fn interior_faces_have_two_cells_and_opposite_normals() {
        let m = build_structured_mesh(Domain::Cube, CellKind::Tetrahedron, 2, 2).unwrap();
        assert!((m.measure() - 8.0).abs() < 1e-12);
        for f in m.faces.iter().filter(|f| !f.is_boundary()) {
            let minus = f.minus.unwrap();
            assert!(f.plus < minus);
            let cm = crate::geom::centroid(&m.cell_points(minus));
            let cp = crate::geom::centroid(&m.cell_points(f.plus));
            assert!(crate::geom::dot(f.normal, crate::geom::sub(cm, cp)) > 0.0);
        }
    }
}
