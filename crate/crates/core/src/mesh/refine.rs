//! Red refinement: uniform, and selective with 1-irregular closure.

use std::collections::{BTreeSet, HashMap};

use super::{midpoint, vertex_key, CellKind, Mesh};
use crate::error::{Error, Result};
use crate::geom::Vec3;

struct VertexPool {
    vertices: Vec<Vec3>,
    lookup: HashMap<[u64; 3], usize>,
}

impl VertexPool {
    fn new(mesh: &Mesh) -> Self {
        Self { vertices: mesh.vertices.clone(), lookup: mesh.vertex_lookup() }
    }

    fn mid(&mut self, a: usize, b: usize) -> usize {
        let p = midpoint(self.vertices[a], self.vertices[b]);
        let key = vertex_key(p);
        if let Some(&v) = self.lookup.get(&key) {
            return v;
        }
        self.vertices.push(p);
        self.lookup.insert(key, self.vertices.len() - 1);
        self.vertices.len() - 1
    }
}

fn children(kind: CellKind, v: &[usize], pool: &mut VertexPool) -> Result<Vec<Vec<usize>>> {
    match kind {
        CellKind::Triangle => {
            let (a, b, c) = (v[0], v[1], v[2]);
            let ab = pool.mid(a, b);
            let bc = pool.mid(b, c);
            let ca = pool.mid(c, a);
            Ok(vec![vec![a, ab, ca], vec![ab, b, bc], vec![ca, bc, c], vec![ab, bc, ca]])
        }
        CellKind::Quadrilateral => {
            let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
            let ab = pool.mid(a, b);
            let bc = pool.mid(b, c);
            let cd = pool.mid(c, d);
            let da = pool.mid(d, a);
            let ctr = pool.mid(a, c);
            Ok(vec![vec![a, ab, ctr, da], vec![ab, b, bc, ctr], vec![ctr, bc, c, cd], vec![da, ctr, cd, d]])
        }
        CellKind::Tetrahedron => Err(Error::Unsupported("tetrahedral refinement".into())),
    }
}

fn refine_cells(mesh: &Mesh, marked: &BTreeSet<usize>) -> Result<Mesh> {
    let mut pool = VertexPool::new(mesh);
    let mut cells = Vec::new();
    let mut levels = Vec::new();
    let mut degrees = Vec::new();
    for (id, cell) in mesh.cells.iter().enumerate() {
        if marked.contains(&id) {
            for child in children(cell.kind, &cell.vertices, &mut pool)? {
                cells.push(child);
                levels.push(cell.level + 1);
                degrees.push(cell.degree);
            }
        } else {
            cells.push(cell.vertices.clone());
            levels.push(cell.level);
            degrees.push(cell.degree);
        }
    }
    let mut out = Mesh::from_cells(mesh.dim, pool.vertices, mesh.kind(), cells, 0, Some(levels))?;
    for (c, p) in out.cells.iter_mut().zip(degrees) {
        c.degree = p;
    }
    out.refresh_face_parameters();
    Ok(out)
}

/// Split every cell into four children; the input must be conforming.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    if !mesh.is_conforming() {
        return Err(Error::Unsupported("uniform refinement of a hanging-node mesh".into()));
    }
    refine_cells(mesh, &(0..mesh.n_cells()).collect())
}

#[derive(Clone, Debug)]
pub struct HangingRefinement {
    pub mesh: Mesh,
    /// Cells added to the marking to keep the mesh 1-irregular.
    pub closure: Vec<usize>,
}

/// Refine the marked cells (red refinement), first extending the marking
/// so that no face separates cells whose levels differ by more than one.
pub fn build_hanging_mesh(mesh: &Mesh, marked: &[usize]) -> Result<HangingRefinement> {
    if mesh.dim != 2 {
        return Err(Error::Unsupported("hanging-node refinement is planar only".into()));
    }
    if let Some(bad) = marked.iter().find(|&&c| c >= mesh.n_cells()) {
        return Err(Error::InvalidArgument(format!("marked cell {bad} does not exist")));
    }
    let mut neighbors = vec![Vec::new(); mesh.n_cells()];
    for f in &mesh.faces {
        if let Some(m) = f.minus {
            neighbors[f.plus].push(m);
            neighbors[m].push(f.plus);
        }
    }
    let mut set: BTreeSet<usize> = marked.iter().copied().collect();
    let mut closure = Vec::new();
    let mut stack: Vec<usize> = set.iter().copied().collect();
    while let Some(c) = stack.pop() {
        for &n in &neighbors[c] {
            if mesh.cells[n].level < mesh.cells[c].level && set.insert(n) {
                closure.push(n);
                stack.push(n);
            }
        }
    }
    closure.sort_unstable();
    if set.is_empty() {
        return Ok(HangingRefinement { mesh: mesh.clone(), closure });
    }
    Ok(HangingRefinement { mesh: refine_cells(mesh, &set)?, closure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Domain};

    fn square(div: usize) -> Mesh {
        build_structured_mesh(Domain::Square, CellKind::Triangle, div, 2).unwrap()
    }

    #[test]
    fn uniform_refinement_counts() {
        let m = square(2);
        let r = refine_uniform(&m).unwrap();
        assert_eq!(r.n_cells(), 32);
        assert!((r.measure() - m.measure()).abs() < 1e-12);
        assert!((r.h_max() - 0.5 * m.h_max()).abs() < 1e-14);
        let rr = refine_uniform(&r).unwrap();
        assert_eq!(rr.n_cells(), 16 * m.n_cells());
        assert!((rr.h_max() - 0.25 * m.h_max()).abs() < 1e-14);
        assert!(rr.is_conforming());
    }

    #[test]
    fn uniform_refinement_of_quads() {
        let m = build_structured_mesh(Domain::LShape, CellKind::Quadrilateral, 2, 2).unwrap();
        let r = refine_uniform(&m).unwrap();
        assert_eq!(r.n_cells(), 12);
        assert!((r.measure() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_marking_is_identity() {
        let m = square(2);
        let r = build_hanging_mesh(&m, &[]).unwrap();
        assert_eq!(r.mesh.n_cells(), 8);
        assert!(r.closure.is_empty());
    }

    #[test]
    fn single_marked_triangle() {
        let m = square(2);
        // cell 0 = (-1,-1),(0,-1),(0,0): two interior edges
        let r = build_hanging_mesh(&m, &[0]).unwrap();
        assert_eq!(r.mesh.n_cells(), 11);
        assert!(r.closure.is_empty());
        assert_eq!(r.mesh.hanging.len(), 2);
        assert!((r.mesh.measure() - 4.0).abs() < 1e-12);
        // each hanging edge gives two interior sub-faces
        let coarse: Vec<usize> = r.mesh.hanging.iter().map(|h| h.coarse_cell).collect();
        for c in coarse {
            let subs = r.mesh.faces.iter().filter(|f| (f.plus == c || f.minus == Some(c)) && !f.is_boundary()).count();
            assert!(subs >= 2);
        }
    }

    #[test]
    fn uniform_refinement_rejects_hanging_input() {
        let r = build_hanging_mesh(&square(2), &[0]).unwrap();
        assert!(refine_uniform(&r.mesh).is_err());
    }

    #[test]
    fn closure_keeps_one_irregular() {
        let m = square(2);
        let r1 = build_hanging_mesh(&m, &[0]).unwrap().mesh;
        // refine a child that shares a sub-face with a coarse neighbor
        let child = r1
            .faces
            .iter()
            .filter_map(|f| f.minus.map(|m| (f.plus, m)))
            .find_map(|(a, b)| match (r1.cells[a].level, r1.cells[b].level) {
                (0, 1) => Some(b),
                (1, 0) => Some(a),
                _ => None,
            })
            .unwrap();
        let r2 = build_hanging_mesh(&r1, &[child]).unwrap();
        assert!(!r2.closure.is_empty());
        for f in r2.mesh.faces.iter().filter(|f| !f.is_boundary()) {
            let (a, b) = (r2.mesh.cells[f.plus].level, r2.mesh.cells[f.minus.unwrap()].level);
            assert!(a.abs_diff(b) <= 1);
        }
        assert!((r2.mesh.measure() - 4.0).abs() < 1e-12);
    }
}
