//! Plain-text mesh files.
//!
//! ```text
//! # optional comments
//! dim 2
//! vertices 4
//! -1.0000000000000000e0 -1.0000000000000000e0
//! ...
//! cells 2 triangle
//! 0 1 2
//! 0 2 3
//! ```
//!
//! Coordinates are written with 17 significant digits so that reading a
//! written mesh reproduces every vertex bit for bit.

use std::fmt::Write;

use super::{CellKind, Mesh};
use crate::error::{Error, Result};

/// Serialize a mesh. Only vertices and cell connectivity are stored.
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    writeln!(out, "dim {}", mesh.dim).unwrap();
    writeln!(out, "vertices {}", mesh.vertices.len()).unwrap();
    for v in &mesh.vertices {
        let coords: Vec<String> = v[..mesh.dim].iter().map(|c| format!("{c:.16e}")).collect();
        writeln!(out, "{}", coords.join(" ")).unwrap();
    }
    writeln!(out, "cells {} {}", mesh.n_cells(), mesh.kind().name()).unwrap();
    for c in &mesh.cells {
        let ids: Vec<String> = c.vertices.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parse a mesh file. Cells get degree 0 and level 0; call
/// [`Mesh::set_degree`] before assembling.
pub fn read_mesh(src: &str) -> Result<Mesh> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")));

    let header = |line: usize, text: &str, key: &str, extra: usize| -> Result<Vec<String>> {
        let tok: Vec<&str> = text.split_whitespace().collect();
        if tok.first() != Some(&key) || tok.len() != 2 + extra {
            return Err(parse_err(line, format!("expected `{key}` header")));
        }
        Ok(tok[1..].iter().map(|s| s.to_string()).collect())
    };
    let count = |line: usize, s: &str| s.parse::<usize>().map_err(|_| parse_err(line, format!("bad count `{s}`")));

    let (ln, text) = next("dim")?;
    let dim = count(ln, &header(ln, text, "dim", 0)?[0])?;
    if dim != 2 && dim != 3 {
        return Err(parse_err(ln, format!("unsupported dimension {dim}")));
    }

    let (ln, text) = next("vertices")?;
    let nv = count(ln, &header(ln, text, "vertices", 0)?[0])?;
    let mut vertices = Vec::with_capacity(nv.min(1 << 16));
    for _ in 0..nv {
        let (ln, text) = next("vertex coordinates")?;
        let tok: Vec<&str> = text.split_whitespace().collect();
        if tok.len() != dim {
            return Err(parse_err(ln, format!("expected {dim} coordinates, found {}", tok.len())));
        }
        let mut v = [0.0; 3];
        for (k, t) in tok.iter().enumerate() {
            v[k] = t.parse::<f64>().map_err(|_| parse_err(ln, format!("bad coordinate `{t}`")))?;
            if !v[k].is_finite() {
                return Err(parse_err(ln, format!("non-finite coordinate `{t}`")));
            }
        }
        vertices.push(v);
    }

    let (ln, text) = next("cells")?;
    let h = header(ln, text, "cells", 1)?;
    let nc = count(ln, &h[0])?;
    let kind = CellKind::parse(&h[1]).ok_or_else(|| parse_err(ln, format!("unknown cell kind `{}`", h[1])))?;
    if kind.dim() != dim {
        return Err(parse_err(ln, format!("{} cells in a {dim}-dimensional mesh", kind.name())));
    }
    if nc == 0 {
        return Err(parse_err(ln, "mesh has no cells"));
    }
    let mut cells = Vec::with_capacity(nc.min(1 << 16));
    for _ in 0..nc {
        let (ln, text) = next("cell vertex indices")?;
        let ids = text
            .split_whitespace()
            .map(|t| count(ln, t))
            .collect::<Result<Vec<usize>>>()?;
        if ids.len() != kind.n_vertices() {
            return Err(parse_err(ln, format!("expected {} vertex indices, found {}", kind.n_vertices(), ids.len())));
        }
        if let Some(bad) = ids.iter().find(|&&i| i >= nv) {
            return Err(parse_err(ln, format!("vertex index {bad} out of range")));
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(parse_err(ln, "repeated vertex in cell"));
        }
        cells.push(ids);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content after cells"));
    }
    Mesh::from_cells(dim, vertices, kind, cells, 0, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Domain};

    #[test]
    fn roundtrip_is_bit_exact() {
        for (domain, kind, n) in [
            (Domain::Square, CellKind::Triangle, 6),
            (Domain::LShape, CellKind::Quadrilateral, 4),
            (Domain::Cube, CellKind::Tetrahedron, 1),
        ] {
            let m = build_structured_mesh(domain, kind, n, 2).unwrap();
            let text = write_mesh(&m);
            let back = read_mesh(&text).unwrap();
            assert_eq!(back.vertices.len(), m.vertices.len());
            for (a, b) in m.vertices.iter().zip(&back.vertices) {
                for k in 0..3 {
                    assert_eq!(a[k].to_bits(), b[k].to_bits());
                }
            }
            assert_eq!(back.faces.len(), m.faces.len());
            assert_eq!(write_mesh(&back), text);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let src = "# unit triangle\ndim 2\n\nvertices 3\n0 0\n1 0 # right corner\n0 1\ncells 1 triangle\n0 1 2\n";
        let m = read_mesh(src).unwrap();
        assert_eq!(m.n_cells(), 1);
        assert!((m.measure() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "dim 2\nvertices 3\n0 0\n1 x\n0 1\ncells 1 triangle\n0 1 2\n";
        match read_mesh(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let bad = "dim 2\nvertices 3\n0 0\n1 0\n0 1\ncells 1 triangle\n0 1 7\n";
        assert!(matches!(read_mesh(bad), Err(Error::Parse { line: 7, .. })));
        assert!(read_mesh("dim 4\n").is_err());
        assert!(read_mesh("dim 2\nvertices 3\n0 0\n").is_err());
        assert!(read_mesh("dim 2\nvertices 1\n0 0\ncells 1 tetrahedron\n0 0 0 0\n").is_err());
    }

    #[test]
    fn degenerate_cell_rejected() {
        let src = "dim 2\nvertices 3\n0 0\n1 0\n2 0\ncells 1 triangle\n0 1 2\n";
        assert!(matches!(read_mesh(src), Err(Error::DegenerateCell { cell: 0, .. })));
    }
}
