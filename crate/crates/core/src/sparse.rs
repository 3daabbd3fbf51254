//! Compressed sparse row matrices with deterministic assembly, plus the
//! coordinate text dump format.
//!
//! ```text
//! %%sym 3 4
//! 0 0 2.0000000000000000e0
//! ...
//! ```
//!
//! The header carries the dimension and the number of stored entries; `%%sym`
//! is written for square matrices, `%%gen rows cols nnz` otherwise.

use std::fmt::Write;

use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    /// Duplicates are summed in input order, so equal inputs give bitwise
    /// equal matrices.
    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        assert!(t.iter().all(|&(i, j, _)| i < nrows && j < ncols), "triplet out of range");
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut data: Vec<f64> = Vec::with_capacity(t.len());
        let mut last = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                data.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        Self { nrows, ncols, indptr, indices, data }
    }

    /// Wrap raw CSR arrays; column indices must be sorted within rows.
    pub(crate) fn from_raw(nrows: usize, ncols: usize, indptr: Vec<usize>, indices: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(indptr.len(), nrows + 1);
        debug_assert_eq!(indices.len(), data.len());
        Self { nrows, ncols, indptr, indices, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.data[r].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.data[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `self^T x`
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                y[j] += v * x[i];
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(i, j, v)| (j, i, v)).collect())
    }

    /// `a * self + b * other`
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let t = self.triplets().map(|(i, j, v)| (i, j, a * v)).chain(other.triplets().map(|(i, j, v)| (i, j, b * v))).collect();
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |X - X^T| / max |X|`.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let diff = self.lin_comb(1.0, &self.transpose(), -1.0);
        diff.max_abs() / scale
    }

    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matvec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    pub fn to_faer(&self) -> SparseColMat<usize, f64> {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t).expect("valid sparse structure")
    }

    /// Stack `[[a, b^T], [b, c]]` where `c` may be absent (zero block).
    pub fn saddle(a: &Self, b: &Self, c: Option<&Self>) -> Self {
        let n = a.nrows;
        let m = b.nrows;
        let mut t: Vec<_> = a.triplets().collect();
        for (i, j, v) in b.triplets() {
            t.push((n + i, j, v));
            t.push((j, n + i, v));
        }
        if let Some(c) = c {
            t.extend(c.triplets().map(|(i, j, v)| (n + i, n + j, v)));
        }
        Self::from_triplets(n + m, n + m, t)
    }

    pub fn write_dump(&self) -> String {
        let mut out = String::new();
        if self.nrows == self.ncols {
            writeln!(out, "%%sym {} {}", self.nrows, self.nnz()).unwrap();
        } else {
            writeln!(out, "%%gen {} {} {}", self.nrows, self.ncols, self.nnz()).unwrap();
        }
        for (i, j, v) in self.triplets() {
            writeln!(out, "{i} {j} {v:.16e}").unwrap();
        }
        out
    }

    /// Parse a dump written by [`CsrMatrix::write_dump`]. Dimensions above
    /// [`MAX_DUMP_DIM`] are rejected.
    pub fn read_dump(src: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (ln, head) = lines.next().ok_or_else(|| err(0, "empty matrix dump".into()))?;
        let tok: Vec<&str> = head.split_whitespace().collect();
        let num = |line: usize, s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad integer `{s}`")));
        let (nrows, ncols, nnz) = match tok.as_slice() {
            ["%%sym", n, nnz] => (num(ln, n)?, num(ln, n)?, num(ln, nnz)?),
            ["%%gen", r, c, nnz] => (num(ln, r)?, num(ln, c)?, num(ln, nnz)?),
            _ => return Err(err(ln, "expected `%%sym n nnz` header".into())),
        };
        if nrows.max(ncols) > MAX_DUMP_DIM {
            return Err(err(ln, format!("dimension exceeds {MAX_DUMP_DIM}")));
        }
        let mut t = Vec::with_capacity(nnz.min(1 << 20));
        for (ln, line) in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let [i, j, v] = tok.as_slice() else {
                return Err(err(ln, "expected `i j value`".into()));
            };
            let (i, j) = (num(ln, i)?, num(ln, j)?);
            let v: f64 = v.parse().map_err(|_| err(ln, format!("bad value `{v}`")))?;
            if i >= nrows || j >= ncols {
                return Err(err(ln, format!("entry ({i}, {j}) outside {nrows}x{ncols}")));
            }
            t.push((i, j, v));
        }
        if t.len() != nnz {
            return Err(err(0, format!("header announces {nnz} entries, found {}", t.len())));
        }
        Ok(Self::from_triplets(nrows, ncols, t))
    }
}

/// Largest row or column count accepted by [`CsrMatrix::read_dump`].
pub const MAX_DUMP_DIM: usize = 1 << 26;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(3, 3, vec![(2, 1, 1.0), (0, 0, 2.0), (1, 2, 1.0), (0, 0, 0.5), (1, 1, -3.0)])
    }

    #[test]
    fn duplicates_are_summed() {
        let a = sample();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(0, 0), 2.5);
        assert_eq!(a.get(2, 2), 0.0);
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![2.5, -2.0, 1.0]);
        assert_eq!(a.matvec_t(&[1.0, 2.0, 0.0]), vec![2.5, -6.0, 2.0]);
    }

    #[test]
    fn symmetry_defect_detects_asymmetry() {
        let a = sample();
        assert_eq!(a.symmetry_defect(), 0.0);
        let b = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 0.5)]);
        assert!((b.symmetry_defect() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dump_roundtrip() {
        let a = CsrMatrix::from_triplets(3, 3, vec![(0, 0, 1.0 / 3.0), (2, 1, -2.0e-17), (1, 2, 7.5)]);
        let text = a.write_dump();
        assert!(text.starts_with("%%sym 3 3\n"));
        assert_eq!(CsrMatrix::read_dump(&text).unwrap(), a);
        let r = CsrMatrix::from_triplets(2, 3, vec![(1, 2, 1.0)]);
        assert_eq!(CsrMatrix::read_dump(&r.write_dump()).unwrap(), r);
    }

    #[test]
    fn dump_errors() {
        assert!(CsrMatrix::read_dump("").is_err());
        assert!(CsrMatrix::read_dump("%%sym 2 1\n3 0 1.0\n").is_err());
        assert!(CsrMatrix::read_dump("%%sym 2 2\n0 0 1.0\n").is_err());
        assert!(matches!(CsrMatrix::read_dump("%%sym 2 1\n0 0 x\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn saddle_layout() {
        let a = CsrMatrix::identity(2);
        let b = CsrMatrix::from_triplets(1, 2, vec![(0, 1, 4.0)]);
        let s = CsrMatrix::saddle(&a, &b, None);
        assert_eq!(s.get(2, 1), 4.0);
        assert_eq!(s.get(1, 2), 4.0);
        assert_eq!(s.get(2, 2), 0.0);
    }
}
