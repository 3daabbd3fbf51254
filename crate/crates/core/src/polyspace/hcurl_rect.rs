//! Hierarchical H(curl)-conforming basis of `Q^{p-1,p} x Q^{p,p-1}` on the
//! reference square `[-1,1]^2`, built from the integrated Legendre family
//! [`legendre_phi`], and the edge-moment projector `Pi` onto the lowest-order
//! edge functions.

use super::legendre::{legendre_phi, legendre_phi_deriv};
use super::quadrature::gauss_legendre;

/// One member of the listing. `Minus`/`Plus` are
/// `grad phi_i(x1) phi_j(x2) -/+ phi_i(x1) grad phi_j(x2)`; `AxisX(j)` is
/// `phi_j(x2) e1` and `AxisY(i)` is `phi_i(x1) e2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcurlFunction {
    Minus(usize, usize),
    Plus(usize, usize),
    AxisX(usize),
    AxisY(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HcurlGroup {
    /// Cell-based `Phi^-_{i,j}`, `2 <= i,j <= p`.
    CellMinus,
    /// Cell-based `Phi^+_{i,j}`, `2 <= i,j <= p`.
    CellPlus,
    /// Cell-based `phi_j(x2) e1`, `phi_i(x1) e2`, index `>= 2`.
    CellAxis,
    /// Edge-based `Phi^+_{i,j}`, `i in {0,1}`, `2 <= j <= p`.
    EdgeVertical,
    /// Edge-based `Phi^+_{i,j}`, `j in {0,1}`, `2 <= i <= p`.
    EdgeHorizontal,
    /// The four lowest-order edge functions.
    EdgeLowest,
}

impl HcurlGroup {
    pub fn label(self) -> &'static str {
        match self {
            HcurlGroup::CellMinus => "A.I",
            HcurlGroup::CellPlus => "A.II",
            HcurlGroup::CellAxis => "A.III",
            HcurlGroup::EdgeVertical => "B.I",
            HcurlGroup::EdgeHorizontal => "B.II",
            HcurlGroup::EdgeLowest => "B.III",
        }
    }
}

impl HcurlFunction {
    /// Value and scalar curl `d1 v2 - d2 v1` at `(x1, x2)`.
    pub fn eval(self, x1: f64, x2: f64) -> ([f64; 2], f64) {
        let (f, df) = (legendre_phi, legendre_phi_deriv);
        match self {
            HcurlFunction::Minus(i, j) => {
                let (a, b) = (df(i, x1) * f(j, x2), f(i, x1) * df(j, x2));
                ([a, -b], -2.0 * df(i, x1) * df(j, x2))
            }
            HcurlFunction::Plus(i, j) => ([df(i, x1) * f(j, x2), f(i, x1) * df(j, x2)], 0.0),
            HcurlFunction::AxisX(j) => ([f(j, x2), 0.0], -df(j, x2)),
            HcurlFunction::AxisY(i) => ([0.0, f(i, x1)], df(i, x1)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HcurlRectBasis {
    degree: usize,
    functions: Vec<(HcurlGroup, HcurlFunction)>,
}

impl HcurlRectBasis {
    /// The full listing for degree `p >= 1`, cell-based functions first.
    pub fn new(p: usize) -> Self {
        assert!(p >= 1, "degree must be at least 1");
        use HcurlFunction::*;
        use HcurlGroup::*;
        let mut functions = Vec::new();
        let high = 2..=p;
        for i in high.clone() {
            for j in high.clone() {
                functions.push((CellMinus, Minus(i, j)));
            }
        }
        for i in high.clone() {
            for j in high.clone() {
                functions.push((CellPlus, Plus(i, j)));
            }
        }
        for j in high.clone() {
            functions.push((CellAxis, AxisX(j)));
        }
        for i in high.clone() {
            functions.push((CellAxis, AxisY(i)));
        }
        for i in 0..2 {
            for j in high.clone() {
                functions.push((EdgeVertical, Plus(i, j)));
            }
        }
        for j in 0..2 {
            for i in high.clone() {
                functions.push((EdgeHorizontal, Plus(i, j)));
            }
        }
        for j in 0..2 {
            functions.push((EdgeLowest, AxisX(j)));
        }
        for i in 0..2 {
            functions.push((EdgeLowest, AxisY(i)));
        }
        Self { degree: p, functions }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[(HcurlGroup, HcurlFunction)] {
        &self.functions
    }

    pub fn count(&self, group: HcurlGroup) -> usize {
        self.functions.iter().filter(|(g, _)| *g == group).count()
    }

    /// `dim Q^{p-1,p} x Q^{p,p-1} = 2 p (p + 1)`.
    pub fn expected_len(p: usize) -> usize {
        2 * p * (p + 1)
    }

    /// Gram matrix of `(curl u, curl v)` over the square, row-major.
    pub fn curl_gram(&self) -> Vec<Vec<f64>> {
        let (x, w) = gauss_legendre(self.degree + 2);
        let n = self.len();
        let mut g = vec![vec![0.0; n]; n];
        for (x2, w2) in x.iter().zip(&w) {
            for (x1, w1) in x.iter().zip(&w) {
                let curls: Vec<f64> = self.functions.iter().map(|(_, f)| f.eval(*x1, *x2).1).collect();
                accumulate(&mut g, &curls, w1 * w2);
            }
        }
        g
    }

    /// Gram matrix of the tangential-trace pairing `sum_e int_e (u.t)(v.t)`
    /// over the four edges, row-major.
    pub fn trace_gram(&self) -> Vec<Vec<f64>> {
        let (x, w) = gauss_legendre(self.degree + 2);
        let n = self.len();
        let mut g = vec![vec![0.0; n]; n];
        for side in [-1.0, 1.0] {
            for (s, ws) in x.iter().zip(&w) {
                // horizontal edge x2 = side (tangent e1), vertical edge x1 = side (tangent e2)
                let t1: Vec<f64> = self.functions.iter().map(|(_, f)| f.eval(*s, side).0[0]).collect();
                accumulate(&mut g, &t1, *ws);
                let t2: Vec<f64> = self.functions.iter().map(|(_, f)| f.eval(side, *s).0[1]).collect();
                accumulate(&mut g, &t2, *ws);
            }
        }
        g
    }
}

fn accumulate(g: &mut [Vec<f64>], vals: &[f64], w: f64) {
    for (a, va) in vals.iter().enumerate() {
        if *va == 0.0 {
            continue;
        }
        for (b, vb) in vals.iter().enumerate() {
            g[a][b] += w * va * vb;
        }
    }
}

/// Off-diagonal entries of a Gram matrix larger than `rel_tol` times the
/// largest diagonal entry, as `(a, b, value)` with `a < b`.
pub fn gram_violations(g: &[Vec<f64>], rel_tol: f64) -> (f64, Vec<(usize, usize, f64)>) {
    let scale = g.iter().enumerate().map(|(i, r)| r[i].abs()).fold(0.0, f64::max);
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for (a, row) in g.iter().enumerate() {
        for (b, v) in row.iter().enumerate().skip(a + 1) {
            worst = worst.max(v.abs());
            if v.abs() > rel_tol * scale {
                out.push((a, b, *v));
            }
        }
    }
    (if scale > 0.0 { worst / scale } else { 0.0 }, out)
}

/// The projector `Pi v = (Pi_1, Pi_2)` onto span of the lowest-order edge
/// functions, stored as its four edge means.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiProjection {
    /// Half the integrals of `v1` along `x2 = -1` and `x2 = 1`.
    pub bottom: f64,
    pub top: f64,
    /// Half the integrals of `v2` along `x1 = -1` and `x1 = 1`.
    pub left: f64,
    pub right: f64,
}

impl PiProjection {
    pub fn eval(&self, x1: f64, x2: f64) -> [f64; 2] {
        [
            self.bottom * legendre_phi(0, x2) + self.top * legendre_phi(1, x2),
            self.left * legendre_phi(0, x1) + self.right * legendre_phi(1, x1),
        ]
    }
}

/// Edge means of `v`, integrated with a Gauss rule exact for polynomial
/// traces of degree `degree`.
pub fn pi_projector(v: impl Fn(f64, f64) -> [f64; 2], degree: usize) -> PiProjection {
    let (x, w) = gauss_legendre(degree / 2 + 1);
    let mut pi = PiProjection { bottom: 0.0, top: 0.0, left: 0.0, right: 0.0 };
    for (s, ws) in x.iter().zip(&w) {
        let h = 0.5 * ws;
        pi.bottom += h * v(*s, -1.0)[0];
        pi.top += h * v(*s, 1.0)[0];
        pi.left += h * v(-1.0, *s)[1];
        pi.right += h * v(1.0, *s)[1];
    }
    pi
}

/// Ratios of the two weighted integrals in the edge-function stability bound
/// to their coefficient sums, for coefficients `c[i][j - 2]` (`i in {0,1}`,
/// `2 <= j <= p`) of the vertical-edge family. Returns
/// `int (r1^2 / (1 - x2^2) + r2^2) / sum c^2 (1/(j^2 - j) + 1)`.
pub fn edge_bound_ratio(p: usize, c: &[[f64; 2]]) -> f64 {
    assert_eq!(c.len() + 2, p + 1, "need p - 1 coefficient pairs");
    let (x, w) = gauss_legendre(p + 3);
    let mut lhs = 0.0;
    for (x2, w2) in x.iter().zip(&w) {
        for (x1, w1) in x.iter().zip(&w) {
            let (mut r1, mut r2) = (0.0, 0.0);
            for (jj, pair) in c.iter().enumerate() {
                let j = jj + 2;
                for (i, cij) in pair.iter().enumerate() {
                    let ([a, b], _) = HcurlFunction::Plus(i, j).eval(*x1, *x2);
                    r1 += cij * a;
                    r2 += cij * b;
                }
            }
            lhs += w1 * w2 * (r1 * r1 / (1.0 - x2 * x2) + r2 * r2);
        }
    }
    let rhs: f64 = c
        .iter()
        .enumerate()
        .map(|(jj, pair)| {
            let j = (jj + 2) as f64;
            (pair[0] * pair[0] + pair[1] * pair[1]) * (1.0 / (j * j - j) + 1.0)
        })
        .sum();
    lhs / rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_listing() {
        for p in 1..=8 {
            let b = HcurlRectBasis::new(p);
            assert_eq!(b.len(), HcurlRectBasis::expected_len(p));
            let m = p - 1;
            assert_eq!(b.count(HcurlGroup::CellMinus), m * m);
            assert_eq!(b.count(HcurlGroup::CellPlus), m * m);
            assert_eq!(b.count(HcurlGroup::CellAxis), 2 * m);
            assert_eq!(b.count(HcurlGroup::EdgeVertical), 2 * m);
            assert_eq!(b.count(HcurlGroup::EdgeHorizontal), 2 * m);
            assert_eq!(b.count(HcurlGroup::EdgeLowest), 4);
        }
    }

    #[test]
    fn curl_matches_finite_differences() {
        let step = 1e-5;
        for (_, f) in HcurlRectBasis::new(4).functions() {
            let (x1, x2) = (0.31, -0.47);
            let d1v2 = (f.eval(x1 + step, x2).0[1] - f.eval(x1 - step, x2).0[1]) / (2.0 * step);
            let d2v1 = (f.eval(x1, x2 + step).0[0] - f.eval(x1, x2 - step).0[0]) / (2.0 * step);
            assert!((d1v2 - d2v1 - f.eval(x1, x2).1).abs() < 1e-8, "{f:?}");
        }
    }

    #[test]
    fn gradients_are_curl_free() {
        for (g, f) in HcurlRectBasis::new(5).functions() {
            if matches!(g, HcurlGroup::CellPlus | HcurlGroup::EdgeVertical | HcurlGroup::EdgeHorizontal) {
                assert_eq!(f.eval(0.2, 0.7).1, 0.0);
            }
        }
    }

    #[test]
    fn lowest_order_pairs_break_curl_orthogonality() {
        let b = HcurlRectBasis::new(3);
        let (_, bad) = gram_violations(&b.curl_gram(), 1e-12);
        assert!(!bad.is_empty());
        for (a, c, _) in bad {
            assert_eq!(b.functions()[a].0, HcurlGroup::EdgeLowest);
            assert_eq!(b.functions()[c].0, HcurlGroup::EdgeLowest);
        }
        let (worst, bad) = gram_violations(&b.trace_gram(), 1e-12);
        assert!(bad.is_empty(), "{bad:?}");
        assert!(worst < 1e-12);
    }

    #[test]
    fn pi_of_constant_is_identity() {
        let pi = pi_projector(|_, _| [1.0, 0.0], 0);
        let v = pi.eval(0.3, -0.2);
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-15);
    }
}
