//! Gauss rules on the reference interval, square, triangle and tetrahedron.
//!
//! Reference cells: interval `[-1,1]`, square `[-1,1]^2`, triangle with
//! vertices `(0,0),(1,0),(0,1)`, tetrahedron with vertices at the origin and
//! the unit points. Simplex rules are collapsed (Duffy) tensor Gauss rules,
//! so all weights are positive.

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Largest polynomial exactness served by [`quadrature_rule`].
pub const MAX_EXACTNESS: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefShape {
    Interval,
    Triangle,
    Quadrilateral,
    Tetrahedron,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `P_n(z)` and `P_n'(z)` for `n >= 1`, `|z| < 1`.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * z * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// `n`-point Gauss-Legendre nodes and weights on `[-1,1]`, exact to degree `2n-1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn points_for(exactness: usize) -> usize {
    exactness / 2 + 1
}

/// Rule on the reference cell of `shape` integrating polynomials of total
/// degree `<= q` exactly.
pub fn quadrature_rule(shape: RefShape, q: usize) -> Result<QuadratureRule> {
    if q > MAX_EXACTNESS {
        return Err(Error::QuadratureDegree { requested: q, max: MAX_EXACTNESS });
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match shape {
        RefShape::Interval => {
            let (x, w) = gauss_legendre(points_for(q));
            for (xi, wi) in x.into_iter().zip(w) {
                points.push([xi, 0.0, 0.0]);
                weights.push(wi);
            }
        }
        RefShape::Quadrilateral => {
            let (x, w) = gauss_legendre(points_for(q));
            for (xj, wj) in x.iter().zip(&w) {
                for (xi, wi) in x.iter().zip(&w) {
                    points.push([*xi, *xj, 0.0]);
                    weights.push(wi * wj);
                }
            }
        }
        RefShape::Triangle => {
            // x = u, y = v (1 - u); Jacobian (1 - u).
            let (xu, wu) = gauss_legendre(points_for(q + 1));
            let (xv, wv) = gauss_legendre(points_for(q));
            for (a, wa) in xu.iter().zip(&wu) {
                let u = 0.5 * (a + 1.0);
                for (b, wb) in xv.iter().zip(&wv) {
                    let v = 0.5 * (b + 1.0);
                    points.push([u, v * (1.0 - u), 0.0]);
                    weights.push(0.25 * wa * wb * (1.0 - u));
                }
            }
        }
        RefShape::Tetrahedron => {
            // x = u, y = v (1-u), z = w (1-u)(1-v); Jacobian (1-u)^2 (1-v).
            let (xu, wu) = gauss_legendre(points_for(q + 2));
            let (xv, wv) = gauss_legendre(points_for(q + 1));
            let (xw, ww) = gauss_legendre(points_for(q));
            for (a, wa) in xu.iter().zip(&wu) {
                let u = 0.5 * (a + 1.0);
                for (b, wb) in xv.iter().zip(&wv) {
                    let v = 0.5 * (b + 1.0);
                    for (c, wc) in xw.iter().zip(&ww) {
                        let t = 0.5 * (c + 1.0);
                        points.push([u, v * (1.0 - u), t * (1.0 - u) * (1.0 - v)]);
                        weights.push(0.125 * wa * wb * wc * (1.0 - u) * (1.0 - u) * (1.0 - v));
                    }
                }
            }
        }
    }
    Ok(QuadratureRule { points, weights, degree: q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Exact integral of x^a y^b z^c over the unit simplex of dimension `dim`.
    fn simplex_monomial(a: u32, b: u32, c: u32, dim: u32) -> f64 {
        factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + dim)
    }

    #[test]
    fn two_point_gauss() {
        let r = quadrature_rule(RefShape::Interval, 3).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-15);
        assert!((r.points[1][0] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn triangle_area() {
        let r = quadrature_rule(RefShape::Triangle, 2).unwrap();
        assert!((r.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn triangle_x3y2() {
        // 3! 2! / 7!
        let r = quadrature_rule(RefShape::Triangle, 8).unwrap();
        let s: f64 = r.points.iter().zip(&r.weights).map(|(p, w)| w * p[0].powi(3) * p[1].powi(2)).sum();
        assert!((s - 1.0 / 420.0).abs() < 1e-14);
        assert!((simplex_monomial(3, 2, 0, 2) - 1.0 / 420.0).abs() < 1e-16);
    }

    #[test]
    fn exactness_all_shapes() {
        for q in [0, 1, 2, 5, 8, 13] {
            let tri = quadrature_rule(RefShape::Triangle, q).unwrap();
            let tet = quadrature_rule(RefShape::Tetrahedron, q).unwrap();
            let quad = quadrature_rule(RefShape::Quadrilateral, q).unwrap();
            for a in 0..=q as u32 {
                for b in 0..=(q as u32 - a) {
                    let s: f64 = tri.points.iter().zip(&tri.weights).map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
                    let e = simplex_monomial(a, b, 0, 2);
                    assert!((s - e).abs() <= 1e-13 * e.abs().max(1e-3), "tri {a} {b}");
                    let s: f64 = quad.points.iter().zip(&quad.weights).map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
                    let line = |k: u32| if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                    assert!((s - line(a) * line(b)).abs() < 1e-13);
                    for c in 0..=(q as u32 - a - b) {
                        let s: f64 = tet
                            .points
                            .iter()
                            .zip(&tet.weights)
                            .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                            .sum();
                        let e = simplex_monomial(a, b, c, 3);
                        assert!((s - e).abs() <= 1e-13 * e.max(1e-4), "tet {a} {b} {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn refuses_excessive_degree() {
        assert!(matches!(
            quadrature_rule(RefShape::Triangle, MAX_EXACTNESS + 1),
            Err(Error::QuadratureDegree { .. })
        ));
    }
}
