//! Sparse multivariate polynomials in `(x, y, z)` with exact differentiation.
//! Used for manufactured solutions and as an independent evaluation path in tests.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::geom::Vec3;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<[u32; 3], f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn monomial(exp: [u32; 3], coef: f64) -> Self {
        let mut terms = BTreeMap::new();
        if coef != 0.0 {
            terms.insert(exp, coef);
        }
        Self { terms }
    }

    /// The coordinate function `x_axis`.
    pub fn var(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &f64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e[0] + e[1] + e[2]).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.push(*e, c * s);
        }
        out
    }

    fn push(&mut self, e: [u32; 3], c: f64) {
        let entry = self.terms.entry(e).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(1.0);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn deriv(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut d = *e;
                d[axis] -= 1;
                out.push(d, c * e[axis] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32))
            .sum()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.push(*e, *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.push([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        out
    }
}

/// Vector of three polynomials. Planar fields leave the third component zero
/// and never depend on `z`, so the 3D curl reproduces the planar conventions:
/// `curl (v1, v2) = (0, 0, dx v2 - dy v1)` and `curl (0, 0, s) = (dy s, -dx s, 0)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VecPoly(pub [Poly; 3]);

impl VecPoly {
    pub fn new(a: Poly, b: Poly, c: Poly) -> Self {
        Self([a, b, c])
    }

    pub fn curl(&self) -> Self {
        let [a, b, c] = &self.0;
        Self([
            &c.deriv(1) - &b.deriv(2),
            &a.deriv(2) - &c.deriv(0),
            &b.deriv(0) - &a.deriv(1),
        ])
    }

    pub fn eval(&self, x: Vec3) -> Vec3 {
        [self.0[0].eval(x), self.0[1].eval(x), self.0[2].eval(x)]
    }

    pub fn add(&self, other: &Self) -> Self {
        Self([&self.0[0] + &other.0[0], &self.0[1] + &other.0[1], &self.0[2] + &other.0[2]])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self([self.0[0].scale(s), self.0[1].scale(s), self.0[2].scale(s)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// Gradient of a scalar polynomial.
    pub fn grad(s: &Poly) -> Self {
        Self([s.deriv(0), s.deriv(1), s.deriv(2)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = &(&x * &x) * &y; // x^2 y
        assert_eq!(p.deriv(0), (&x * &y).scale(2.0));
        assert_eq!(p.deriv(2), Poly::zero());
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let z = Poly::var(2);
        let s = &(&(&x * &y) * &z) + &x.pow(4);
        let g = VecPoly::grad(&s);
        assert!(g.curl().0.iter().all(Poly::is_zero));
    }

    #[test]
    fn planar_curl_conventions() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        // v = (-y, x): curl = 2
        let v = VecPoly::new(-&y, x.clone(), Poly::zero());
        assert_eq!(v.curl().eval([0.3, 0.2, 0.0]), [0.0, 0.0, 2.0]);
        // s = x y e3: curl = (x, -y, 0)
        let s = VecPoly::new(Poly::zero(), Poly::zero(), &x * &y);
        assert_eq!(s.curl().eval([0.3, 0.2, 0.0]), [0.3, -0.2, 0.0]);
    }
}
