//! Smooth divergence-free test field on `[-1,1]^2` satisfying the clamped
//! boundary conditions `w x n = 0` and `curl w x n = 0`.
//!
//! `w = curl(psi e_3)` with `psi = (1-x^2)^3 (1-y^2)^3`. The triple roots
//! of `psi` at `x, y = +-1` make `w` tangentially zero and `curl w = -lap psi`
//! zero on the boundary. The load is `f = curl^4 w + w`. Everything is a
//! polynomial, so curl powers are exact.

use crate::assembly::norm::ExactField;
use crate::geom::Vec3;
use crate::polyspace::basis::VJet;
use crate::polyspace::poly::{Poly, VecPoly};

#[derive(Clone, Debug)]
pub struct Manufactured {
    w: VecPoly,
    curl: VecPoly,
    curl2: VecPoly,
    curl3: VecPoly,
    f: VecPoly,
}

impl Manufactured {
    pub fn new() -> Self {
        let one = Poly::constant(1.0);
        let bx = (&one - &Poly::var(0).pow(2)).pow(3);
        let by = (&one - &Poly::var(1).pow(2)).pow(3);
        let psi = &bx * &by;
        let w = VecPoly::new(psi.deriv(1), psi.deriv(0).scale(-1.0), Poly::zero());
        let curl = w.curl();
        let curl2 = curl.curl();
        let curl3 = curl2.curl();
        let f = curl3.curl().add(&w);
        Self { w, curl, curl2, curl3, f }
    }

    pub fn value(&self, x: Vec3) -> Vec3 {
        self.w.eval(x)
    }

    /// `curl^4 w + w`.
    pub fn load(&self, x: Vec3) -> Vec3 {
        self.f.eval(x)
    }

    /// Polynomial degree of `w`.
    pub fn degree(&self) -> usize {
        self.w.degree() as usize
    }
}

impl Default for Manufactured {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactField for Manufactured {
    fn jet(&self, x: Vec3) -> VJet {
        VJet { val: self.w.eval(x), curl: self.curl.eval(x), curl2: self.curl2.eval(x), curl3: self.curl3.eval(x) }
    }
}
