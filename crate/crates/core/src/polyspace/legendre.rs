//! Legendre polynomials and the integrated-Legendre family `phi_i` used by
//! the hierarchical rectangular H(curl) basis.

/// `L_n(x)` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Monomial coefficients of `L_n`, lowest power first.
pub fn legendre_coefficients(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for k in 1..n {
        let kf = k as f64;
        let mut next = vec![0.0; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += (2.0 * kf + 1.0) * c / (kf + 1.0);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= kf * c / (kf + 1.0);
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `phi_0 = (1-x)/2`, `phi_1 = (1+x)/2`, `phi_i = (L_i - L_{i-2}) / sqrt(2(2i-1))` for `i >= 2`.
pub fn legendre_phi(i: usize, x: f64) -> f64 {
    match i {
        0 => 0.5 * (1.0 - x),
        1 => 0.5 * (1.0 + x),
        _ => (legendre(i, x) - legendre(i - 2, x)) / (2.0 * (2.0 * i as f64 - 1.0)).sqrt(),
    }
}

/// Derivative of [`legendre_phi`]. Uses `(L_i - L_{i-2})' = (2i-1) L_{i-1}`.
pub fn legendre_phi_deriv(i: usize, x: f64) -> f64 {
    match i {
        0 => -0.5,
        1 => 0.5,
        _ => ((2.0 * i as f64 - 1.0) / 2.0).sqrt() * legendre(i - 1, x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_endpoint_values() {
        assert_eq!(legendre_phi(0, -1.0), 1.0);
        assert_eq!(legendre_phi(1, -1.0), 0.0);
        for i in 2..12 {
            assert!(legendre_phi(i, 1.0).abs() < 1e-14);
            assert!(legendre_phi(i, -1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn phi2_at_origin() {
        // (L2(0) - L0(0)) / sqrt(6) = (-1/2 - 1) / sqrt(6)
        let expected = -1.5 / 6f64.sqrt();
        assert!((legendre_phi(2, 0.0) - expected).abs() < 1e-15);
        assert!((legendre_phi(2, 0.0) + 0.612_372_435_695_794_5).abs() < 1e-15);
    }

    #[test]
    fn coefficients_match_recurrence() {
        for n in 0..10 {
            let c = legendre_coefficients(n);
            for &x in &[-0.9f64, -0.3, 0.0, 0.41, 1.0] {
                let v: f64 = c.iter().enumerate().map(|(k, a)| a * x.powi(k as i32)).sum();
                assert!((v - legendre(n, x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn phi_derivative_matches_finite_difference() {
        let step = 1e-6;
        for i in 0..9 {
            for &x in &[-0.7, 0.1, 0.66] {
                let fd = (legendre_phi(i, x + step) - legendre_phi(i, x - step)) / (2.0 * step);
                assert!((fd - legendre_phi_deriv(i, x)).abs() < 1e-8, "i={i}");
            }
        }
    }
}
