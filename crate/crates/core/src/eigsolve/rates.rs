//! Observed convergence rates.

/// Rates between consecutive sweep points, `log(e_i/e_j) / log(h_i/h_j)`.
/// The first entry and any pair with a nonpositive error are `None`.
pub fn h_rates(errors: &[f64], h: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(errors.len(), h.len());
    let mut out = vec![None; errors.len()];
    for j in 1..errors.len() {
        let (ei, ej) = (errors[j - 1], errors[j]);
        if ei > 0.0 && ej > 0.0 && h[j - 1] != h[j] {
            out[j] = Some((ei / ej).ln() / (h[j - 1] / h[j]).ln());
        }
    }
    out
}

/// Least-squares `r` in `e ~ C exp(-r p)`; `None` with fewer than two usable
/// points.
pub fn p_rate(errors: &[f64], p: &[f64]) -> Option<f64> {
    assert_eq!(errors.len(), p.len());
    let pts: Vec<(f64, f64)> = errors.iter().zip(p).filter(|(e, _)| **e > 0.0).map(|(e, p)| (*p, e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|x| x.0).sum::<f64>() / n;
    let my = pts.iter().map(|x| x.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|x| (x.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|x| (x.0 - mx) * (x.1 - my)).sum();
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power() {
        let r = h_rates(&[4.0, 1.0], &[1.0 / 8.0, 1.0 / 16.0]);
        assert_eq!(r[0], None);
        assert!((r[1].unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn printed_digit_inputs() {
        let r = h_rates(&[0.0265, 0.0077], &[0.1, 0.05]);
        assert!((r[1].unwrap() - 1.783).abs() < 1e-3);
    }

    #[test]
    fn nonpositive_error_gives_blank() {
        assert_eq!(h_rates(&[0.0, 1.0], &[0.5, 0.25])[1], None);
        assert_eq!(p_rate(&[1.0], &[2.0]), None);
    }

    #[test]
    fn exponential_fit() {
        let e: Vec<f64> = (2..6).map(|p| 3.0 * (-2.5 * p as f64).exp()).collect();
        let r = p_rate(&e, &[2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!((r - 2.5).abs() < 1e-12);
    }
}
