//! Reference values for the location of the critical window.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::sigma;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoryCurves {
    pub min_degree: u64,
    pub max_degree: u64,
    pub eps: f64,
    pub lambda: f64,
    /// `1/2 − σ(Δ)/2`.
    pub p_tilde: f64,
    /// `1/2 − (1/2 + ε)σ(δ)`: below this Φ → 0.
    pub lower: f64,
    /// `1/2 − (1/2 − ε)σ(Δ)`: above this Φ → 1.
    pub upper: f64,
    /// `1/2 − σ(Δ)/2 + λ·ln ln Δ / √(Δ ln Δ)`.
    pub window_point: f64,
}

/// Curves for a graph with minimum degree `min_degree` and maximum degree
/// `max_degree`.
pub fn theory_curves_irregular(
    min_degree: u64,
    max_degree: u64,
    eps: f64,
    lambda: f64,
) -> Result<TheoryCurves> {
    if min_degree < 3 || max_degree < min_degree {
        return Err(Error::InvalidArgument(format!(
            "reference curves need 3 <= min degree <= max degree, got {min_degree}, {max_degree}"
        )));
    }
    if !(eps.is_finite() && eps >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(
            "eps must be finite and non-negative, lambda finite".into(),
        ));
    }
    let s_min = sigma(min_degree)?;
    let s_max = sigma(max_degree)?;
    let d = max_degree as f64;
    let p_tilde = 0.5 - s_max / 2.0;
    Ok(TheoryCurves {
        min_degree,
        max_degree,
        eps,
        lambda,
        p_tilde,
        lower: 0.5 - (0.5 + eps) * s_min,
        upper: 0.5 - (0.5 - eps) * s_max,
        window_point: p_tilde + lambda * d.ln().ln() / (d * d.ln()).sqrt(),
    })
}

/// Curves for a `d`-regular graph.
pub fn theory_curves(d: u64, eps: f64, lambda: f64) -> Result<TheoryCurves> {
    theory_curves_irregular(d, d, eps, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let c = theory_curves(100, 0.0, 0.0).unwrap();
        assert!((c.p_tilde - 0.392_701_7).abs() < 1e-6);
        assert_eq!(c.lower, c.upper);
        assert_eq!(c.lower, c.p_tilde);
        let c = theory_curves(1024, 0.1, 0.0).unwrap();
        assert_eq!(c.window_point, c.p_tilde);
        assert!(c.lower < c.p_tilde && c.p_tilde < c.upper);
        let c = theory_curves(20, 0.0, 0.0).unwrap();
        assert!((c.p_tilde - 0.306_488_6).abs() < 1e-6);
    }

    #[test]
    fn irregular_ordering() {
        let c = theory_curves_irregular(4, 12, 0.05, 1.0).unwrap();
        assert!(c.lower < c.p_tilde && c.p_tilde < c.upper);
        assert!(c.window_point > c.p_tilde);
    }

    #[test]
    fn rejects_small_degree() {
        assert!(theory_curves(2, 0.1, 0.0).is_err());
        assert!(theory_curves(10, -0.1, 0.0).is_err());
        assert!(theory_curves_irregular(5, 4, 0.1, 0.0).is_err());
    }
}
