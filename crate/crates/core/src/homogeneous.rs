//! Doubling-space bound arithmetic: given a quasimetric constant K and
//! doubling constants (α, β), the ball family admits the certificate β^m with
//! m the smallest natural number satisfying α^m ≥ 2K(4K² + 1).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousParams {
    pub quasi_k: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Smallest m with α^m ≥ 2K(4K² + 1).
    pub exponent: u32,
    /// β^m.
    pub bound: f64,
}

/// Compute (m, β^m) for the ball-family certificate.
pub fn homogeneous_bound(quasi_k: f64, alpha: f64, beta: f64) -> Result<HomogeneousParams> {
    if !quasi_k.is_finite() || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::MalformedInput("homogeneous constants must be finite".into()));
    }
    if quasi_k < 1.0 {
        return Err(Error::MalformedInput("quasimetric constant K must be ≥ 1".into()));
    }
    if alpha <= 1.0 || beta <= 1.0 {
        return Err(Error::MalformedInput("doubling constants α, β must exceed 1".into()));
    }
    let threshold = 2.0 * quasi_k * (4.0 * quasi_k * quasi_k + 1.0);
    // Seed from logarithms, then settle minimality with the same power
    // evaluation the invariant checks use.
    let mut m = (threshold.ln() / alpha.ln()).ceil().max(1.0) as u32;
    while m > 1 && alpha.powi((m - 1) as i32) >= threshold {
        m -= 1;
    }
    while alpha.powi(m as i32) < threshold {
        m += 1;
    }
    Ok(HomogeneousParams { quasi_k, alpha, beta, exponent: m, bound: beta.powi(m as i32) })
}
