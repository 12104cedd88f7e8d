//! Special functions: gamma-family wrappers and the Tricomi confluent
//! hypergeometric function U evaluated from its integral representation.

use super::quad::adaptive_simpson;
use super::AnalyticError;

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64, AnalyticError> {
    if !(x > 0.0) {
        return Err(AnalyticError::DomainError(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64, AnalyticError> {
    if !(x > 0.0) {
        return Err(AnalyticError::DomainError(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Digamma ψ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64, AnalyticError> {
    if !(x > 0.0) {
        return Err(AnalyticError::DomainError(format!("digamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::digamma(x))
}

/// Exact binomial coefficient as f64 (small arguments only).
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Tricomi U(a1, b1, z) for a1 > 0, z > 0, via
/// `U = (1/Γ(a1)) ∫_0^∞ e^(-z t) t^(a1-1) (1+t)^(b1-a1-1) dt`.
///
/// The integral is split at t = 1. On [0, 1] the substitution t = u^(1/a1)
/// removes the endpoint singularity; on [1, ∞) the substitution t = e^s
/// compresses slowly decaying tails. Both pieces are integrated adaptively
/// to 1e-12 relative tolerance; worst-case end-to-end relative error is
/// well inside the 1e-10 target.
pub fn tricomi_u(a1: f64, b1: f64, z: f64) -> Result<f64, AnalyticError> {
    if !(a1 > 0.0) || !(z > 0.0) {
        return Err(AnalyticError::DomainError(format!(
            "tricomi_u requires a1 > 0 and z > 0, got a1={a1}, z={z}"
        )));
    }
    let pow = b1 - a1 - 1.0;

    // [0, 1]: (1/a1) ∫_0^1 e^(-z u^(1/a1)) (1 + u^(1/a1))^(b1-a1-1) du
    let head = adaptive_simpson(
        |u: f64| {
            if u <= 0.0 {
                return 1.0; // limit t -> 0
            }
            let t = u.powf(1.0 / a1);
            ((-z * t).exp()) * (1.0 + t).powf(pow)
        },
        0.0,
        1.0,
        1e-12,
        1e-300,
    ) / a1;

    // [1, ∞): ∫_0^S exp(-z e^s + a1 s + (b1-a1-1) ln(1+e^s)) ds, with S
    // chosen so the exponent is far below underflow at the cut.
    let tail = if z >= 700.0 {
        0.0
    } else {
        let s_max = (3000.0 / z).ln().max(1e-6);
        let f = |s: f64| {
            let es = s.exp();
            let ln_f = -z * es + a1 * s + pow * (1.0 + es).ln();
            if ln_f < -745.0 {
                0.0
            } else {
                ln_f.exp()
            }
        };
        // For small z the integrand peaks sharply near the stationary
        // point of -z e^s + a1 s; splitting there keeps the adaptive
        // recursion shallow.
        let s_star = (a1 / z).ln();
        if s_star > 0.1 && s_star < s_max - 0.1 {
            adaptive_simpson(&f, 0.0, s_star, 1e-12, 1e-300)
                + adaptive_simpson(&f, s_star, s_max, 1e-12, 1e-300)
        } else {
            adaptive_simpson(&f, 0.0, s_max, 1e-12, 1e-300)
        }
    };

    Ok((head + tail) / gamma_fn(a1)?)
}
