//! Average error probabilities from the m.g.f.: M-PSK and M-QAM
//! quadrature formulas and the closed-form BPSK expression for q = 1.

use std::f64::consts::PI;

use super::mgf::{MgfEvaluator, SnrModel};
use super::quad::adaptive_simpson;
use super::special::{binomial, gamma_fn, tricomi_u};
use super::AnalyticError;

fn mgf_of_theta(ev: &MgfEvaluator, g: f64, theta: f64) -> Result<f64, AnalyticError> {
    let sn = theta.sin();
    if sn.abs() < 1e-9 {
        // s → ∞ endpoint; the m.g.f. vanishes there
        return Ok(0.0);
    }
    ev.mgf(g / (sn * sn))
}

fn integrate_mgf(
    ev: &MgfEvaluator,
    g: f64,
    upper: f64,
) -> Result<f64, AnalyticError> {
    // errors inside the quadrature closure are stashed and re-raised
    let err = std::cell::RefCell::new(None);
    let val = adaptive_simpson(
        |t| match mgf_of_theta(ev, g, t) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        upper,
        1e-9,
        1e-13,
    );
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(val),
    }
}

/// M-PSK SER: `(1/π) ∫_0^{π(M-1)/M} M(g/sin²θ) dθ`, `g = sin²(π/M)`.
pub fn ser_mpsk(model: &SnrModel, m: usize) -> Result<f64, AnalyticError> {
    if ![2, 4, 8, 16].contains(&m) {
        return Err(AnalyticError::Unsupported(format!("M-PSK order {m}")));
    }
    let ev = MgfEvaluator::new(model.clone());
    let g = (PI / m as f64).sin().powi(2);
    let upper = PI * (m as f64 - 1.0) / m as f64;
    Ok(integrate_mgf(&ev, g, upper)? / PI)
}

/// Square M-QAM SER: two-term quadrature with `g = 3/(2(M-1))`.
pub fn ser_mqam(model: &SnrModel, m: usize) -> Result<f64, AnalyticError> {
    if ![4, 16, 64].contains(&m) {
        return Err(AnalyticError::Unsupported(format!("M-QAM order {m}")));
    }
    let ev = MgfEvaluator::new(model.clone());
    let g = 3.0 / (2.0 * (m as f64 - 1.0));
    let w = 1.0 - 1.0 / (m as f64).sqrt();
    let first = integrate_mgf(&ev, g, PI / 2.0)?;
    let second = integrate_mgf(&ev, g, PI / 4.0)?;
    Ok(4.0 / PI * w * first - 4.0 / PI * w * w * second)
}

/// Closed-form BPSK BER for `q = 1`: double binomial sum of Tricomi U
/// terms. Exactly the quadrature BER of `ser_mpsk(model, 2)`; kept as an
/// independent route.
pub fn bpsk_q1_closed_form(model: &SnrModel) -> Result<f64, AnalyticError> {
    if model.q != 1 {
        return Err(AnalyticError::Unsupported(format!(
            "closed-form BPSK requires min(N_r, N_i) = 1, got q = {}",
            model.q
        )));
    }
    let p = model.p as f64;
    // g0 = a²α_j γ̄_j / Z₂ (the s = 1 load), x = Z₁/(Z₂ + a²α_j γ̄_j)
    let g0 = model.load(1.0);
    let x = (model.z1 / model.z2) / (1.0 + g0);
    let mut sum = 0.0;
    for k in 0..model.n_j {
        for l in 0..=k {
            let term = binomial(2 * k as u64, k as u64) * binomial(k as u64, l as u64)
                / 4.0f64.powi(k as i32)
                * g0.sqrt()
                * (model.z1 / model.z2).powf(p)
                * (1.0 + g0).powf(-(p + l as f64 + 0.5))
                * gamma_fn(p + l as f64 + 0.5)?
                / gamma_fn(p)?
                * tricomi_u(p + l as f64 + 0.5, p + (l as f64) - (k as f64) + 1.0, x)?;
            sum += term;
        }
    }
    Ok(0.5 * (1.0 - sum))
}
