//! Analytical performance engine: moment generating function of the
//! post-processing SNR, SER/BER formulas, and diversity order.

pub mod diversity;
pub mod mgf;
pub mod quad;
pub mod ser;
pub mod special;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error(
        "cross-check failure at nu={nu}, s={s}: quadrature route {route_a} vs closed form {route_b}"
    )]
    CrossCheckFailure { nu: f64, s: f64, route_a: f64, route_b: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub use diversity::{diversity_order, mgf_asymptotic_q1, slope_estimate, slope_fit, DiversityOrder};
pub use mgf::{instantaneous_snr, MgfEvaluator, SnrModel};
pub use ser::{bpsk_q1_closed_form, ser_mpsk, ser_mqam};
