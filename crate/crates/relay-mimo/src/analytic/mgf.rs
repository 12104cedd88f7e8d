//! Moment generating function of the post-processing SNR: Hankel
//! determinant over the nonzero eigenvalues of the receiving user's own
//! channel Gram matrix, with every entry evaluated by two independent
//! routes and cross-checked.

use nalgebra::DMatrix;

use super::quad::{adaptive_simpson, gauss_laguerre};
use super::special::{binomial, gamma_fn, tricomi_u};
use super::AnalyticError;
use crate::config::SystemConfig;
use crate::linalg::ComplexMatrix;

/// Relative disagreement between the quadrature and closed-form Hankel
/// entries above which evaluation aborts.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

/// Statistical model of the received SNR at the decoding user.
///
/// Conventions: user `i` is the receiver, user `j` the partner whose data
/// is decoded; `p = max(N_r, N_i)`, `q = min(N_r, N_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrModel {
    pub p: usize,
    pub q: usize,
    pub n_j: usize,
    /// `α_j = 1/(R_j N_j)` for partner code rate `R_j`.
    pub alpha_j: f64,
    /// Partner average SNR, linear.
    pub gamma_bar_j: f64,
    /// Relay gain.
    pub a: f64,
    /// Estimation-noise coefficients of the whitened model:
    /// `Z_1 = 1 + a²(1/N_p_i + 1/N_p_j)`, `Z_2 = a²(1 + 1/N_p_i + 1/N_p_j)`.
    pub z1: f64,
    pub z2: f64,
    /// Eigenvalue-density normalizer `κ = Π Γ(p-l+1)Γ(q-l+1)`.
    pub kappa: f64,
}

impl SnrModel {
    fn build(
        n_r: usize,
        n_i: usize,
        n_j: usize,
        alpha_j: f64,
        gamma_bar_j: f64,
        a: f64,
        z1: f64,
        z2: f64,
    ) -> Self {
        let p = n_r.max(n_i);
        let q = n_r.min(n_i);
        let kappa = (1..=q)
            .map(|l| {
                gamma_fn((p - l + 1) as f64).unwrap() * gamma_fn((q - l + 1) as f64).unwrap()
            })
            .product();
        SnrModel { p, q, n_j, alpha_j, gamma_bar_j, a, z1, z2, kappa }
    }

    /// Model with estimated CSI from `N_p` pilot repetitions per user.
    #[allow(clippy::too_many_arguments)]
    pub fn estimated(
        n_r: usize,
        n_i: usize,
        n_j: usize,
        n_p_i: usize,
        n_p_j: usize,
        a: f64,
        gamma_bar_j: f64,
        code_rate_j: f64,
    ) -> Self {
        let inv = 1.0 / n_p_i as f64 + 1.0 / n_p_j as f64;
        Self::build(
            n_r,
            n_i,
            n_j,
            1.0 / (code_rate_j * n_j as f64),
            gamma_bar_j,
            a,
            1.0 + a * a * inv,
            a * a * (1.0 + inv),
        )
    }

    /// Perfect-CSI limit (`N_p → ∞`): `Z_1 = 1`, `Z_2 = a²`.
    pub fn perfect(n_r: usize, n_i: usize, n_j: usize, a: f64, gamma_bar_j: f64, code_rate_j: f64) -> Self {
        Self::build(n_r, n_i, n_j, 1.0 / (code_rate_j * n_j as f64), gamma_bar_j, a, 1.0, a * a)
    }

    /// Model for the designated receiving user of a system configuration.
    pub fn from_config(cfg: &SystemConfig, rx_user: usize, perfect_csi: bool) -> Self {
        let tx_user = 3 - rx_user;
        if perfect_csi {
            Self::perfect(
                cfg.nr,
                cfg.antennas(rx_user),
                cfg.antennas(tx_user),
                cfg.relay_gain(),
                cfg.gamma_bar(tx_user),
                cfg.code.rate(),
            )
        } else {
            Self::estimated(
                cfg.nr,
                cfg.antennas(rx_user),
                cfg.antennas(tx_user),
                cfg.pilot_reps(rx_user),
                cfg.pilot_reps(tx_user),
                cfg.relay_gain(),
                cfg.gamma_bar(tx_user),
                cfg.code.rate(),
            )
        }
    }

    /// Same model at a different partner SNR (linear).
    pub fn with_gamma_bar(&self, gamma_bar_j: f64) -> Self {
        SnrModel { gamma_bar_j, ..self.clone() }
    }

    /// `g(s) = a² s α_j γ̄_j / Z_2`: the dimensionless load in every
    /// closed-form expression.
    pub fn load(&self, s: f64) -> f64 {
        self.a * self.a * s * self.alpha_j * self.gamma_bar_j / self.z2
    }

    /// `c_1 = Z_2/Z_1` and `c_2 = c_1 (1 + g(s))` of the eigenvalue
    /// integral.
    pub fn rational_coeffs(&self, s: f64) -> (f64, f64) {
        let c1 = self.z2 / self.z1;
        (c1, c1 * (1.0 + self.load(s)))
    }
}

/// Post-processing SNR for one channel draw:
/// `γ = α_j γ̄_j a² Tr{Gᴴ (Z₁ I + Z₂ H_i H_iᴴ)⁻¹ G}` with `G = H_i H_jᵀ`.
pub fn instantaneous_snr(
    model: &SnrModel,
    h_i: &ComplexMatrix,
    h_j: &ComplexMatrix,
) -> Result<f64, AnalyticError> {
    let n_i = h_i.rows();
    let g = h_i * &h_j.transpose();
    let w = (ComplexMatrix::identity(n_i).scale_re(model.z1)
        + (h_i * &h_i.conj_transpose()).scale_re(model.z2))
    .inverse()
    .map_err(|e| AnalyticError::DomainError(e.to_string()))?;
    let t = (&(&g.conj_transpose() * &w) * &g).trace();
    Ok(model.alpha_j * model.gamma_bar_j * model.a * model.a * t.re)
}

/// Evaluates `M(s) = κ⁻¹ det J(s)` with dual-route Hankel entries.
#[derive(Debug, Clone)]
pub struct MgfEvaluator {
    pub model: SnrModel,
    pub cross_check_tol: f64,
}

impl MgfEvaluator {
    pub fn new(model: SnrModel) -> Self {
        MgfEvaluator { model, cross_check_tol: CROSS_CHECK_TOL }
    }

    /// Quadrature route: `J(ν, s) = ∫ λ^(ν-1) ((1+c₁λ)/(1+c₂λ))^(N_j)
    /// e^(-λ) dλ`. Gauss-Laguerre with a doubled-rule check, falling back
    /// to adaptive integration when the rational factor develops a
    /// boundary layer (large s).
    pub fn hankel_entry_quadrature(&self, nu: f64, s: f64) -> f64 {
        let (c1, c2) = self.model.rational_coeffs(s);
        let n_j = self.model.n_j as i32;
        let f = |x: f64| x.powf(nu - 1.0) * ((1.0 + c1 * x) / (1.0 + c2 * x)).powi(n_j);
        let coarse = gauss_laguerre(f, 200);
        let fine = gauss_laguerre(f, 400);
        if (coarse - fine).abs() <= 1e-10 * fine.abs() {
            return fine;
        }
        // boundary layer near 1/c2: split there so the adaptive rule does
        // not have to discover the layer by recursion
        let g = |x: f64| f(x) * (-x).exp();
        let upper = (15.0 * nu).max(80.0);
        let w = (50.0 / c2).min(1.0);
        adaptive_simpson(&g, 0.0, w, 1e-11, 1e-300)
            + adaptive_simpson(&g, w, 1.0, 1e-11, 1e-300)
            + adaptive_simpson(&g, 1.0, upper, 1e-11, 1e-300)
    }

    /// Closed-form route: binomial sum of Tricomi U terms,
    /// `J = Γ(ν) (Z₂/Z₁)^(-ν) (1+g)^(-(ν+N_j)) Σ_k C(N_j,k) g^k
    ///  U(ν, ν+1-k, (Z₁/Z₂)/(1+g))`.
    pub fn hankel_entry_closed_form(&self, nu: f64, s: f64) -> Result<f64, AnalyticError> {
        let m = &self.model;
        let g = m.load(s);
        let z = (m.z1 / m.z2) / (1.0 + g);
        let mut sum = 0.0;
        for k in 0..=m.n_j {
            let term = binomial(m.n_j as u64, k as u64)
                * g.powi(k as i32)
                * tricomi_u(nu, nu + 1.0 - k as f64, z)?;
            sum += term;
        }
        Ok(gamma_fn(nu)? * (m.z2 / m.z1).powf(-nu) * (1.0 + g).powf(-(nu + m.n_j as f64)) * sum)
    }

    /// Cross-checked Hankel entry (returns the quadrature value).
    pub fn hankel_entry(&self, nu: f64, s: f64) -> Result<f64, AnalyticError> {
        let a = self.hankel_entry_quadrature(nu, s);
        let b = self.hankel_entry_closed_form(nu, s)?;
        if (a - b).abs() > self.cross_check_tol * a.abs() {
            return Err(AnalyticError::CrossCheckFailure { nu, s, route_a: a, route_b: b });
        }
        Ok(a)
    }

    /// `M(s)` for `s ≥ 0`.
    pub fn mgf(&self, s: f64) -> Result<f64, AnalyticError> {
        if !(s >= 0.0) {
            return Err(AnalyticError::DomainError(format!("mgf requires s >= 0, got {s}")));
        }
        let m = &self.model;
        let q = m.q;
        // entries depend on t+v only; evaluate each distinct ν once
        let mut by_sum = vec![0.0f64; 2 * q + 1];
        for tv in 2..=2 * q {
            let nu = (tv + m.p - q) as f64 - 1.0;
            by_sum[tv] = self.hankel_entry(nu, s)?;
        }
        let j = DMatrix::<f64>::from_fn(q, q, |t, v| by_sum[t + v + 2]);
        Ok(j.determinant() / m.kappa)
    }
}
