//! Diversity order: the q = 1 asymptotic m.g.f. and log-log slope
//! estimation on error-rate curves.

use super::mgf::SnrModel;
use super::special::{binomial, digamma, gamma_fn};
use super::AnalyticError;

/// Theoretical diversity order for q = 1 configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityOrder {
    pub order: usize,
    /// True when `p = N_j`, which the asymptotic derivation does not cover;
    /// the returned `min(p, N_j)` is an extrapolation validated
    /// numerically by slope estimates.
    pub extrapolated: bool,
}

/// `min(p, N_j)` for `q = min(N_r, N_i) = 1`.
pub fn diversity_order(model: &SnrModel) -> Result<DiversityOrder, AnalyticError> {
    if model.q != 1 {
        return Err(AnalyticError::Unsupported(format!(
            "diversity order is only established for min(N_r, N_i) = 1, got q = {}",
            model.q
        )));
    }
    Ok(DiversityOrder {
        order: model.p.min(model.n_j),
        extrapolated: model.p == model.n_j,
    })
}

/// Least-squares log-log slope `-Δlog₁₀(rate)/Δlog₁₀(γ̄)` over the `k`
/// highest-SNR points of `(γ̄ linear, error rate)` pairs.
pub fn slope_fit(curve: &[(f64, f64)], k: usize) -> Result<f64, AnalyticError> {
    if k < 2 || curve.len() < k {
        return Err(AnalyticError::InsufficientData(format!(
            "slope fit needs at least {} points, got {}",
            k.max(2),
            curve.len()
        )));
    }
    let mut pts: Vec<(f64, f64)> = curve.to_vec();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let top = &pts[pts.len() - k..];
    if top.iter().any(|&(g, r)| !(g > 0.0) || !(r > 0.0)) {
        return Err(AnalyticError::DomainError(
            "slope fit requires positive SNRs and rates".into(),
        ));
    }
    let xs: Vec<f64> = top.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = top.iter().map(|p| p.1.log10()).collect();
    let n = k as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(AnalyticError::DomainError("degenerate SNR grid".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(-sxy / sxx)
}

/// Two-point slope on the highest-SNR pair.
pub fn slope_estimate(curve: &[(f64, f64)]) -> Result<f64, AnalyticError> {
    slope_fit(curve, 2)
}

/// Asymptotic q = 1 m.g.f. for large `s γ̄`: the exact single-eigenvalue
/// expression with each Tricomi U replaced by its small-argument limit.
/// Verifies the exact m.g.f.'s high-SNR exponent; not for finite-SNR use.
pub fn mgf_asymptotic_q1(model: &SnrModel, s: f64) -> Result<f64, AnalyticError> {
    if model.q != 1 {
        return Err(AnalyticError::Unsupported(format!(
            "asymptotic m.g.f. requires q = 1, got q = {}",
            model.q
        )));
    }
    let p = model.p;
    let n_j = model.n_j;
    let g = model.load(s);
    let z = (model.z1 / model.z2) / (1.0 + g);
    let gamma_p = gamma_fn(p as f64)?;
    let mut num = 0.0;
    for k in 0..=n_j {
        let coef = binomial(n_j as u64, k as u64) * g.powi(k as i32);
        let u_approx = if k < p {
            // b = p+1-k ≥ 2
            gamma_fn((p - k) as f64)? / gamma_p * z.powi(k as i32 - p as i32)
        } else if k == p {
            // b = 1: logarithmic branch, -(ln z + ψ(p) + 2γ)/Γ(p)
            let euler = -digamma(1.0)?;
            -(z.ln() + digamma(p as f64)? + 2.0 * euler) / gamma_p
        } else {
            // b ≤ 0
            gamma_fn((k - p) as f64)? / gamma_fn(k as f64)?
        };
        num += coef * gamma_p * u_approx;
    }
    Ok(num / ((1.0 + g).powi((p + n_j) as i32) * (model.z2 / model.z1).powi(p as i32) * model.kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::mgf::MgfEvaluator;

    #[test]
    fn diversity_order_branches() {
        let low = SnrModel::estimated(1, 1, 2, 1, 1, 1.0, 10.0, 1.0); // p=1 < N_j=2
        assert_eq!(diversity_order(&low).unwrap(), DiversityOrder { order: 1, extrapolated: false });
        let high = SnrModel::estimated(1, 3, 2, 1, 1, 1.0, 10.0, 1.0); // p=3 > N_j=2
        assert_eq!(diversity_order(&high).unwrap(), DiversityOrder { order: 2, extrapolated: false });
        let eq = SnrModel::estimated(1, 2, 2, 1, 1, 1.0, 10.0, 1.0); // p = N_j
        assert_eq!(diversity_order(&eq).unwrap(), DiversityOrder { order: 2, extrapolated: true });
        let q2 = SnrModel::estimated(2, 2, 2, 1, 1, 1.0, 10.0, 1.0);
        assert!(diversity_order(&q2).is_err());
    }

    #[test]
    fn slope_on_exact_power_law() {
        let curve: Vec<(f64, f64)> =
            (1..=6).map(|k| {
                let g = 10f64.powi(k);
                (g, 3.0 * g.powf(-4.0))
            }).collect();
        assert!((slope_estimate(&curve).unwrap() - 4.0).abs() < 1e-6);
        assert!((slope_fit(&curve, 4).unwrap() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn slope_insufficient_data() {
        assert!(matches!(
            slope_estimate(&[(1.0, 0.1)]),
            Err(AnalyticError::InsufficientData(_))
        ));
    }

    #[test]
    fn asymptotic_ratio_flattens_p_less_nj() {
        // p=1 < N_j=2: exact/asymptotic ratio settles as γ̄ grows.
        let mut ratios = Vec::new();
        for db in [30.0, 40.0, 50.0] {
            let gbar = 10f64.powf(db / 10.0);
            let m = SnrModel::estimated(1, 1, 2, 1, 1, 1.0, gbar, 1.0);
            let exact = MgfEvaluator::new(m.clone()).mgf(1.0).unwrap();
            let asym = mgf_asymptotic_q1(&m, 1.0).unwrap();
            ratios.push(exact / asym);
        }
        assert!((ratios[2] / ratios[1] - 1.0).abs() < 0.05, "{ratios:?}");
        assert!((ratios[1] / ratios[0] - 1.0).abs() > (ratios[2] / ratios[1] - 1.0).abs() / 2.0
            || (ratios[1] / ratios[0] - 1.0).abs() < 0.05);
    }

    #[test]
    fn asymptotic_slope_matches_diversity() {
        // log-log slope of the asymptotic m.g.f. in γ̄ approaches the
        // theoretical diversity order.
        for (nr, ni, nj, want) in [(1usize, 2usize, 3usize, 2.0f64), (1, 1, 2, 1.0)] {
            let mut curve = Vec::new();
            for db in [60.0, 70.0] {
                let gbar = 10f64.powf(db / 10.0);
                let m = SnrModel::estimated(nr, ni, nj, 1, 1, 1.0, gbar, 1.0);
                curve.push((gbar, mgf_asymptotic_q1(&m, 1.0).unwrap()));
            }
            let slope = slope_estimate(&curve).unwrap();
            assert!((slope - want).abs() < 0.1, "({nr},{ni},{nj}): slope {slope}");
        }
    }

    #[test]
    fn q2_asymptotic_rejected() {
        let m = SnrModel::estimated(2, 2, 2, 1, 1, 1.0, 10.0, 1.0);
        assert!(matches!(mgf_asymptotic_q1(&m, 1.0), Err(AnalyticError::Unsupported(_))));
    }
}
