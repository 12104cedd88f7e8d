//! Whitened ML decoding of the partner's OSTBC block: exhaustive search
//! over all codewords, and the per-symbol decoupled form that the code's
//! orthogonality makes exactly equivalent.

use num_complex::Complex;
use thiserror::Error;

use crate::estimation::{whitener, EstimationError};
use crate::linalg::{c, ComplexMatrix};
use crate::ostbc::{Constellation, OstbcCode};

/// Upper bound on the exhaustive candidate count `M^{M_symbols}`.
pub const MAX_SEARCH_SPACE: usize = 65_536;

#[derive(Debug, Error)]
pub enum DecoderError {
    #[error("exhaustive search space {0} exceeds limit {MAX_SEARCH_SPACE}")]
    SearchSpaceTooLarge(usize),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error("effective channel has zero energy")]
    DegenerateChannel,
}

/// Whitened observation with the self-interference removed, plus the
/// effective channel seen by the partner's codeword.
#[derive(Debug, Clone)]
pub struct PreparedObservation {
    /// `Y̆ = W (Y - a Ĝ_j C_j)` with `W = (a² Ĥ Ĥᴴ + I)^{-1/2}`.
    pub whitened: ComplexMatrix,
    /// `X = a W Ĝ_{j,i}`.
    pub eff_channel: ComplexMatrix,
}

/// Builds the decoder input from the raw phase-4 reception at user `j`:
/// cancels `a Ĝ_j C_j`, whitens with the estimated relay-noise covariance,
/// and forms the effective cross channel.
pub fn prepare_observation(
    a: f64,
    received: &ComplexMatrix,
    h_hat_own: &ComplexMatrix,
    g_hat_own: &ComplexMatrix,
    g_hat_cross: &ComplexMatrix,
    own_codeword: &ComplexMatrix,
) -> Result<PreparedObservation, DecoderError> {
    let w = whitener(a, h_hat_own)?;
    let cleaned = received.clone() - (g_hat_own * own_codeword).scale_re(a);
    Ok(PreparedObservation {
        whitened: &w * &cleaned,
        eff_channel: (&w * g_hat_cross).scale_re(a),
    })
}

/// Exhaustive ML: minimizes `||Y̆ - X C(s)||_F²` over every symbol vector.
/// Ties resolve to the first candidate in odometer order (symbol 0 fastest),
/// which matches the per-symbol tie rule of [`decode_symbolwise`].
/// Returns constellation point indices.
pub fn decode_exhaustive(
    obs: &PreparedObservation,
    code: &OstbcCode,
    constellation: &Constellation,
    symbol_energy: f64,
) -> Result<Vec<usize>, DecoderError> {
    let m = constellation.order();
    let n_sym = code.m_symbols;
    let space = m.checked_pow(n_sym as u32).filter(|&s| s <= MAX_SEARCH_SPACE);
    let space = space.ok_or_else(|| {
        DecoderError::SearchSpaceTooLarge(m.saturating_pow(n_sym as u32))
    })?;

    let mut best = vec![0usize; n_sym];
    let mut best_metric = f64::INFINITY;
    let mut indices = vec![0usize; n_sym];
    let mut symbols = vec![c(0.0, 0.0); n_sym];
    for cand in 0..space {
        let mut rem = cand;
        for n in 0..n_sym {
            indices[n] = rem % m;
            rem /= m;
            symbols[n] = constellation.point(indices[n]);
        }
        let cw = code.encode(&symbols, symbol_energy).expect("symbol count fixed");
        let metric = (obs.whitened.clone() - &obs.eff_channel * &cw).frobenius_norm();
        if metric < best_metric {
            best_metric = metric;
            best.copy_from_slice(&indices);
        }
    }
    Ok(best)
}

/// Per-symbol ML enabled by OSTBC orthogonality: with
/// `z_n = Re Tr{Y̆ᴴ X A_n} - j Im Tr{Y̆ᴴ X B_n}` the joint metric decouples
/// into `||X||_F² |√E c_n - z_n/||X||_F²|²` per symbol. Exactly equivalent
/// to [`decode_exhaustive`] for any effective channel `X`.
pub fn decode_symbolwise(
    obs: &PreparedObservation,
    code: &OstbcCode,
    constellation: &Constellation,
    symbol_energy: f64,
) -> Result<Vec<usize>, DecoderError> {
    let x = &obs.eff_channel;
    let energy = x.frobenius_norm().powi(2);
    if energy <= 0.0 {
        return Err(DecoderError::DegenerateChannel);
    }
    let yh = obs.whitened.conj_transpose();
    let yhx = &yh * x;
    let amp = symbol_energy.sqrt();
    let mut out = Vec::with_capacity(code.m_symbols);
    for n in 0..code.m_symbols {
        let ta = (&yhx * &code.dispersion_a[n]).trace();
        let tb = (&yhx * &code.dispersion_b[n]).trace();
        let z = Complex::new(ta.re, -tb.im);
        // nearest unit-energy point to the matched-filter output
        out.push(constellation.demap(z / (energy * amp)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_channel;
    use crate::rng::{RngStream, UsageTag};

    fn random_obs(trial: u64, noise_scale: f64) -> (PreparedObservation, Vec<usize>, f64) {
        // Builds Y̆ = X C(s) + noise directly, bypassing the protocol; the
        // decoders only see (Y̆, X).
        let code = OstbcCode::alamouti();
        let con = Constellation::psk(4).unwrap();
        let energy = 2.0;
        let mut rng = RngStream::derive(31, trial, UsageTag::Channel);
        let x = rng.complex_gaussian_matrix(2, 2);
        let idx = vec![rng.gen_index(4), rng.gen_index(4)];
        let syms: Vec<_> = idx.iter().map(|&k| con.point(k)).collect();
        let cw = code.encode(&syms, energy).unwrap();
        let noise = rng.complex_gaussian_matrix(2, 2).scale_re(noise_scale);
        let obs = PreparedObservation { whitened: &x * &cw + noise, eff_channel: x };
        (obs, idx, energy)
    }

    #[test]
    fn noise_free_decoding_is_exact() {
        let code = OstbcCode::alamouti();
        let con = Constellation::psk(4).unwrap();
        for trial in 0..200 {
            let (obs, truth, energy) = random_obs(trial, 0.0);
            assert_eq!(decode_exhaustive(&obs, &code, &con, energy).unwrap(), truth);
            assert_eq!(decode_symbolwise(&obs, &code, &con, energy).unwrap(), truth);
        }
    }

    #[test]
    fn exhaustive_and_symbolwise_agree_under_noise() {
        let code = OstbcCode::alamouti();
        let con = Constellation::psk(4).unwrap();
        for trial in 0..2000 {
            let (obs, _, energy) = random_obs(trial, 1.5);
            let a = decode_exhaustive(&obs, &code, &con, energy).unwrap();
            let b = decode_symbolwise(&obs, &code, &con, energy).unwrap();
            assert_eq!(a, b, "trial {trial}");
        }
    }

    #[test]
    fn tie_breaks_pick_lowest_index_in_both_decoders() {
        // Zero observation makes every PSK codeword equidistant. An
        // identity effective channel keeps the tie exact in floating
        // point (a generic channel perturbs the metrics at the ulp level
        // and the tie dissolves); QPSK points have exactly unit norm_sqr.
        let code = OstbcCode::alamouti();
        let con = Constellation::psk(4).unwrap();
        let obs = PreparedObservation {
            whitened: ComplexMatrix::zeros(2, 2),
            eff_channel: ComplexMatrix::identity(2),
        };
        assert_eq!(decode_exhaustive(&obs, &code, &con, 1.0).unwrap(), vec![0, 0]);
        assert_eq!(decode_symbolwise(&obs, &code, &con, 1.0).unwrap(), vec![0, 0]);
    }

    #[test]
    fn search_space_guard() {
        let mut code = OstbcCode::alamouti();
        code.m_symbols = 5; // hypothetical rate-5/2 code: 16^5 > 65536
        let con = Constellation::psk(16).unwrap();
        let obs = PreparedObservation {
            whitened: ComplexMatrix::zeros(2, 2),
            eff_channel: ComplexMatrix::identity(2),
        };
        assert!(matches!(
            decode_exhaustive(&obs, &code, &con, 1.0),
            Err(DecoderError::SearchSpaceTooLarge(_))
        ));
    }

    #[test]
    fn degenerate_channel_rejected() {
        let code = OstbcCode::alamouti();
        let con = Constellation::psk(2).unwrap();
        let obs = PreparedObservation {
            whitened: ComplexMatrix::zeros(2, 2),
            eff_channel: ComplexMatrix::zeros(2, 2),
        };
        assert!(matches!(
            decode_symbolwise(&obs, &code, &con, 1.0),
            Err(DecoderError::DegenerateChannel)
        ));
    }

    #[test]
    fn prepare_observation_cancels_own_signal_exactly_with_true_csi() {
        let mut rng = RngStream::derive(33, 0, UsageTag::Channel);
        let ch = sample_channel(2, 2, 2, &mut rng);
        let code = OstbcCode::alamouti();
        let con = Constellation::psk(4).unwrap();
        let a = 0.9;
        let own = code.encode(&[con.point(1), con.point(2)], 1.0).unwrap();
        let partner = code.encode(&[con.point(3), con.point(0)], 1.0).unwrap();
        // Noise-free reception at user 1.
        let y = (&ch.g_own(1) * &own).scale_re(a) + (&ch.g_cross(1) * &partner).scale_re(a);
        let obs =
            prepare_observation(a, &y, &ch.h1, &ch.g_own(1), &ch.g_cross(1), &own).unwrap();
        // What remains is exactly X * partner codeword.
        let expect = &obs.eff_channel * &partner;
        assert!(obs.whitened.max_abs_diff(&expect) < 1e-10);
    }
}
