//! Signal-level simulation of the four-phase protocol: relay pilot
//! broadcast, the two cascaded-training phases, and two-way OSTBC data
//! relaying with fixed gain.
//!
//! The functions here take noise matrices explicitly so tests can inject
//! zero noise; the Monte Carlo harness draws them from per-trial streams.

use crate::channel::ChannelRealization;
use crate::config::SystemConfig;
use crate::linalg::ComplexMatrix;

/// Horizontal repetition of a scaled unitary DFT block.
fn pilot_blocks(n: usize, reps: usize, power: f64) -> ComplexMatrix {
    let block = ComplexMatrix::unitary_dft(n).scale_re(power.sqrt());
    let mut out = ComplexMatrix::zeros(n, n * reps);
    for rep in 0..reps {
        for col in 0..n {
            for row in 0..n {
                out.set(row, rep * n + col, block.get(row, col));
            }
        }
    }
    out
}

/// Phase-1 pilot `S_p`: `M_p` transmissions of an `N_r x N_r` unitary
/// matrix, scaled to the relay's training power.
pub fn relay_pilot(cfg: &SystemConfig) -> ComplexMatrix {
    pilot_blocks(cfg.nr, cfg.m_p, cfg.relay_pilot_power())
}

/// Training matrix `C_{p_i}` of User-`i`: `N_{p_i}` unitary blocks at the
/// user's transmit power.
pub fn user_pilot(cfg: &SystemConfig, user: usize) -> ComplexMatrix {
    pilot_blocks(cfg.antennas(user), cfg.pilot_reps(user), cfg.pilot_power(user))
}

/// Phase 1: `R_i = H_i S_p + N_i` at both users.
pub fn phase1_signals(
    cfg: &SystemConfig,
    ch: &ChannelRealization,
    noise1: &ComplexMatrix,
    noise2: &ComplexMatrix,
) -> (ComplexMatrix, ComplexMatrix) {
    let sp = relay_pilot(cfg);
    let r1 = &ch.h1 * &sp + noise1.clone();
    let r2 = &ch.h2 * &sp + noise2.clone();
    (r1, r2)
}

/// Received matrices of one cascaded-training phase.
#[derive(Debug, Clone)]
pub struct CascadedPhase {
    /// `R̄` at the transmitting user (its own cascade `G_i C_p + H_i U + N`).
    pub at_transmitter: ComplexMatrix,
    /// `R̃` at the partner (`H_j H_iᵀ C_p + H_j U + N`).
    pub at_partner: ComplexMatrix,
}

/// Phase 2 (or, with `tx_user` swapped, phase 3): User-`tx_user` transmits
/// its pilot, the relay re-broadcasts with unity gain, both users listen.
/// The same relay noise realization `U` appears in both receptions.
pub fn cascaded_phase_signals(
    cfg: &SystemConfig,
    ch: &ChannelRealization,
    tx_user: usize,
    relay_noise: &ComplexMatrix,
    noise_at_tx: &ComplexMatrix,
    noise_at_partner: &ComplexMatrix,
) -> CascadedPhase {
    let rx_user = 3 - tx_user;
    let cp = user_pilot(cfg, tx_user);
    let hi = ch.h(tx_user);
    let hj = ch.h(rx_user);
    // Relay observes H_iᵀ C_p + U and forwards it unchanged.
    let relayed = &hi.transpose() * &cp + relay_noise.clone();
    CascadedPhase {
        at_transmitter: hi * &relayed + noise_at_tx.clone(),
        at_partner: hj * &relayed + noise_at_partner.clone(),
    }
}

/// Phase 4 composed from the two hops: `Y_r = Σ H_iᵀ C_i + W_r`, then
/// `Y_i = a H_i Y_r + W_i`.
pub fn phase4_signals(
    cfg: &SystemConfig,
    ch: &ChannelRealization,
    c1: &ComplexMatrix,
    c2: &ComplexMatrix,
    relay_noise: &ComplexMatrix,
    noise1: &ComplexMatrix,
    noise2: &ComplexMatrix,
) -> (ComplexMatrix, ComplexMatrix) {
    let a = cfg.relay_gain();
    let y_r = &ch.h1.transpose() * c1 + &ch.h2.transpose() * c2 + relay_noise.clone();
    let y1 = (&ch.h1 * &y_r).scale_re(a) + noise1.clone();
    let y2 = (&ch.h2 * &y_r).scale_re(a) + noise2.clone();
    (y1, y2)
}

/// Phase 4 written out directly as
/// `Y_i = a G_i C_i + a G_{i,j} C_j + a H_i W_r + W_i`; used as the
/// algebraic-identity oracle for [`phase4_signals`].
pub fn phase4_expanded(
    cfg: &SystemConfig,
    ch: &ChannelRealization,
    user: usize,
    own_codeword: &ComplexMatrix,
    partner_codeword: &ComplexMatrix,
    relay_noise: &ComplexMatrix,
    user_noise: &ComplexMatrix,
) -> ComplexMatrix {
    let a = cfg.relay_gain();
    let hi = ch.h(user);
    (&ch.g_own(user) * own_codeword).scale_re(a)
        + (&ch.g_cross(user) * partner_codeword).scale_re(a)
        + (hi * relay_noise).scale_re(a)
        + user_noise.clone()
}
