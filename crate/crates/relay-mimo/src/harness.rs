//! Monte Carlo campaign driver: per-trial protocol pipeline, error
//! accounting, deterministic parallel scheduling, and simulation-vs-theory
//! comparison.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::sample_channel;
use crate::config::SystemConfig;
use crate::decoder::{decode_symbolwise, prepare_observation, DecoderError};
use crate::estimation::estimate_cascaded;
use crate::estimation::estimate_individual;
use crate::linalg::{C64, ComplexMatrix};
use crate::protocol::{cascaded_phase_signals, phase1_signals, phase4_signals, relay_pilot, user_pilot};
use crate::rng::{RngStream, UsageTag};

/// Whether the decoder sees the true channels or the training-based
/// estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CsiMode {
    Perfect,
    Estimated,
}

/// Per-SNR-point error accounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorStats {
    pub snr_db: f64,
    pub trials: u64,
    pub symbols: u64,
    pub bits: u64,
    pub symbol_errors: u64,
    pub bit_errors: u64,
}

impl ErrorStats {
    fn zero(snr_db: f64) -> Self {
        ErrorStats { snr_db, trials: 0, symbols: 0, bits: 0, symbol_errors: 0, bit_errors: 0 }
    }

    fn merge(self, other: ErrorStats) -> ErrorStats {
        ErrorStats {
            snr_db: self.snr_db,
            trials: self.trials + other.trials,
            symbols: self.symbols + other.symbols,
            bits: self.bits + other.bits,
            symbol_errors: self.symbol_errors + other.symbol_errors,
            bit_errors: self.bit_errors + other.bit_errors,
        }
    }

    pub fn ser(&self) -> f64 {
        if self.symbols == 0 { 0.0 } else { self.symbol_errors as f64 / self.symbols as f64 }
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 { 0.0 } else { self.bit_errors as f64 / self.bits as f64 }
    }

    /// Normal-approximation 95% half-width for the given rate and count.
    fn ci95(rate: f64, n: u64) -> f64 {
        if n == 0 {
            return f64::NAN;
        }
        1.96 * (rate * (1.0 - rate) / n as f64).sqrt()
    }

    pub fn ci95_ser(&self) -> f64 {
        Self::ci95(self.ser(), self.symbols)
    }

    pub fn ci95_ber(&self) -> f64 {
        Self::ci95(self.ber(), self.bits)
    }
}

/// Trial budget: run until `min_error_events` symbol errors or
/// `max_trials`, whichever comes first.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StopRule {
    pub max_trials: u64,
    pub min_error_events: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { max_trials: 2_000_000, min_error_events: 200 }
    }
}

fn draw_symbols(cfg: &SystemConfig, rng: &mut RngStream) -> (Vec<usize>, Vec<usize>) {
    let m = cfg.constellation.order();
    let n = cfg.code.m_symbols;
    let own = (0..n).map(|_| rng.gen_index(m)).collect();
    let partner = (0..n).map(|_| rng.gen_index(m)).collect();
    (own, partner)
}

fn encode_indices(cfg: &SystemConfig, idx: &[usize], user: usize) -> ComplexMatrix {
    let syms: Vec<C64> = idx.iter().map(|&k| cfg.constellation.point(k)).collect();
    cfg.code.encode(&syms, cfg.symbol_energy(user)).expect("index count matches the code")
}

/// One full protocol round evaluated at the designated receiver (User-1
/// decoding User-2's block). Returns (symbol errors, bit errors).
fn run_trial(
    cfg: &SystemConfig,
    mode: CsiMode,
    seed: u64,
    trial: u64,
    noise_free: bool,
) -> Result<(u64, u64), DecoderError> {
    // the zero-noise override keeps the draw order intact
    let damp = if noise_free { 0.0 } else { 1.0 };
    let mut ch_rng = RngStream::derive(seed, trial, UsageTag::Channel);
    let ch = sample_channel(cfg.n1, cfg.n2, cfg.nr, &mut ch_rng);

    let mut sym_rng = RngStream::derive(seed, trial, UsageTag::DataSymbols);
    let (own_idx, partner_idx) = draw_symbols(cfg, &mut sym_rng);
    let own_cw = encode_indices(cfg, &own_idx, 1);
    let partner_cw = encode_indices(cfg, &partner_idx, 2);

    // Data phase.
    let t = cfg.code.t_slots;
    let mut relay_rng = RngStream::derive(seed, trial, UsageTag::RelayNoise);
    let w_r = relay_rng.complex_gaussian_matrix(cfg.nr, t).scale_re(damp);
    let mut user_rng = RngStream::derive(seed, trial, UsageTag::UserNoise(1));
    let w1 = user_rng.complex_gaussian_matrix(cfg.n1, t).scale_re(damp);
    let w2 = ComplexMatrix::zeros(cfg.n2, t); // receiver 2 unused
    let (y1, _) = phase4_signals(cfg, &ch, &own_cw, &partner_cw, &w_r, &w1, &w2);

    let a = cfg.relay_gain();
    let (h_hat, g_own_hat, g_cross_hat) = match mode {
        CsiMode::Perfect => (ch.h1.clone(), ch.g_own(1), ch.g_cross(1)),
        CsiMode::Estimated => {
            // Phase 1: own relay-to-user channel for the whitener.
            let mut p1 = RngStream::derive(seed, trial, UsageTag::PilotNoisePhase1(1));
            let sp = relay_pilot(cfg);
            let n1 = p1.complex_gaussian_matrix(cfg.n1, sp.cols()).scale_re(damp);
            let zeros2 = ComplexMatrix::zeros(cfg.n2, sp.cols());
            let (r1, _) = phase1_signals(cfg, &ch, &n1, &zeros2);
            let h_hat = estimate_individual(&r1, &sp)?;

            // Phase 2: User-1 transmits; its own cascade is observed back.
            let mut p2 = RngStream::derive(seed, trial, UsageTag::PilotNoisePhase2);
            let cp1 = user_pilot(cfg, 1);
            let u2 = p2.complex_gaussian_matrix(cfg.nr, cp1.cols()).scale_re(damp);
            let n_tx = p2.complex_gaussian_matrix(cfg.n1, cp1.cols()).scale_re(damp);
            let n_rx = ComplexMatrix::zeros(cfg.n2, cp1.cols());
            let ph2 = cascaded_phase_signals(cfg, &ch, 1, &u2, &n_tx, &n_rx);
            let g_own_hat = estimate_cascaded(&ph2.at_transmitter, &cp1)?;

            // Phase 3: User-2 transmits; User-1 sees the cross cascade.
            let mut p3 = RngStream::derive(seed, trial, UsageTag::PilotNoisePhase3);
            let cp2 = user_pilot(cfg, 2);
            let u3 = p3.complex_gaussian_matrix(cfg.nr, cp2.cols()).scale_re(damp);
            let n_partner = p3.complex_gaussian_matrix(cfg.n1, cp2.cols()).scale_re(damp);
            let n_tx2 = ComplexMatrix::zeros(cfg.n2, cp2.cols());
            let ph3 = cascaded_phase_signals(cfg, &ch, 2, &u3, &n_tx2, &n_partner);
            let g_cross_hat = estimate_cascaded(&ph3.at_partner, &cp2)?;

            (h_hat, g_own_hat, g_cross_hat)
        }
    };

    let obs = prepare_observation(a, &y1, &h_hat, &g_own_hat, &g_cross_hat, &own_cw)?;
    let decided = decode_symbolwise(&obs, &cfg.code, &cfg.constellation, cfg.symbol_energy(2))?;

    let mut sym_err = 0u64;
    let mut bit_err = 0u64;
    for (d, t) in decided.iter().zip(&partner_idx) {
        if d != t {
            sym_err += 1;
        }
        bit_err += u64::from(cfg.constellation.bit_errors(*d, *t));
    }
    Ok((sym_err, bit_err))
}

/// Deterministic batch size: scheduling is in fixed-size chunks whose
/// boundaries do not depend on the worker count.
const BATCH: u64 = 4096;

/// Runs one SNR point. `cfg` must already carry the linear SNR; `snr_db`
/// is recorded for reporting only. Bit-identical results for any worker
/// count because trial streams are keyed by global trial index and counts
/// are merged associatively.
pub fn run_point(
    cfg: &SystemConfig,
    snr_db: f64,
    mode: CsiMode,
    seed: u64,
    stop: StopRule,
) -> ErrorStats {
    run_point_opts(cfg, snr_db, mode, seed, stop, false)
}

/// [`run_point`] with the zero-noise override used by sanity tests.
pub fn run_point_opts(
    cfg: &SystemConfig,
    snr_db: f64,
    mode: CsiMode,
    seed: u64,
    stop: StopRule,
    noise_free: bool,
) -> ErrorStats {
    let mut total = ErrorStats::zero(snr_db);
    let mut next_trial = 0u64;
    while total.trials < stop.max_trials && total.symbol_errors < stop.min_error_events {
        let round = BATCH.min(stop.max_trials - total.trials).max(1);
        let round_stats = (next_trial..next_trial + round)
            .into_par_iter()
            .map(|trial| {
                let (se, be) = run_trial(cfg, mode, seed, trial, noise_free)
                    .expect("trial pipeline is total");
                ErrorStats {
                    snr_db,
                    trials: 1,
                    symbols: cfg.code.m_symbols as u64,
                    bits: (cfg.code.m_symbols * cfg.constellation.bits_per_symbol()) as u64,
                    symbol_errors: se,
                    bit_errors: be,
                }
            })
            .reduce(|| ErrorStats::zero(snr_db), ErrorStats::merge);
        total = total.merge(round_stats);
        next_trial += round;
    }
    total
}

/// Runs a whole SNR grid for one mode; `snr_db` values set
/// `γ̄_1 = γ̄_2 = 10^(dB/10)`.
pub fn run_campaign(
    cfg: &SystemConfig,
    snr_db_grid: &[f64],
    mode: CsiMode,
    seed: u64,
    stop: StopRule,
) -> Vec<ErrorStats> {
    snr_db_grid
        .iter()
        .map(|&db| {
            let mut c = cfg.clone();
            let gbar = 10f64.powf(db / 10.0);
            c.gamma_bar_1 = gbar;
            c.gamma_bar_2 = gbar;
            run_point(&c, db, mode, seed, stop)
        })
        .collect()
}

/// One row of a simulation-vs-analytic comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComparePoint {
    pub snr_db: f64,
    pub simulated: f64,
    pub analytic: f64,
    /// `(sim − analytic)/σ_sim` with the binomial standard error of the
    /// simulated rate.
    pub z: f64,
}

/// Z-scores of simulated rates against an analytic curve; `use_bits`
/// selects BER (true) or SER (false).
pub fn compare(sim: &[ErrorStats], analytic: &[f64], use_bits: bool) -> Vec<ComparePoint> {
    assert_eq!(sim.len(), analytic.len());
    sim.iter()
        .zip(analytic)
        .map(|(s, &a)| {
            let (rate, n) = if use_bits { (s.ber(), s.bits) } else { (s.ser(), s.symbols) };
            let sigma = (rate * (1.0 - rate) / n.max(1) as f64).sqrt();
            let z = if sigma > 0.0 { (rate - a) / sigma } else { f64::INFINITY * (rate - a).signum() };
            ComparePoint { snr_db: s.snr_db, simulated: rate, analytic: a, z }
        })
        .collect()
}
