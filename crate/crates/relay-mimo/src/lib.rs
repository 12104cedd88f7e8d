//! Link-level simulator and analytical performance engine for orthogonal
//! space-time block codes sent over a two-way amplify-and-forward MIMO
//! relay with imperfectly estimated cascaded channels.
//!
//! The two entry points are the analytical engine ([`analytic`]), which
//! evaluates the exact m.g.f.-based error rates, and the Monte Carlo
//! harness ([`harness`]), which simulates the four-phase protocol
//! end-to-end. Both consume the same [`config::SystemConfig`], so every
//! analytical curve has a directly comparable simulated counterpart.
//!
//! ```
//! use relay_mimo::analytic::{ser_mpsk, SnrModel};
//! use relay_mimo::config::SystemConfig;
//! use relay_mimo::ostbc::Constellation;
//!
//! // Two antennas per user, two at the relay, one pilot repetition,
//! // BPSK at an average SNR of 8 dB.
//! let cfg = SystemConfig::symmetric_alamouti(
//!     2, 2, 1, 10f64.powf(0.8), Constellation::psk(2).unwrap(),
//! );
//! let estimated = SnrModel::from_config(&cfg, 1, false);
//! let perfect = SnrModel::from_config(&cfg, 1, true);
//! let ber_est = ser_mpsk(&estimated, 2).unwrap();
//! let ber_perf = ser_mpsk(&perfect, 2).unwrap();
//! // imperfect CSI costs error-rate performance at any finite SNR
//! assert!(ber_perf < ber_est);
//! assert!(ber_est < 0.1 && ber_est > 0.01);
//! ```

pub mod analytic;
pub mod campaign;
pub mod channel;
pub mod config;
pub mod decoder;
pub mod estimation;
pub mod harness;
pub mod linalg;
pub mod ostbc;
pub mod protocol;
pub mod rng;
