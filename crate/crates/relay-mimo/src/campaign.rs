//! Campaign specs, result files, and the operations behind the CLI
//! subcommands.
//!
//! Spec files are TOML with two sections mirroring the figure captions:
//!
//! ```toml
//! [scenario]
//! n1 = 2
//! n2 = 2
//! nr = 2
//! m_p = 1
//! n_p1 = 1
//! n_p2 = 1
//! constellation = "bpsk"   # bpsk qpsk 8psk 16psk 4qam 16qam 64qam
//! # relay_gain_budget = 12.0  # omit for fixed a = 1
//!
//! [campaign]
//! snr_db = [0.0, 4.0, 8.0]
//! modes = ["sim-estimated-csi", "analytic"]
//! seed = 1
//! max_trials = 2000000
//! min_error_events = 200
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{
    mgf_asymptotic_q1, ser_mpsk, ser_mqam, slope_fit, AnalyticError, SnrModel,
};
use crate::analytic::quad::adaptive_simpson;
use crate::config::{RelayGain, SystemConfig};
use crate::harness::{run_campaign, CsiMode, ErrorStats, StopRule};
use crate::ostbc::{Constellation, ConstellationKind, OstbcCode};

pub const RESULT_SCHEMA: &str = "results-v1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical cross-check failure: {0}")]
    CrossCheck(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::CrossCheckFailure { .. } => CliError::CrossCheck(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    /// Process exit code: 1 for configuration problems, 2 for numerical
    /// cross-check failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CrossCheck(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SimPerfectCsi,
    SimEstimatedCsi,
    Analytic,
    AnalyticAsymptotic,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::SimPerfectCsi => "sim-perfect-csi",
            Mode::SimEstimatedCsi => "sim-estimated-csi",
            Mode::Analytic => "analytic",
            Mode::AnalyticAsymptotic => "analytic-asymptotic",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n1: usize,
    pub n2: usize,
    pub nr: usize,
    pub m_p: usize,
    pub n_p1: usize,
    pub n_p2: usize,
    pub constellation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relay_gain_budget: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignSection {
    pub snr_db: Vec<f64>,
    pub modes: Vec<Mode>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_error_events: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub scenario: ScenarioSpec,
    pub campaign: CampaignSection,
}

fn parse_constellation(name: &str) -> Result<Constellation, CliError> {
    let c = match name {
        "bpsk" => Constellation::psk(2),
        "qpsk" | "4psk" => Constellation::psk(4),
        "8psk" => Constellation::psk(8),
        "16psk" => Constellation::psk(16),
        "4qam" => Constellation::qam(4),
        "16qam" => Constellation::qam(16),
        "64qam" => Constellation::qam(64),
        other => return Err(CliError::Config(format!("unknown constellation '{other}'"))),
    };
    c.map_err(|e| CliError::Config(e.to_string()))
}

impl CampaignSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: CampaignSpec =
            toml::from_str(text).map_err(|e| CliError::Config(format!("spec parse: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.scenario;
        if s.n1 == 0 || s.n2 == 0 || s.nr == 0 {
            return Err(CliError::Config("antenna counts must be positive".into()));
        }
        if s.m_p == 0 || s.n_p1 == 0 || s.n_p2 == 0 {
            return Err(CliError::Config("pilot repetition counts must be positive".into()));
        }
        if s.n1 != 2 || s.n2 != 2 {
            return Err(CliError::Config(
                "the Alamouti code requires two antennas at each user".into(),
            ));
        }
        parse_constellation(&s.constellation)?;
        if let Some(b) = s.relay_gain_budget {
            if !(b > 0.0) {
                return Err(CliError::Config("relay_gain_budget must be positive".into()));
            }
        }
        let c = &self.campaign;
        if c.snr_db.is_empty() {
            return Err(CliError::Config("snr_db grid must be nonempty".into()));
        }
        if c.snr_db.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Config("snr_db grid must be strictly increasing".into()));
        }
        if c.modes.is_empty() {
            return Err(CliError::Config("at least one mode is required".into()));
        }
        if c.modes.contains(&Mode::AnalyticAsymptotic) && s.nr.min(s.n1) != 1 {
            return Err(CliError::Config(
                "analytic-asymptotic mode requires min(nr, n1) = 1".into(),
            ));
        }
        Ok(())
    }

    /// Scenario at a given average SNR (dB).
    pub fn system_config(&self, snr_db: f64) -> SystemConfig {
        let s = &self.scenario;
        let gbar = 10f64.powf(snr_db / 10.0);
        SystemConfig {
            n1: s.n1,
            n2: s.n2,
            nr: s.nr,
            m_p: s.m_p,
            n_p1: s.n_p1,
            n_p2: s.n_p2,
            gamma_bar_1: gbar,
            gamma_bar_2: gbar,
            relay_gain: match s.relay_gain_budget {
                Some(b) => RelayGain::PowerBudget { b },
                None => RelayGain::Fixed,
            },
            code: OstbcCode::alamouti(),
            constellation: parse_constellation(&s.constellation).expect("validated"),
        }
    }

    pub fn stop_rule(&self) -> StopRule {
        let d = StopRule::default();
        StopRule {
            max_trials: self.campaign.max_trials.unwrap_or(d.max_trials),
            min_error_events: self.campaign.min_error_events.unwrap_or(d.min_error_events),
        }
    }
}

/// One output record.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub snr_db: f64,
    pub mode: String,
    pub ber: f64,
    pub ser: f64,
    pub ci95: f64,
    pub trials: u64,
}

fn sim_rows(mode: Mode, stats: &[ErrorStats], constellation: &Constellation) -> Vec<ResultRow> {
    let bpsk = constellation.order() == 2;
    stats
        .iter()
        .map(|s| ResultRow {
            snr_db: s.snr_db,
            mode: mode.label().to_string(),
            ber: s.ber(),
            ser: s.ser(),
            ci95: if bpsk { s.ci95_ber() } else { s.ci95_ser() },
            trials: s.trials,
        })
        .collect()
}

/// Analytic SER for one configuration (linear SNR inside `cfg`).
pub fn analytic_ser(cfg: &SystemConfig, perfect: bool) -> Result<f64, AnalyticError> {
    let model = SnrModel::from_config(cfg, 1, perfect);
    match cfg.constellation.kind {
        ConstellationKind::Psk(m) => ser_mpsk(&model, m),
        ConstellationKind::Qam(m) => ser_mqam(&model, m),
    }
}

fn asymptotic_ser(cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    let model = SnrModel::from_config(cfg, 1, false);
    let m = cfg.constellation.order();
    let g = match cfg.constellation.kind {
        ConstellationKind::Psk(_) => (std::f64::consts::PI / m as f64).sin().powi(2),
        ConstellationKind::Qam(_) => 3.0 / (2.0 * (m as f64 - 1.0)),
    };
    let upper = match cfg.constellation.kind {
        ConstellationKind::Psk(_) => std::f64::consts::PI * (m as f64 - 1.0) / m as f64,
        ConstellationKind::Qam(_) => std::f64::consts::FRAC_PI_2,
    };
    let err = std::cell::RefCell::new(None);
    let v = adaptive_simpson(
        |t: f64| {
            let sn = t.sin();
            if sn.abs() < 1e-9 {
                return 0.0;
            }
            match mgf_asymptotic_q1(&model, g / (sn * sn)) {
                Ok(x) => x,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        upper,
        1e-10,
        1e-12,
    ) / std::f64::consts::PI;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Executes every (mode, SNR) cell of a campaign.
pub fn run_spec(spec: &CampaignSpec, seed_override: Option<u64>) -> Result<Vec<ResultRow>, CliError> {
    let seed = seed_override.unwrap_or(spec.campaign.seed);
    let stop = spec.stop_rule();
    let base_cfg = spec.system_config(0.0);
    let grid = &spec.campaign.snr_db;
    let mut rows = Vec::new();
    for &mode in &spec.campaign.modes {
        match mode {
            Mode::SimPerfectCsi | Mode::SimEstimatedCsi => {
                let csi = if mode == Mode::SimPerfectCsi {
                    CsiMode::Perfect
                } else {
                    CsiMode::Estimated
                };
                let stats = run_campaign(&base_cfg, grid, csi, seed, stop);
                rows.extend(sim_rows(mode, &stats, &base_cfg.constellation));
            }
            Mode::Analytic | Mode::AnalyticAsymptotic => {
                for &db in grid {
                    let cfg = spec.system_config(db);
                    let bpsk = cfg.constellation.order() == 2;
                    let ser = match mode {
                        Mode::Analytic => analytic_ser(&cfg, false)?,
                        _ => asymptotic_ser(&cfg)?,
                    };
                    rows.push(ResultRow {
                        snr_db: db,
                        mode: mode.label().to_string(),
                        ber: if bpsk { ser } else { f64::NAN },
                        ser,
                        ci95: 0.0,
                        trials: 0,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// CSV serialization: schema comment, header, full-precision numbers.
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# schema: {RESULT_SCHEMA}");
    let _ = writeln!(out, "snr_db,mode,ber,ser,ci95,trials");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{}", r.snr_db, r.mode, r.ber, r.ser, r.ci95, r.trials);
    }
    out
}

/// JSON-lines serialization.
pub fn to_jsonl(rows: &[ResultRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(out, "{}", serde_json::to_string(r).expect("plain struct"));
    }
    out
}

/// Run manifest: the resolved spec plus provenance, itself a loadable
/// spec file.
pub fn manifest(spec: &CampaignSpec, seed: u64, format: &str) -> String {
    let mut resolved = spec.clone();
    resolved.campaign.seed = seed;
    let d = StopRule::default();
    resolved.campaign.max_trials =
        Some(resolved.campaign.max_trials.unwrap_or(d.max_trials));
    resolved.campaign.min_error_events =
        Some(resolved.campaign.min_error_events.unwrap_or(d.min_error_events));
    let body = toml::to_string_pretty(&resolved).expect("spec serializes");
    format!(
        "{body}\n[provenance]\nversion = \"{}\"\nformat = \"{format}\"\n",
        env!("CARGO_PKG_VERSION")
    )
}

/// Parses a result file (CSV or JSONL) back into rows.
pub fn parse_results(text: &str) -> Result<Vec<ResultRow>, CliError> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("snr_db,") {
            continue;
        }
        if line.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(line)
                .map_err(|e| CliError::Config(format!("bad jsonl row: {e}")))?;
            rows.push(ResultRow {
                snr_db: v["snr_db"].as_f64().unwrap_or(f64::NAN),
                mode: v["mode"].as_str().unwrap_or("").to_string(),
                ber: v["ber"].as_f64().unwrap_or(f64::NAN),
                ser: v["ser"].as_f64().unwrap_or(f64::NAN),
                ci95: v["ci95"].as_f64().unwrap_or(f64::NAN),
                trials: v["trials"].as_u64().unwrap_or(0),
            });
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(CliError::Config(format!("bad csv row: '{line}'")));
        }
        let num =
            |s: &str| s.parse::<f64>().map_err(|e| CliError::Config(format!("bad number: {e}")));
        rows.push(ResultRow {
            snr_db: num(f[0])?,
            mode: f[1].to_string(),
            ber: num(f[2])?,
            ser: num(f[3])?,
            ci95: num(f[4])?,
            trials: f[5].parse().map_err(|e| CliError::Config(format!("bad count: {e}")))?,
        });
    }
    Ok(rows)
}

/// Per-mode log-log slope over the `points` highest-SNR rows. Uses BER
/// when finite, SER otherwise.
pub fn slopes(rows: &[ResultRow], points: usize) -> Result<Vec<(String, f64)>, CliError> {
    let mut modes: Vec<String> = Vec::new();
    for r in rows {
        if !modes.contains(&r.mode) {
            modes.push(r.mode.clone());
        }
    }
    let mut out = Vec::new();
    for mode in modes {
        let curve: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.mode == mode)
            .map(|r| {
                let rate = if r.ber.is_finite() { r.ber } else { r.ser };
                (10f64.powf(r.snr_db / 10.0), rate)
            })
            .filter(|&(_, rate)| rate > 0.0)
            .collect();
        let slope = slope_fit(&curve, points).map_err(|e| match e {
            AnalyticError::InsufficientData(m) => CliError::Config(format!("{mode}: {m}")),
            other => CliError::from(other),
        })?;
        out.push((mode, slope));
    }
    Ok(out)
}
