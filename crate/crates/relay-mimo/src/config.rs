//! Scenario parameters shared by the simulator and the analytical engine.

use serde::{Deserialize, Serialize};

use crate::ostbc::{Constellation, OstbcCode};

/// How the fixed relay gain is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RelayGain {
    /// Gain from the average power constraint `a = sqrt(b / (N_r T (1+ρ)))`.
    PowerBudget { b: f64 },
    /// Fixed `a = 1`, as used in all reference experiments.
    Fixed,
}

/// All scenario parameters for one configuration.
#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub n1: usize,
    pub n2: usize,
    pub nr: usize,
    /// Pilot repetitions in phase 1 (`P = M_p N_r`).
    pub m_p: usize,
    /// Pilot repetitions per user in phases 2-3 (`L_i = N_{p_i} N_i`).
    pub n_p1: usize,
    pub n_p2: usize,
    /// Average SNRs, linear.
    pub gamma_bar_1: f64,
    pub gamma_bar_2: f64,
    pub relay_gain: RelayGain,
    pub code: OstbcCode,
    pub constellation: Constellation,
}

impl SystemConfig {
    /// Sum SNR `ρ = γ̄_1 + γ̄_2`.
    pub fn rho(&self) -> f64 {
        self.gamma_bar_1 + self.gamma_bar_2
    }

    /// Fixed relay gain `a`.
    pub fn relay_gain(&self) -> f64 {
        match self.relay_gain {
            RelayGain::Fixed => 1.0,
            RelayGain::PowerBudget { b } => {
                (b / (self.nr as f64 * self.code.t_slots as f64 * (1.0 + self.rho()))).sqrt()
            }
        }
    }

    pub fn antennas(&self, user: usize) -> usize {
        match user {
            1 => self.n1,
            2 => self.n2,
            _ => panic!("user index must be 1 or 2"),
        }
    }

    pub fn gamma_bar(&self, user: usize) -> f64 {
        match user {
            1 => self.gamma_bar_1,
            2 => self.gamma_bar_2,
            _ => panic!("user index must be 1 or 2"),
        }
    }

    pub fn pilot_reps(&self, user: usize) -> usize {
        match user {
            1 => self.n_p1,
            2 => self.n_p2,
            _ => panic!("user index must be 1 or 2"),
        }
    }

    /// Per-symbol energy `γ̄_j / N_j` so that `E||c_j(m)||^2 = γ̄_j`.
    pub fn symbol_energy(&self, user: usize) -> f64 {
        self.gamma_bar(user) / self.antennas(user) as f64
    }

    /// Transmit power of a user's training columns. Training is sent at the
    /// same average power as data, which is what makes the estimation-noise
    /// scaling of the analytical model hold.
    pub fn pilot_power(&self, user: usize) -> f64 {
        self.gamma_bar(user)
    }

    /// Transmit power of the relay's phase-1 training columns.
    pub fn relay_pilot_power(&self) -> f64 {
        0.5 * self.rho()
    }

    /// Convenience constructor for the symmetric Alamouti scenarios used in
    /// the reference experiments.
    pub fn symmetric_alamouti(
        n_users: usize,
        nr: usize,
        n_p: usize,
        gamma_bar: f64,
        constellation: Constellation,
    ) -> Self {
        SystemConfig {
            n1: n_users,
            n2: n_users,
            nr,
            m_p: n_p,
            n_p1: n_p,
            n_p2: n_p,
            gamma_bar_1: gamma_bar,
            gamma_bar_2: gamma_bar,
            relay_gain: RelayGain::Fixed,
            code: OstbcCode::alamouti(),
            constellation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ostbc::Constellation;

    fn cfg(relay_gain: RelayGain) -> SystemConfig {
        SystemConfig {
            n1: 2,
            n2: 2,
            nr: 2,
            m_p: 1,
            n_p1: 1,
            n_p2: 1,
            gamma_bar_1: 1.0,
            gamma_bar_2: 1.0,
            relay_gain,
            code: OstbcCode::alamouti(),
            constellation: Constellation::psk(2).unwrap(),
        }
    }

    #[test]
    fn relay_gain_power_budget() {
        // b = 12, N_r = 2, T = 2, rho = 2 -> a = 1
        let c = cfg(RelayGain::PowerBudget { b: 12.0 });
        assert!((c.relay_gain() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn relay_gain_fixed_ignores_budget() {
        let c = cfg(RelayGain::Fixed);
        assert_eq!(c.relay_gain(), 1.0);
    }

    #[test]
    fn relay_gain_high_snr_limit() {
        // b = beta * gbar, gbar large -> a^2 -> beta / (2 N_r T)
        let beta = 6.0;
        let gbar = 1e9;
        let mut c = cfg(RelayGain::PowerBudget { b: beta * gbar });
        c.gamma_bar_1 = gbar;
        c.gamma_bar_2 = gbar;
        let a2 = c.relay_gain().powi(2);
        let limit = beta / (2.0 * 2.0 * 2.0);
        assert!((a2 / limit - 1.0).abs() < 1e-6);
    }

    #[test]
    fn symbol_energy_convention() {
        let c = cfg(RelayGain::Fixed);
        assert!((c.symbol_energy(1) - 0.5).abs() < 1e-15);
    }
}
