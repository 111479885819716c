use crate::error::{Error, Result};
use crate::model::{Population, EPS, KWS_PER_KWH};

/// Total energy budget of the population over the horizon.
///
/// `tau` is the ON time in load-seconds (`ηE/P`), `tau_bar = tau / (N T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    pub energy_kwh: f64,
    pub tau: f64,
    pub tau_bar: f64,
    loads: usize,
    horizon: f64,
}

impl EnergyBudget {
    pub fn from_energy_kwh(energy_kwh: f64, pop: &Population, horizon: f64) -> Result<Self> {
        let tau = pop.efficiency() * energy_kwh * KWS_PER_KWH / pop.power_thermal();
        Self::build(energy_kwh, tau, pop.len(), horizon)
    }

    pub fn from_tau_bar(tau_bar: f64, pop: &Population, horizon: f64) -> Result<Self> {
        let tau = tau_bar * pop.len() as f64 * horizon;
        let energy_kwh = tau * pop.power_thermal() / (pop.efficiency() * KWS_PER_KWH);
        Self::build(energy_kwh, tau, pop.len(), horizon)
    }

    fn build(energy_kwh: f64, tau: f64, loads: usize, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidSeries(format!("horizon {horizon} must be positive")));
        }
        let tau_bar = tau / (loads as f64 * horizon);
        if !(-EPS..=1.0 + EPS).contains(&tau_bar) {
            return Err(Error::BudgetOutOfRange { tau_bar });
        }
        Ok(Self {
            energy_kwh,
            tau,
            tau_bar: tau_bar.clamp(0.0, 1.0),
            loads,
            horizon,
        })
    }

    /// Required ON time of each load, `tau / N`, seconds.
    pub fn tau_per_load(&self) -> f64 {
        self.tau / self.loads as f64
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::fixtures::*;

    #[test]
    fn energy_and_tau_bar_agree() {
        let pop = Population::new(vec![home_one(), home_two()]).unwrap();
        let b = EnergyBudget::from_tau_bar(1.0 / 3.0, &pop, 86400.0).unwrap();
        assert!((b.tau - 2.0 * 86400.0 / 3.0).abs() < 1e-6);
        assert!((b.tau_per_load() - 28800.0).abs() < 1e-9);
        // E = τ P / η in kWh: 57600 s * 14 kW / 2.5 / 3600
        assert!((b.energy_kwh - 89.6).abs() < 1e-9);
        let c = EnergyBudget::from_energy_kwh(89.6, &pop, 86400.0).unwrap();
        assert!((c.tau_bar - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_rejected() {
        let pop = Population::new(vec![home_one()]).unwrap();
        assert!(EnergyBudget::from_tau_bar(1.2, &pop, 100.0).is_err());
        assert!(EnergyBudget::from_tau_bar(-0.1, &pop, 100.0).is_err());
        assert!(EnergyBudget::from_tau_bar(0.0, &pop, 100.0).is_ok());
    }
}
