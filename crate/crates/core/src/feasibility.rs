//! Feasible interval for the population energy budget.

use std::fmt;

use crate::model::{EnergyBudget, ForecastSeries, Population, KWS_PER_KWH, EPS};

/// Exact time average of the ambient forecast.
pub fn mean_ambient(ambient: &ForecastSeries) -> f64 {
    ambient.mean()
}

/// Budget bounds from holding every load at its upper (lower bound of the budget)
/// or lower (upper bound of the budget) comfort boundary for the whole horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityBounds {
    pub tau_bar_lower: f64,
    /// Upper bound clipped to 1.
    pub tau_bar_upper: f64,
    pub tau_bar_upper_raw: f64,
    /// kWh.
    pub energy_lower: f64,
    /// kWh, from the unclipped upper bound.
    pub energy_upper: f64,
    /// Set when the raw upper bound exceeds 1: holding the lower boundary on average
    /// would need more than full power.
    pub upper_clipped: bool,
    /// Largest instantaneous holding control at an upper boundary over all loads and
    /// ambient segments.
    pub max_upper_holding: f64,
    /// Largest instantaneous holding control at a lower boundary.
    pub max_lower_holding: f64,
    /// Smallest instantaneous holding control at an upper boundary.
    pub min_upper_holding: f64,
}

impl FeasibilityBounds {
    /// True when every instantaneous holding control lies in `[0, 1]`.
    pub fn sliding_feasible(&self) -> bool {
        self.min_upper_holding >= -EPS && self.max_lower_holding <= 1.0 + EPS
    }
}

impl fmt::Display for FeasibilityBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tau_bar_lower = {}", self.tau_bar_lower)?;
        writeln!(f, "tau_bar_upper = {}", self.tau_bar_upper)?;
        writeln!(f, "tau_bar_upper_raw = {}", self.tau_bar_upper_raw)?;
        writeln!(f, "energy_lower_kwh = {}", self.energy_lower)?;
        writeln!(f, "energy_upper_kwh = {}", self.energy_upper)?;
        writeln!(f, "upper_clipped = {}", self.upper_clipped)?;
        writeln!(f, "min_upper_holding = {}", self.min_upper_holding)?;
        writeln!(f, "max_upper_holding = {}", self.max_upper_holding)?;
        write!(f, "max_lower_holding = {}", self.max_lower_holding)
    }
}

pub fn tau_bounds(pop: &Population, ambient: &ForecastSeries, horizon: f64) -> FeasibilityBounds {
    let mean = mean_ambient(ambient);
    let n = pop.len() as f64;
    let p = pop.power_thermal();
    let (mut lo, mut hi) = (0.0, 0.0);
    let (amin, amax) = (ambient.min_value(), ambient.max_value());
    let mut max_upper_holding = f64::NEG_INFINITY;
    let mut min_upper_holding = f64::INFINITY;
    let mut max_lower_holding = f64::NEG_INFINITY;
    for l in pop.loads() {
        let k = l.alpha / l.beta;
        lo += k * (mean - l.upper());
        hi += k * (mean - l.lower());
        max_upper_holding = max_upper_holding.max(l.holding_control(amax, l.upper()));
        min_upper_holding = min_upper_holding.min(l.holding_control(amin, l.upper()));
        max_lower_holding = max_lower_holding.max(l.holding_control(amax, l.lower()));
    }
    let tau_bar_lower = lo / (n * p);
    let tau_bar_upper_raw = hi / (n * p);
    let to_kwh = |tb: f64| tb * n * pop.electrical_power() * horizon / KWS_PER_KWH;
    FeasibilityBounds {
        tau_bar_lower,
        tau_bar_upper: tau_bar_upper_raw.min(1.0),
        tau_bar_upper_raw,
        energy_lower: to_kwh(tau_bar_lower),
        energy_upper: to_kwh(tau_bar_upper_raw),
        upper_clipped: tau_bar_upper_raw > 1.0,
        max_upper_holding,
        max_lower_holding,
        min_upper_holding,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    BelowLower,
    AboveUpper,
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::BelowLower => "infeasible: below lower bound",
            Verdict::AboveUpper => "infeasible: above upper bound",
        })
    }
}

pub fn check_feasible(budget: &EnergyBudget, bounds: &FeasibilityBounds) -> Verdict {
    if budget.tau_bar < bounds.tau_bar_lower - EPS {
        Verdict::BelowLower
    } else if budget.tau_bar > bounds.tau_bar_upper + EPS {
        Verdict::AboveUpper
    } else {
        Verdict::Accept
    }
}
