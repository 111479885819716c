//! Exhaustive reference optimizer for tiny slotted instances.

use rayon::prelude::*;

use crate::dynamics::step_exact;
use crate::error::{Error, Result};
use crate::model::{ControlSignal, ForecastSeries, StepFunction, TclParams, EPS, KWS_PER_MWH};

pub const MAX_SLOTS: usize = 16;
pub const MAX_LOADS: usize = 3;
/// Argmin matrices kept in the result; the count is always exact.
pub const MAX_ARGMINS: usize = 4096;

/// Equal-length slots with one price and one ambient value each.
#[derive(Debug, Clone)]
pub struct DiscreteInstance {
    /// Slot length, seconds.
    pub slot_len: f64,
    pub prices: Vec<f64>,
    pub ambients: Vec<f64>,
    pub loads: Vec<TclParams>,
    /// ON slots per load; the population must use `loads.len()` times this many.
    pub on_slots: usize,
    /// Reject schedules that leave a comfort band.
    pub enforce_bands: bool,
}

impl DiscreteInstance {
    pub fn slots(&self) -> usize {
        self.prices.len()
    }

    pub fn horizon(&self) -> f64 {
        self.slot_len * self.slots() as f64
    }

    pub fn price_series(&self) -> Result<ForecastSeries> {
        ForecastSeries::price(self.breakpoints(), self.prices.clone())
    }

    pub fn ambient_series(&self) -> Result<ForecastSeries> {
        ForecastSeries::new(self.breakpoints(), self.ambients.clone())
    }

    fn breakpoints(&self) -> Vec<f64> {
        (0..=self.slots()).map(|k| k as f64 * self.slot_len).collect()
    }

    /// Step control that is ON in the marked slots.
    pub fn control(&self, slots: &[u8]) -> Result<ControlSignal> {
        let values = slots.iter().map(|&s| f64::from(s)).collect();
        ControlSignal::binary(StepFunction::new(self.breakpoints(), values)?)
    }

    fn check(&self) -> Result<()> {
        let k = self.slots();
        if k == 0 || k > MAX_SLOTS || self.loads.is_empty() || self.loads.len() > MAX_LOADS {
            return Err(Error::InstanceTooLarge(format!(
                "{k} slots and {} loads (limits: 1..={MAX_SLOTS} slots, 1..={MAX_LOADS} loads)",
                self.loads.len()
            )));
        }
        if self.ambients.len() != k {
            return Err(Error::InvalidSeries(format!(
                "{} ambient values for {k} slots",
                self.ambients.len()
            )));
        }
        if self.on_slots > k {
            return Err(Error::OnTimeExceedsHorizon {
                requested: self.on_slots as f64 * self.slot_len,
                horizon: self.horizon(),
            });
        }
        Ok(())
    }
}

/// Global minimum and every minimizing control matrix (`argmins[j][load][slot]`).
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub min_cost: f64,
    pub argmins: Vec<Vec<Vec<u8>>>,
    pub argmin_count: usize,
}

/// Cheapest masks of one load grouped by ON count.
struct LoadTable {
    best: Vec<f64>,
    masks: Vec<Vec<u32>>,
}

fn ties(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn load_table(inst: &DiscreteInstance, p: &TclParams) -> LoadTable {
    let k = inst.slots();
    let kw = p.electrical_power();
    let mut best = vec![f64::INFINITY; k + 1];
    let mut masks: Vec<Vec<u32>> = vec![Vec::new(); k + 1];
    'masks: for mask in 0u32..(1 << k) {
        let mut theta = p.theta0;
        let mut cost = 0.0;
        for slot in 0..k {
            let u = f64::from(mask >> slot & 1);
            theta = step_exact(theta, inst.ambients[slot], u, inst.slot_len, p);
            // the state is monotone within a slot, so end points bound it
            if inst.enforce_bands && (theta < p.lower() - EPS || theta > p.upper() + EPS) {
                continue 'masks;
            }
            cost += u * inst.prices[slot];
        }
        cost *= kw * inst.slot_len / KWS_PER_MWH;
        let c = mask.count_ones() as usize;
        if ties(cost, best[c]) {
            masks[c].push(mask);
        } else if cost < best[c] {
            best[c] = cost;
            masks[c].clear();
            masks[c].push(mask);
        }
    }
    LoadTable { best, masks }
}

/// Enumerates every binary schedule meeting the population ON-slot total.
pub fn brute_force_optimum(inst: &DiscreteInstance) -> Result<OracleResult> {
    inst.check()?;
    let k = inst.slots();
    let n = inst.loads.len();
    let total = n * inst.on_slots;
    let tables: Vec<LoadTable> = inst.loads.par_iter().map(|p| load_table(inst, p)).collect();

    // every split of the ON-slot total over the loads
    let mut splits: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        splits = splits
            .into_iter()
            .flat_map(|s| {
                (0..=k).map(move |c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    splits.retain(|s| s.iter().sum::<usize>() == total);

    let cost_of = |s: &[usize]| -> f64 { s.iter().enumerate().map(|(l, &c)| tables[l].best[c]).sum() };
    let min_cost = splits.iter().map(|s| cost_of(s)).fold(f64::INFINITY, f64::min);
    if !min_cost.is_finite() {
        return Err(Error::InfeasibleBudget {
            tau_bar: inst.on_slots as f64 / k as f64,
            lower: f64::NAN,
            upper: f64::NAN,
        });
    }

    let to_slots = |mask: u32| -> Vec<u8> { (0..k).map(|s| (mask >> s & 1) as u8).collect() };
    let mut argmins = Vec::new();
    let mut argmin_count = 0usize;
    for s in splits.iter().filter(|s| ties(cost_of(s), min_cost)) {
        let lists: Vec<&Vec<u32>> = s.iter().enumerate().map(|(l, &c)| &tables[l].masks[c]).collect();
        argmin_count += lists.iter().map(|m| m.len()).product::<usize>();
        let mut combos: Vec<Vec<u32>> = vec![Vec::new()];
        for list in &lists {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    list.iter().map(move |&m| {
                        let mut t = c.clone();
                        t.push(m);
                        t
                    })
                })
                .take(MAX_ARGMINS)
                .collect();
        }
        for c in combos {
            if argmins.len() >= MAX_ARGMINS {
                break;
            }
            argmins.push(c.into_iter().map(to_slots).collect());
        }
    }
    Ok(OracleResult {
        min_cost,
        argmins,
        argmin_count,
    })
}
