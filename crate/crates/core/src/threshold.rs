//! Optimal schedule when comfort bands are ignored: every load runs during the
//! cheapest `τ/N` seconds of the horizon, all loads in lockstep.

use rayon::prelude::*;

use crate::dynamics::simulate_with_control;
use crate::error::{Error, Result};
use crate::model::{
    procurement_cost, uniform_grid, ControlSignal, EnergyBudget, ForecastSeries, OnSet, Population,
    Segment, StepFunction, Trajectory, EPS,
};

/// Total time during which `price <= level`, seconds.
pub fn occupancy(price: &StepFunction, level: f64) -> f64 {
    price
        .segments()
        .filter(|s| s.value <= level)
        .map(|s| s.len())
        .sum()
}

fn check_on_time(price: &StepFunction, tau_per_load: f64) -> Result<()> {
    let horizon = price.horizon();
    if tau_per_load > horizon + EPS {
        return Err(Error::OnTimeExceedsHorizon {
            requested: tau_per_load,
            horizon,
        });
    }
    if !(tau_per_load >= -EPS) {
        return Err(Error::BudgetOutOfRange {
            tau_bar: tau_per_load / horizon,
        });
    }
    Ok(())
}

/// Smallest segment price whose occupancy reaches `tau_per_load`. Zero when no ON
/// time is requested.
pub fn threshold_price(price: &StepFunction, tau_per_load: f64) -> Result<f64> {
    check_on_time(price, tau_per_load)?;
    if tau_per_load <= EPS {
        return Ok(0.0);
    }
    let mut segs: Vec<Segment> = price.segments().collect();
    segs.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut acc = 0.0;
    let mut k = 0;
    while k < segs.len() {
        let level = segs[k].value;
        while k < segs.len() && segs[k].value == level {
            acc += segs[k].len();
            k += 1;
        }
        if acc >= tau_per_load - EPS {
            return Ok(level);
        }
    }
    Ok(segs.last().map_or(0.0, |s| s.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    On,
    Off,
    Edge,
}

/// Maximal run of segments priced exactly at the threshold.
#[derive(Debug, Clone, Copy)]
struct Plateau {
    start: f64,
    end: f64,
    left: Side,
    right: Side,
}

impl Plateau {
    fn len(&self) -> f64 {
        self.end - self.start
    }

    fn touches_on(&self) -> bool {
        self.left == Side::On || self.right == Side::On
    }

    /// Switches saved by filling the whole block (free blocks only).
    fn bonus(&self) -> u32 {
        match (self.left, self.right) {
            (Side::On, Side::On) => 2,
            (Side::On, Side::Edge) | (Side::Edge, Side::On) => 1,
            _ => 0,
        }
    }

    /// Switches added by filling any part of the block (blocks with no ON side).
    fn penalty(&self) -> u32 {
        match (self.left, self.right) {
            (Side::Off, Side::Off) => 2,
            (Side::Edge, Side::Edge) => 0,
            _ => 1,
        }
    }

    /// Interval of length `x` placed against the side that avoids new switches.
    fn place(&self, x: f64) -> (f64, f64) {
        let x = x.min(self.len());
        match (self.left, self.right) {
            (Side::On, _) => (self.start, self.start + x),
            (_, Side::On) => (self.end - x, self.end),
            (Side::Off, Side::Edge) => (self.end - x, self.end),
            _ => (self.start, self.start + x),
        }
    }
}

fn plateaus(segs: &[Segment], level: f64) -> Vec<Plateau> {
    let side = |k: Option<usize>| match k {
        None => Side::Edge,
        Some(k) if segs[k].value < level => Side::On,
        Some(_) => Side::Off,
    };
    let mut out = Vec::new();
    let mut k = 0;
    while k < segs.len() {
        if segs[k].value != level {
            k += 1;
            continue;
        }
        let first = k;
        while k < segs.len() && segs[k].value == level {
            k += 1;
        }
        out.push(Plateau {
            start: segs[first].start,
            end: segs[k - 1].end,
            left: side(first.checked_sub(1)),
            right: side((k < segs.len()).then_some(k)),
        });
    }
    out
}

/// Blocks (indices into `blocks`) to fill completely with at most `fill` seconds so
/// that the most switches are saved.
fn pick_full(blocks: &[&Plateau], fill: f64) -> Vec<usize> {
    let mut ones: Vec<usize> = (0..blocks.len()).filter(|&i| blocks[i].bonus() == 1).collect();
    let mut twos: Vec<usize> = (0..blocks.len()).filter(|&i| blocks[i].bonus() == 2).collect();
    ones.sort_by(|&a, &b| blocks[a].len().total_cmp(&blocks[b].len()));
    twos.sort_by(|&a, &b| blocks[a].len().total_cmp(&blocks[b].len()));
    let mut best: (u32, Vec<usize>) = (0, Vec::new());
    for k1 in 0..=ones.len() {
        let mut used: f64 = ones[..k1].iter().map(|&i| blocks[i].len()).sum();
        if used > fill + EPS {
            break;
        }
        let mut chosen: Vec<usize> = ones[..k1].to_vec();
        for &i in &twos {
            if used + blocks[i].len() <= fill + EPS {
                used += blocks[i].len();
                chosen.push(i);
            } else {
                break;
            }
        }
        let score: u32 = chosen.iter().map(|&i| blocks[i].bonus()).sum();
        if score > best.0 {
            best = (score, chosen);
        }
    }
    best.1
}

/// Chooses blocks without an ON neighbour to absorb `need` seconds with the fewest
/// added switches.
fn pick_costly(blocks: &[&Plateau], need: f64) -> Vec<usize> {
    let mut ones: Vec<usize> = (0..blocks.len()).filter(|&i| blocks[i].penalty() <= 1).collect();
    let mut twos: Vec<usize> = (0..blocks.len()).filter(|&i| blocks[i].penalty() == 2).collect();
    ones.sort_by(|&a, &b| blocks[b].len().total_cmp(&blocks[a].len()));
    twos.sort_by(|&a, &b| blocks[b].len().total_cmp(&blocks[a].len()));
    let mut best: Option<(u32, Vec<usize>)> = None;
    for k1 in 0..=ones.len() {
        let mut cap: f64 = ones[..k1].iter().map(|&i| blocks[i].len()).sum();
        let mut chosen: Vec<usize> = ones[..k1].to_vec();
        for &i in &twos {
            if cap >= need - EPS {
                break;
            }
            cap += blocks[i].len();
            chosen.push(i);
        }
        if cap < need - EPS {
            continue;
        }
        let score: u32 = chosen.iter().map(|&i| blocks[i].penalty()).sum();
        if best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, chosen));
        }
    }
    best.map(|b| b.1).unwrap_or_default()
}

/// Fills `order` blocks earliest-first with `amount` seconds.
fn distribute(blocks: &[&Plateau], mut order: Vec<usize>, mut amount: f64, out: &mut Vec<(f64, f64)>) {
    order.sort_by(|&a, &b| blocks[a].start.total_cmp(&blocks[b].start));
    for i in order {
        if amount <= EPS {
            break;
        }
        let x = amount.min(blocks[i].len());
        out.push(blocks[i].place(x));
        amount -= x;
    }
}

fn merge_intervals(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.retain(|(a, b)| b - a > EPS);
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 + EPS => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Cheapest set of measure `tau_per_load`: every segment priced below the threshold
/// plus a filler taken from segments priced exactly at it. The filler is placed to
/// minimise ON/OFF switches; remaining ties go to the earliest time.
pub fn on_set(price: &StepFunction, tau_per_load: f64) -> Result<OnSet> {
    let horizon = price.horizon();
    let level = threshold_price(price, tau_per_load)?;
    if tau_per_load <= EPS {
        return OnSet::empty(horizon);
    }
    let segs: Vec<Segment> = price.segments().collect();
    let mut intervals: Vec<(f64, f64)> = segs
        .iter()
        .filter(|s| s.value < level)
        .map(|s| (s.start, s.end))
        .collect();
    let below: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    let fill = (tau_per_load.min(horizon) - below).max(0.0);

    if fill > EPS {
        let blocks = plateaus(&segs, level);
        let free: Vec<&Plateau> = blocks.iter().filter(|b| b.touches_on()).collect();
        let costly: Vec<&Plateau> = blocks.iter().filter(|b| !b.touches_on()).collect();
        let capacity: f64 = free.iter().map(|b| b.len()).sum();
        if fill <= capacity + EPS {
            let full = pick_full(&free, fill);
            let mut left = fill;
            for &i in &full {
                intervals.push((free[i].start, free[i].end));
                left -= free[i].len();
            }
            let rest: Vec<usize> = (0..free.len()).filter(|i| !full.contains(i)).collect();
            distribute(&free, rest, left, &mut intervals);
        } else {
            intervals.extend(free.iter().map(|b| (b.start, b.end)));
            let need = fill - capacity;
            let chosen = pick_costly(&costly, need);
            distribute(&costly, chosen, need, &mut intervals);
        }
    }
    OnSet::new(horizon, merge_intervals(intervals))
}

/// Synchronized optimal schedule without comfort constraints, with the adjoint
/// quantities of the maximum principle.
#[derive(Debug, Clone)]
pub struct ThresholdSolution {
    /// currency/MWh.
    pub threshold_price: f64,
    /// Requested ON time per load, seconds.
    pub tau_per_load: f64,
    pub on_set: OnSet,
    /// The control shared by every load.
    pub control: ControlSignal,
    /// Free-response temperature of each load under `control`, on `grid`.
    pub states: Vec<Trajectory>,
    /// Multiplier of the aggregate ON-time state, on `grid`.
    pub costate_time: Trajectory,
    /// Multiplier of the energy state; constant `-(P/η) π*`.
    pub costate_energy: f64,
    /// Temperature multipliers, identically zero.
    pub costate_temps: Vec<f64>,
    /// Procurement cost of all loads.
    pub cost: f64,
    pub grid: Vec<f64>,
    pub price: ForecastSeries,
}

impl ThresholdSolution {
    pub fn load_count(&self) -> usize {
        self.states.len()
    }

    /// Control of load `i`; the same object for every load.
    pub fn control_of(&self, _i: usize) -> &ControlSignal {
        &self.control
    }
}

pub fn solve_unconstrained(
    pop: &Population,
    price: &ForecastSeries,
    ambient: &ForecastSeries,
    budget: &EnergyBudget,
    grid_step: f64,
) -> Result<ThresholdSolution> {
    if (budget.horizon() - price.horizon()).abs() > EPS {
        return Err(Error::HorizonMismatch {
            left: budget.horizon(),
            right: price.horizon(),
        });
    }
    if !(-EPS..=1.0 + EPS).contains(&budget.tau_bar) {
        return Err(Error::BudgetOutOfRange {
            tau_bar: budget.tau_bar,
        });
    }
    solve_with_on_time(pop, price, ambient, budget.tau_per_load(), grid_step)
}

/// Same as [`solve_unconstrained`] with the per-load ON time given directly.
pub fn solve_with_on_time(
    pop: &Population,
    price: &ForecastSeries,
    ambient: &ForecastSeries,
    tau_per_load: f64,
    grid_step: f64,
) -> Result<ThresholdSolution> {
    price.ensure_positive()?;
    if (ambient.horizon() - price.horizon()).abs() > EPS {
        return Err(Error::HorizonMismatch {
            left: ambient.horizon(),
            right: price.horizon(),
        });
    }
    let threshold_price = threshold_price(price, tau_per_load)?;
    let on_set = on_set(price, tau_per_load)?;
    let control = on_set.indicator()?;
    let grid = uniform_grid(price.horizon(), grid_step)?;
    let states = pop
        .loads()
        .par_iter()
        .map(|p| simulate_with_control(p, ambient, &control, grid_step)?.resample(&grid))
        .collect::<Result<Vec<_>>>()?;

    let n = pop.len() as f64;
    let kw = pop.electrical_power();
    let lambda: Vec<f64> = grid
        .iter()
        .map(|&t| {
            if on_set.contains(t) {
                kw * n * (threshold_price - price.value_at(t))
            } else {
                0.0
            }
        })
        .collect();
    Ok(ThresholdSolution {
        threshold_price,
        tau_per_load,
        cost: n * procurement_cost(price, &control, kw),
        costate_time: Trajectory::new(grid.clone(), lambda)?,
        costate_energy: -kw * threshold_price,
        costate_temps: vec![0.0; pop.len()],
        on_set,
        control,
        states,
        grid,
        price: price.clone(),
    })
}
