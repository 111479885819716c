//! Full planning pipeline: feasibility, threshold schedule, comfort constraints,
//! binary recovery.
//!
//! Sliding along a comfort boundary changes the energy a load actually uses, so the
//! threshold schedule is not run with the raw budget. The per-load ON time of the
//! shared schedule is instead adjusted by bisection until the convexified controls
//! use exactly the requested population ON time.

use rayon::prelude::*;

use crate::dynamics::reflect;
use crate::error::{Error, Result};
use crate::feasibility::{check_feasible, tau_bounds, FeasibilityBounds, Verdict};
use crate::model::{validate_population, EnergyBudget, ForecastSeries, Plan, Population, EPS};
use crate::recovery::{recover_binary, verify_matching};
use crate::skorokhod::{solve_constrained, ConstrainedSolution};
use crate::threshold::{on_set, solve_with_on_time};

/// Relative tolerance on the realized population ON time.
pub const BUDGET_RTOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;

/// Population ON time `Σ_i ∫ v_i dt` when the shared schedule runs `m` seconds.
pub fn realized_on_time(
    pop: &Population,
    price: &ForecastSeries,
    ambient: &ForecastSeries,
    m: f64,
) -> Result<f64> {
    let control = on_set(price, m)?.indicator()?;
    let times = pop
        .loads()
        .par_iter()
        .map(|p| Ok(reflect(p, ambient, &control, &[])?.on_time()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(times.into_iter().sum())
}

/// Per-load ON time of the shared schedule that makes the constrained controls use
/// `budget.tau` load-seconds.
pub fn calibrate_on_time(
    pop: &Population,
    price: &ForecastSeries,
    ambient: &ForecastSeries,
    budget: &EnergyBudget,
) -> Result<f64> {
    let horizon = price.horizon();
    let target = budget.tau;
    let tol = BUDGET_RTOL * target.max(1.0);
    let (e_lo, e_hi) = (
        realized_on_time(pop, price, ambient, 0.0)?,
        realized_on_time(pop, price, ambient, horizon)?,
    );
    let nt = pop.len() as f64 * horizon;
    if target < e_lo - tol || target > e_hi + tol {
        return Err(Error::InfeasibleBudget {
            tau_bar: budget.tau_bar,
            lower: e_lo / nt,
            upper: e_hi / nt,
        });
    }
    if target <= e_lo + tol {
        return Ok(0.0);
    }
    if target >= e_hi - tol {
        return Ok(horizon);
    }
    let (mut lo, mut hi) = (0.0, horizon);
    let mut best = (f64::INFINITY, 0.5 * horizon);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let e = realized_on_time(pop, price, ambient, mid)?;
        if (e - target).abs() < best.0 {
            best = ((e - target).abs(), mid);
        }
        if (e - target).abs() <= tol || hi - lo <= EPS {
            break;
        }
        if e < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.1)
}

/// Comfort-constrained schedule whose convexified controls meet the budget.
pub fn solve_budgeted(
    pop: &Population,
    price: &ForecastSeries,
    ambient: &ForecastSeries,
    budget: &EnergyBudget,
    grid_step: f64,
) -> Result<ConstrainedSolution> {
    let m = calibrate_on_time(pop, price, ambient, budget)?;
    let base = solve_with_on_time(pop, price, ambient, m, grid_step)?;
    solve_constrained(base, pop, ambient, grid_step)
}

/// Everything produced by [`plan`].
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub bounds: FeasibilityBounds,
    pub budget: EnergyBudget,
    pub solution: ConstrainedSolution,
    pub plan: Plan,
    /// Largest window-end temperature gap between binary and convexified controls.
    pub max_deviation: f64,
}

impl PlanOutcome {
    /// Relative gap between the realized convexified ON time and the budget.
    pub fn budget_error(&self) -> f64 {
        (self.solution.on_time - self.budget.tau).abs() / self.budget.tau.max(1.0)
    }
}

/// Runs every stage. Fails with [`Error::InfeasibleBudget`] when the budget is
/// outside the feasible interval.
pub fn plan(
    pop: &Population,
    price: &ForecastSeries,
    ambient: &ForecastSeries,
    budget: &EnergyBudget,
    grid_step: f64,
    tm: f64,
) -> Result<PlanOutcome> {
    let report = validate_population(pop.loads(), ambient);
    if !report.is_ok() {
        return Err(Error::InvalidPopulation(report.to_string()));
    }
    let bounds = tau_bounds(pop, ambient, price.horizon());
    if check_feasible(budget, &bounds) != Verdict::Accept {
        return Err(Error::InfeasibleBudget {
            tau_bar: budget.tau_bar,
            lower: bounds.tau_bar_lower,
            upper: bounds.tau_bar_upper,
        });
    }
    let solution = solve_budgeted(pop, price, ambient, budget, grid_step)?;
    let plan = recover_binary(&solution, pop, tm)?;
    let max_deviation = verify_matching(&plan, &solution, pop)?;
    Ok(PlanOutcome {
        bounds,
        budget: *budget,
        solution,
        plan,
        max_deviation,
    })
}
