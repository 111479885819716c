//! Reflection maps confining a path to a band, and the comfort-constrained schedule
//! built from them.
//!
//! [`skorokhod_two_sided`] evaluates the map on sampled paths in linear time. The
//! constrained schedule itself is produced by [`crate::dynamics::reflect`]: for a
//! state-dependent drift the reflected state is the map applied to the free motion
//! accumulated along the reflected path, which the tests check against the map.

use rayon::prelude::*;

use crate::dynamics::{simulate_reflected, ReflectedRun};
use crate::error::{Error, Result};
use crate::model::{procurement_cost, ControlSignal, ForecastSeries, Population, Trajectory, EPS};
use crate::threshold::ThresholdSolution;

/// Lower reflection `y(t) + sup_{s≤t} [L − y(s)]⁺`.
pub fn skorokhod_one_sided(y: &Trajectory, lower: f64) -> Trajectory {
    let mut push = 0.0_f64;
    let values = y
        .values()
        .iter()
        .map(|&v| {
            push = push.max(lower - v);
            v + push
        })
        .collect();
    Trajectory::new(y.times().to_vec(), values).expect("same grid, finite values")
}

/// Two-sided reflection onto `[lower, upper]`: the lower reflection followed by the
/// upper correction `φ(t) − sup_{s≤t} min([φ(s) − U]⁺, inf_{s≤r≤t} φ(r) − L)`.
///
/// The inner sup-inf is carried by the recursion
/// `g_t = max(min(g_{t−1}, b_t), min(a_t, b_t))` with `a = [φ − U]⁺`, `b = φ − L`.
pub fn skorokhod_two_sided(y: &Trajectory, lower: f64, upper: f64) -> Result<Trajectory> {
    if !(lower < upper) {
        return Err(Error::InvalidTrajectory(format!(
            "reflection band [{lower}, {upper}] is empty"
        )));
    }
    let phi = skorokhod_one_sided(y, lower);
    let mut g = f64::NEG_INFINITY;
    let values = phi
        .values()
        .iter()
        .map(|&p| {
            let a = (p - upper).max(0.0);
            let b = p - lower;
            g = g.min(b).max(a.min(b));
            p - g
        })
        .collect();
    Trajectory::new(y.times().to_vec(), values)
}

/// Comfort-constrained schedule: each load follows the shared threshold control but
/// slides along a comfort boundary whenever that control would push it out.
#[derive(Debug, Clone)]
pub struct ConstrainedSolution {
    /// Reflected runs with exact boundary-hit times.
    pub runs: Vec<ReflectedRun>,
    /// Constrained temperatures on the output grid.
    pub states: Vec<Trajectory>,
    /// Convexified controls, fractional only while sliding.
    pub convex_controls: Vec<ControlSignal>,
    /// Procurement cost of the convexified controls.
    pub cost: f64,
    /// `Σ_i ∫ v_i dt`, load-seconds.
    pub on_time: f64,
    pub base: ThresholdSolution,
    pub ambient: ForecastSeries,
}

impl ConstrainedSolution {
    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }
}

pub fn solve_constrained(
    base: ThresholdSolution,
    pop: &Population,
    ambient: &ForecastSeries,
    grid_step: f64,
) -> Result<ConstrainedSolution> {
    if (ambient.horizon() - base.price.horizon()).abs() > EPS {
        return Err(Error::HorizonMismatch {
            left: ambient.horizon(),
            right: base.price.horizon(),
        });
    }
    let runs = pop
        .loads()
        .par_iter()
        .map(|p| simulate_reflected(p, ambient, &base.control, grid_step))
        .collect::<Result<Vec<_>>>()?;
    let states = runs
        .iter()
        .map(|r| r.trajectory.resample(&base.grid))
        .collect::<Result<Vec<_>>>()?;
    let convex_controls: Vec<ControlSignal> =
        runs.iter().map(|r| r.effective_control.clone()).collect();
    let kw = pop.electrical_power();
    let cost = convex_controls
        .iter()
        .map(|v| procurement_cost(&base.price, v, kw))
        .sum();
    let on_time = convex_controls.iter().map(|v| v.on_time()).sum();
    Ok(ConstrainedSolution {
        runs,
        states,
        convex_controls,
        cost,
        on_time,
        base,
        ambient: ambient.clone(),
    })
}
