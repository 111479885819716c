//! Exact integration of single-load thermal dynamics
//! `dθ/dt = -α(θ - θ_a) - βP u` with piecewise-constant inputs.
//!
//! Three regimes: free (any control, no comfort clamping), hysteretic (thermostat
//! switching at the band edges) and reflected (the state slides along a band edge
//! with the fractional control that holds it there).

use crate::error::{Error, Result};
use crate::model::trajectory::merge_times;
use crate::model::{
    uniform_grid, Boundary, ControlSignal, ForecastSeries, Segment, StepFunction, TclParams,
    Trajectory, EPS,
};

/// Closed-form state after `dt` seconds of constant ambient and control.
pub fn step_exact(theta: f64, ambient: f64, u: f64, dt: f64, params: &TclParams) -> f64 {
    let ss = params.steady_state(ambient, u);
    ss + (theta - ss) * (-params.alpha * dt).exp()
}

/// Time for the free response to travel from `theta` to `target`, if it ever does.
fn crossing_time(theta: f64, target: f64, ss: f64, alpha: f64) -> Option<f64> {
    let moving_up = ss > target && theta < target;
    let moving_down = ss < target && theta > target;
    if moving_up || moving_down {
        Some(((theta - ss) / (target - ss)).ln() / alpha)
    } else {
        None
    }
}

fn check_horizons(a: &StepFunction, b: &StepFunction) -> Result<()> {
    if (a.horizon() - b.horizon()).abs() > EPS {
        return Err(Error::HorizonMismatch {
            left: a.horizon(),
            right: b.horizon(),
        });
    }
    Ok(())
}

/// Consecutive `(t0, t1)` pairs of the merged time list.
fn pieces(times: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    times.windows(2).map(|w| (w[0], w[1]))
}

/// Free integration sampled at every breakpoint of `ambient` and `control` plus
/// `samples`.
pub fn integrate(
    params: &TclParams,
    ambient: &StepFunction,
    control: &StepFunction,
    samples: &[f64],
) -> Result<Trajectory> {
    check_horizons(ambient, control)?;
    let times = merge_times([ambient.breakpoints(), control.breakpoints(), samples]);
    let mut values = Vec::with_capacity(times.len());
    let mut theta = params.theta0;
    values.push(theta);
    for (t0, t1) in pieces(&times) {
        let mid = 0.5 * (t0 + t1);
        theta = step_exact(theta, ambient.value_at(mid), control.value_at(mid), t1 - t0, params);
        values.push(theta);
    }
    Trajectory::new(times, values)
}

/// Indoor temperature under an arbitrary control, no comfort clamping.
pub fn simulate_with_control(
    params: &TclParams,
    ambient: &ForecastSeries,
    control: &ControlSignal,
    grid_step: f64,
) -> Result<Trajectory> {
    let grid = uniform_grid(ambient.horizon(), grid_step)?;
    integrate(params, ambient, control, &grid)
}

/// Exact states at the given times (free dynamics).
pub fn states_at(
    params: &TclParams,
    ambient: &StepFunction,
    control: &StepFunction,
    times: &[f64],
) -> Result<Vec<f64>> {
    let tr = integrate(params, ambient, control, times)?;
    Ok(times.iter().map(|&t| tr.value_at(t)).collect())
}

/// Thermostat (deadband) simulation: the load switches ON when it reaches the
/// upper bound and OFF when it reaches the lower bound. Hit times are solved in
/// closed form and recorded as extra samples.
pub fn simulate_hysteretic(
    params: &TclParams,
    ambient: &ForecastSeries,
    grid_step: f64,
) -> Result<(Trajectory, ControlSignal)> {
    let (lo, hi) = (params.lower(), params.upper());
    if let Some(s) = ambient.segments().find(|s| s.value < hi - EPS) {
        return Err(Error::NotCooling {
            time: s.start,
            ambient: s.value,
            upper: hi,
        });
    }
    let grid = uniform_grid(ambient.horizon(), grid_step)?;
    let times = merge_times([ambient.breakpoints(), &grid[..]]);

    let mut theta = params.theta0;
    let mut mode = f64::from(params.sigma0);
    let mut out_t = vec![0.0];
    let mut out_v = vec![theta];
    let mut modes: Vec<Segment> = Vec::new();

    for (t0, t1) in pieces(&times) {
        let a = ambient.value_at(0.5 * (t0 + t1));
        let mut t = t0;
        loop {
            if mode == 0.0 && theta >= hi - EPS {
                mode = 1.0;
                theta = hi;
            } else if mode == 1.0 && theta <= lo + EPS {
                mode = 0.0;
                theta = lo;
            }
            let ss = params.steady_state(a, mode);
            if mode == 1.0 && ss > hi + EPS {
                return Err(Error::InsufficientCapacity {
                    time: t,
                    steady_state: ss,
                });
            }
            let target = if mode == 0.0 { hi } else { lo };
            match crossing_time(theta, target, ss, params.alpha) {
                Some(dt) if t + dt < t1 - EPS => {
                    modes.push(Segment {
                        start: t,
                        end: t + dt,
                        value: mode,
                    });
                    t += dt;
                    theta = target;
                    if t > out_t.last().unwrap() + EPS {
                        out_t.push(t);
                        out_v.push(theta);
                    }
                }
                _ => {
                    theta = step_exact(theta, a, mode, t1 - t, params);
                    modes.push(Segment {
                        start: t,
                        end: t1,
                        value: mode,
                    });
                    break;
                }
            }
        }
        out_t.push(t1);
        out_v.push(theta);
    }
    Ok((
        Trajectory::new(out_t, out_v)?,
        ControlSignal::binary(StepFunction::from_pieces(modes)?)?,
    ))
}

/// Maximal interval during which a reflected trajectory sits on a comfort boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlideEpisode {
    pub boundary: Boundary,
    pub start: f64,
    pub end: f64,
}

impl SlideEpisode {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

/// Output of [`simulate_reflected`].
#[derive(Debug, Clone)]
pub struct ReflectedRun {
    pub trajectory: Trajectory,
    /// Convexified control actually applied: the base control off-boundary and the
    /// holding control while sliding.
    pub effective_control: ControlSignal,
    pub episodes: Vec<SlideEpisode>,
}

impl ReflectedRun {
    /// `∫ v dt`, seconds.
    pub fn on_time(&self) -> f64 {
        self.effective_control.on_time()
    }
}

/// Integrates under `base_control` but never lets the state leave `[L, U]`: when the
/// free motion would cross a bound, the state slides along it with the holding
/// control `α(θ_a - bound)/(βP)`.
pub fn simulate_reflected(
    params: &TclParams,
    ambient: &ForecastSeries,
    base_control: &ControlSignal,
    grid_step: f64,
) -> Result<ReflectedRun> {
    let grid = uniform_grid(ambient.horizon(), grid_step)?;
    reflect(params, ambient, base_control, &grid)
}

/// [`simulate_reflected`] sampled only at input breakpoints plus `samples`.
pub fn reflect(
    params: &TclParams,
    ambient: &StepFunction,
    base: &StepFunction,
    samples: &[f64],
) -> Result<ReflectedRun> {
    check_horizons(ambient, base)?;
    let (lo, hi) = (params.lower(), params.upper());
    let bp = params.beta * params.power_thermal;
    let times = merge_times([ambient.breakpoints(), base.breakpoints(), samples]);

    let mut theta = params.theta0;
    let mut out_t = vec![0.0];
    let mut out_v = vec![theta];
    let mut applied: Vec<Segment> = Vec::new();
    let mut episodes: Vec<SlideEpisode> = Vec::new();

    let slide = |boundary: Boundary, start: f64, end: f64, episodes: &mut Vec<SlideEpisode>| {
        match episodes.last_mut() {
            Some(e) if e.boundary == boundary && (e.end - start).abs() <= EPS => e.end = end,
            _ => episodes.push(SlideEpisode {
                boundary,
                start,
                end,
            }),
        }
    };

    for (t0, t1) in pieces(&times) {
        let mid = 0.5 * (t0 + t1);
        let (a, u) = (ambient.value_at(mid), base.value_at(mid));
        let mut t = t0;
        loop {
            let outward_up = params.alpha * (a - hi) - bp * u > 0.0;
            let outward_down = params.alpha * (a - lo) - bp * u < 0.0;
            if theta >= hi - EPS && outward_up {
                let c = params.holding_control(a, hi);
                if c > 1.0 + EPS {
                    return Err(Error::SlidingInfeasible {
                        time: t,
                        boundary: Boundary::Upper,
                        required: c,
                    });
                }
                theta = hi;
                applied.push(Segment {
                    start: t,
                    end: t1,
                    value: c.min(1.0),
                });
                slide(Boundary::Upper, t, t1, &mut episodes);
                break;
            }
            if theta <= lo + EPS && outward_down {
                let c = params.holding_control(a, lo);
                if c < -EPS {
                    return Err(Error::SlidingInfeasible {
                        time: t,
                        boundary: Boundary::Lower,
                        required: c,
                    });
                }
                theta = lo;
                applied.push(Segment {
                    start: t,
                    end: t1,
                    value: c.max(0.0),
                });
                slide(Boundary::Lower, t, t1, &mut episodes);
                break;
            }
            let ss = params.steady_state(a, u);
            let hit = crossing_time(theta, hi, ss, params.alpha)
                .map(|dt| (dt, hi))
                .or_else(|| crossing_time(theta, lo, ss, params.alpha).map(|dt| (dt, lo)));
            match hit {
                Some((dt, bound)) if t + dt < t1 - EPS => {
                    applied.push(Segment {
                        start: t,
                        end: t + dt,
                        value: u,
                    });
                    t += dt;
                    theta = bound;
                    if t > out_t.last().unwrap() + EPS {
                        out_t.push(t);
                        out_v.push(theta);
                    }
                }
                _ => {
                    theta = step_exact(theta, a, u, t1 - t, params);
                    applied.push(Segment {
                        start: t,
                        end: t1,
                        value: u,
                    });
                    break;
                }
            }
        }
        out_t.push(t1);
        out_v.push(theta);
    }

    Ok(ReflectedRun {
        trajectory: Trajectory::new(out_t, out_v)?,
        effective_control: ControlSignal::convex(StepFunction::from_pieces(applied)?)?,
        episodes,
    })
}
