//! Binary controls from convexified ones under a minimum switching period.
//!
//! Off the comfort boundaries the convexified control is already binary. Each
//! boundary-sliding episode is cut into windows of about `T_m` seconds; an upper
//! window is ON for its first `γ̄` seconds, a lower window for its last `γ̲`
//! seconds, with `γ` chosen so the temperature at the window end is unchanged.

use rayon::prelude::*;

use crate::dynamics::{simulate_with_control, states_at, SlideEpisode};
use crate::error::{Error, Result};
use crate::model::{
    procurement_cost, Boundary, ControlSignal, DutyWindow, ForecastSeries, Plan, Population, Segment,
    StepFunction, TclParams, Trajectory, EPS,
};
use crate::skorokhod::ConstrainedSolution;

/// `∫_start^end e^{α(s − start)} v(s) ds`, exact for step `v`.
pub fn weighted_integral(v: &StepFunction, start: f64, end: f64, alpha: f64) -> f64 {
    v.segments()
        .filter(|s| s.end > start && s.start < end && s.value != 0.0)
        .map(|s| {
            let (a, b) = (s.start.max(start) - start, s.end.min(end) - start);
            s.value * ((alpha * b).exp() - (alpha * a).exp()) / alpha
        })
        .sum()
}

/// ON time at the start of the window `[start, start + window)` that matches `v`.
pub fn gamma_upper(v: &StepFunction, start: f64, window: f64, alpha: f64) -> f64 {
    let end = start + window;
    let on = v.integral_over(start, end);
    if on <= 0.0 {
        return 0.0;
    }
    if on >= window {
        return window;
    }
    let i = weighted_integral(v, start, end, alpha);
    ((alpha * i).ln_1p() / alpha).clamp(0.0, window)
}

/// ON time at the end of the window `[start, start + window)` that matches `v`.
pub fn gamma_lower(v: &StepFunction, start: f64, window: f64, alpha: f64) -> Result<f64> {
    let end = start + window;
    let on = v.integral_over(start, end);
    if on <= 0.0 {
        return Ok(0.0);
    }
    if on >= window {
        return Ok(window);
    }
    let i = weighted_integral(v, start, end, alpha);
    let argument = 1.0 - alpha * (-alpha * window).exp() * i;
    if !(argument > 0.0) {
        return Err(Error::UnrealizableDutyCycle { window, argument });
    }
    Ok((-argument.ln() / alpha).clamp(0.0, window))
}

/// Both duty cycles of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyCycle {
    pub gamma_upper: f64,
    pub gamma_lower: f64,
    pub window: f64,
}

impl DutyCycle {
    pub fn new(v: &StepFunction, start: f64, window: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            gamma_upper: gamma_upper(v, start, window, alpha),
            gamma_lower: gamma_lower(v, start, window, alpha)?,
            window,
        })
    }
}

/// Window boundaries tiling `[start, end)` from its start. A leftover shorter than
/// `tm/2` is merged into the previous window, a longer one becomes its own window.
pub fn tile(start: f64, end: f64, tm: f64) -> Vec<(f64, f64)> {
    let len = end - start;
    let n = (len / tm + EPS).floor() as usize;
    if n == 0 {
        return vec![(start, end)];
    }
    let rem = len - n as f64 * tm;
    let full = if rem <= EPS || rem >= 0.5 * tm { n } else { n - 1 };
    let mut out: Vec<(f64, f64)> = (0..full)
        .map(|k| (start + k as f64 * tm, start + (k + 1) as f64 * tm))
        .collect();
    if rem <= EPS {
        out.last_mut().unwrap().1 = end;
    } else {
        out.push((start + full as f64 * tm, end));
    }
    out
}

/// Duty windows covering one sliding episode.
pub fn episode_windows(
    v: &StepFunction,
    episode: &SlideEpisode,
    tm: f64,
    alpha: f64,
) -> Result<Vec<DutyWindow>> {
    tile(episode.start, episode.end, tm)
        .into_iter()
        .map(|(a, b)| {
            let gamma = match episode.boundary {
                Boundary::Upper => gamma_upper(v, a, b - a, alpha),
                Boundary::Lower => gamma_lower(v, a, b - a, alpha)?,
            };
            Ok(DutyWindow {
                boundary: episode.boundary,
                start: a,
                end: b,
                gamma,
            })
        })
        .collect()
}

/// Binary control equal to `v` off the windows and to the window patterns on them.
pub fn binary_control(v: &ControlSignal, windows: &[DutyWindow]) -> Result<ControlSignal> {
    let mut pieces: Vec<Segment> = Vec::new();
    let mut cursor = 0.0;
    let copy = |from: f64, to: f64, pieces: &mut Vec<Segment>| {
        for s in v.segments() {
            let (a, b) = (s.start.max(from), s.end.min(to));
            if b > a {
                pieces.push(Segment {
                    start: a,
                    end: b,
                    value: s.value,
                });
            }
        }
    };
    for w in windows {
        copy(cursor, w.start, &mut pieces);
        let (on0, on1) = w.on_interval();
        for (a, b, value) in [(w.start, on0, 0.0), (on0, on1, 1.0), (on1, w.end, 0.0)] {
            if b > a {
                pieces.push(Segment { start: a, end: b, value });
            }
        }
        cursor = w.end;
    }
    copy(cursor, v.horizon(), &mut pieces);
    ControlSignal::binary(StepFunction::from_pieces(pieces)?)
}

/// Largest distance a recovered trajectory can stray from the boundary inside one
/// window of length `window`.
pub fn excursion_bound(p: &TclParams, ambient: &ForecastSeries, window: f64) -> f64 {
    let rise = ambient.max_value() - p.lower();
    let fall = p.upper() - p.steady_state(ambient.min_value(), 1.0);
    (1.0 - (-p.alpha * window).exp()) * rise.max(fall)
}

pub fn recover_binary(sol: &ConstrainedSolution, pop: &Population, tm: f64) -> Result<Plan> {
    if !(tm > 0.0) {
        return Err(Error::InvalidSeries(format!("switching period {tm} must be positive")));
    }
    let grid = &sol.base.grid;
    let grid_step = if grid.len() > 1 { grid[1] - grid[0] } else { sol.ambient.horizon() };
    let per_load = pop
        .loads()
        .par_iter()
        .zip(sol.runs.par_iter())
        .map(|(p, run)| {
            let v = &run.effective_control;
            let mut windows = Vec::new();
            for e in &run.episodes {
                windows.extend(episode_windows(v, e, tm, p.alpha)?);
            }
            let u = binary_control(v, &windows)?;
            let tr = simulate_with_control(p, &sol.ambient, &u, grid_step)?.resample(grid)?;
            Ok((u, tr, windows))
        })
        .collect::<Result<Vec<(ControlSignal, Trajectory, Vec<DutyWindow>)>>>()?;

    let kw = pop.electrical_power();
    let mut controls = Vec::with_capacity(per_load.len());
    let mut trajectories = Vec::with_capacity(per_load.len());
    let mut windows = Vec::with_capacity(per_load.len());
    for (u, tr, w) in per_load {
        controls.push(u);
        trajectories.push(tr);
        windows.push(w);
    }
    let power: Vec<f64> = grid
        .iter()
        .map(|&t| kw * controls.iter().filter(|u| u.value_at(t) == 1.0).count() as f64)
        .collect();
    let cost = controls
        .iter()
        .map(|u| procurement_cost(&sol.base.price, u, kw))
        .sum();
    let on_time = controls.iter().map(|u| u.on_time()).sum();
    Ok(Plan {
        grid: grid.clone(),
        aggregate_power: Trajectory::new(grid.clone(), power)?,
        controls,
        trajectories,
        cost,
        convex_cost: sol.cost,
        threshold_price: sol.base.threshold_price,
        on_set: sol.base.on_set.clone(),
        windows,
        on_time,
        convex_on_time: sol.on_time,
    })
}

/// Largest temperature gap at window ends between the binary and convexified
/// controls, over all loads.
pub fn verify_matching(plan: &Plan, sol: &ConstrainedSolution, pop: &Population) -> Result<f64> {
    let gaps = pop
        .loads()
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let ends: Vec<f64> = plan.windows[i].iter().map(|w| w.end).collect();
            if ends.is_empty() {
                return Ok(0.0);
            }
            let a = states_at(p, &sol.ambient, &plan.controls[i], &ends)?;
            let b = states_at(p, &sol.ambient, &sol.convex_controls[i], &ends)?;
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::simulate_reflected;
    use crate::model::params::fixtures::*;
    use crate::skorokhod::solve_constrained;
    use crate::threshold::solve_with_on_time;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn constant(v: f64, t: f64) -> StepFunction {
        StepFunction::constant(v, t).unwrap()
    }

    #[test]
    fn gamma_extremes_are_exact() {
        for alpha in [1.0, 4.4e-3, 1e-5] {
            let tm = 90.0;
            assert_eq!(gamma_upper(&constant(0.0, tm), 0.0, tm, alpha), 0.0);
            assert_eq!(gamma_upper(&constant(1.0, tm), 0.0, tm, alpha), tm);
            assert_eq!(gamma_lower(&constant(0.0, tm), 0.0, tm, alpha).unwrap(), 0.0);
            assert_eq!(gamma_lower(&constant(1.0, tm), 0.0, tm, alpha).unwrap(), tm);
        }
    }

    #[test]
    fn gammas_match_quadrature() {
        let v = constant(0.5, 1.0);
        let q = simpson(|s| s.exp() * 0.5, 0.0, 1.0, 2000);
        let up = (1.0 + q).ln();
        let lo = (1.0 / (1.0 - (-1.0f64).exp() * q)).ln();
        assert!((gamma_upper(&v, 0.0, 1.0, 1.0) - up).abs() < 1e-12);
        assert!((gamma_lower(&v, 0.0, 1.0, 1.0).unwrap() - lo).abs() < 1e-12);
        assert!((up - (1.0 + 0.5 * (std::f64::consts::E - 1.0)).ln()).abs() < 1e-12);
    }

    #[test]
    fn weighted_integral_matches_quadrature_for_steps() {
        let v = StepFunction::new(vec![0.0, 30.0, 55.0, 90.0], vec![0.2, 0.9, 0.4]).unwrap();
        let alpha = 4.1e-3;
        let q: f64 = [(0.0, 30.0, 0.2), (30.0, 55.0, 0.9), (55.0, 90.0, 0.4)]
            .iter()
            .map(|&(a, b, c)| simpson(|s| c * (alpha * s).exp(), a, b, 200))
            .sum();
        assert!((weighted_integral(&v, 0.0, 90.0, alpha) - q).abs() < 1e-9);
    }

    #[test]
    fn unrealizable_lower_cycle() {
        let v = StepFunction::new(vec![0.0, 5.0, 10.0], vec![0.0, 1.9]).unwrap();
        assert!(matches!(
            gamma_lower(&v, 0.0, 10.0, 1.0),
            Err(Error::UnrealizableDutyCycle { .. })
        ));
    }

    #[test]
    fn tiling_rule() {
        assert_eq!(tile(0.0, 270.0, 90.0), vec![(0.0, 90.0), (90.0, 180.0), (180.0, 270.0)]);
        assert_eq!(tile(10.0, 60.0, 90.0), vec![(10.0, 60.0)]);
        assert_eq!(
            tile(0.0, 250.0, 90.0),
            vec![(0.0, 90.0), (90.0, 180.0), (180.0, 250.0)]
        );
        assert_eq!(tile(0.0, 200.0, 90.0), vec![(0.0, 90.0), (90.0, 200.0)]);
    }

    fn upper_hold(amb: ForecastSeries) -> (Population, ConstrainedSolution) {
        let mut p = home_one();
        p.theta0 = p.upper();
        let pop = Population::new(vec![p]).unwrap();
        let price = ForecastSeries::constant(30.0, amb.horizon()).unwrap();
        let base = solve_with_on_time(&pop, &price, &amb, 0.0, 30.0).unwrap();
        let sol = solve_constrained(base, &pop, &amb, 30.0).unwrap();
        (pop, sol)
    }

    #[test]
    fn constant_ambient_slide_gives_identical_windows() {
        let (pop, sol) = upper_hold(ForecastSeries::constant(32.0, 270.0).unwrap());
        let plan = recover_binary(&sol, &pop, 90.0).unwrap();
        let w = &plan.windows[0];
        assert_eq!(w.len(), 3);
        assert!(w.iter().all(|x| (x.gamma - w[0].gamma).abs() < 1e-12 && x.len() == 90.0));
        assert!(w[0].gamma > 0.0 && w[0].gamma < 90.0);
        assert!(verify_matching(&plan, &sol, &pop).unwrap() < 1e-9);
    }

    #[test]
    fn varying_ambient_matches_at_window_ends() {
        let amb = ForecastSeries::new(vec![0.0, 700.0, 1300.0, 3600.0], vec![31.0, 35.5, 33.0]).unwrap();
        let (pop, sol) = upper_hold(amb);
        let plan = recover_binary(&sol, &pop, 90.0).unwrap();
        assert!(plan.windows[0].len() >= 39);
        assert!(verify_matching(&plan, &sol, &pop).unwrap() < 1e-9);
        // weighted integrals agree window by window
        let p = pop.get(0);
        for w in &plan.windows[0] {
            let a = weighted_integral(&plan.controls[0], w.start, w.end, p.alpha);
            let b = weighted_integral(&sol.convex_controls[0], w.start, w.end, p.alpha);
            assert!((a - b).abs() < 1e-9 * b.max(1.0));
        }
    }

    #[test]
    fn lower_boundary_windows_end_on() {
        let mut p = home_two();
        p.theta0 = p.lower();
        let pop = Population::new(vec![p]).unwrap();
        let amb = ForecastSeries::hourly(vec![32.0, 34.0]).unwrap();
        let price = ForecastSeries::constant(30.0, 7200.0).unwrap();
        let base = solve_with_on_time(&pop, &price, &amb, 7200.0, 60.0).unwrap();
        let sol = solve_constrained(base, &pop, &amb, 60.0).unwrap();
        let plan = recover_binary(&sol, &pop, 120.0).unwrap();
        let u = &plan.controls[0];
        for w in &plan.windows[0] {
            assert_eq!(w.boundary, Boundary::Lower);
            assert_eq!(u.value_at(w.end - 1e-6), 1.0);
            assert_eq!(u.value_at(w.start), 0.0);
        }
        assert!(verify_matching(&plan, &sol, &pop).unwrap() < 1e-9);
    }

    #[test]
    fn binary_plan_is_untouched() {
        let mut p = home_two();
        p.delta = 20.0;
        let pop = Population::new(vec![p]).unwrap();
        let amb = ForecastSeries::constant(32.0, 7200.0).unwrap();
        let price = ForecastSeries::hourly(vec![40.0, 20.0]).unwrap();
        let base = solve_with_on_time(&pop, &price, &amb, 1800.0, 60.0).unwrap();
        let sol = solve_constrained(base, &pop, &amb, 60.0).unwrap();
        let plan = recover_binary(&sol, &pop, 90.0).unwrap();
        assert_eq!(plan.controls[0], sol.convex_controls[0]);
        assert_eq!(verify_matching(&plan, &sol, &pop).unwrap(), 0.0);
        assert_eq!(plan.cost, plan.convex_cost);
    }

    #[test]
    fn perturbed_gamma_deviation_is_first_order() {
        let (pop, sol) = upper_hold(ForecastSeries::constant(32.0, 270.0).unwrap());
        let plan = recover_binary(&sol, &pop, 90.0).unwrap();
        let p = pop.get(0);
        let mut windows = plan.windows[0].clone();
        let w = windows[0];
        windows[0].gamma += 1.0;
        let u = binary_control(&sol.convex_controls[0], &windows).unwrap();
        let amb = &sol.ambient;
        let a = states_at(p, amb, &u, &[w.end]).unwrap()[0];
        let b = states_at(p, amb, &sol.convex_controls[0], &[w.end]).unwrap()[0];
        // one extra ON second at time γ̄ cools the window end by βP e^{−α(W−γ̄)}
        let predicted = p.beta * p.power_thermal * (-p.alpha * (w.len() - w.gamma - 1.0)).exp();
        let observed = b - a;
        assert!((observed - predicted).abs() < 0.01 * predicted, "{observed} vs {predicted}");
    }

    #[test]
    fn switching_pattern_respects_period() {
        let amb = ForecastSeries::constant(33.0, 3600.0).unwrap();
        let (pop, sol) = upper_hold(amb.clone());
        let plan = recover_binary(&sol, &pop, 90.0).unwrap();
        let u = &plan.controls[0];
        let w = plan.windows[0][0];
        let min_gap = w.gamma.min(90.0 - w.gamma);
        let bps = u.breakpoints();
        for pair in bps[1..bps.len() - 1].windows(2) {
            assert!(pair[1] - pair[0] >= min_gap - 1e-9);
        }
        let ons: Vec<f64> = u.segments().filter(|s| s.value == 1.0).map(|s| s.start).collect();
        for pair in ons.windows(2) {
            assert!((pair[1] - pair[0] - 90.0).abs() < 1e-9);
        }
        let bound = excursion_bound(pop.get(0), &amb, plan.max_window_len());
        let tr = simulate_with_control(pop.get(0), &amb, u, 1.0).unwrap();
        let p = pop.get(0);
        assert!(tr.min() >= p.lower() - bound && tr.max() <= p.upper() + bound);
        assert!(tr.max() <= p.upper() + 1e-9);
        assert!(p.upper() - tr.min() > 0.0);
        let reflected = simulate_reflected(p, &amb, &ControlSignal::off(3600.0).unwrap(), 60.0).unwrap();
        assert!((reflected.on_time() - plan.convex_on_time).abs() < 1e-9);
    }
}
