use crate::error::{Error, Result};
use crate::model::EPS;

/// Sampled scalar trajectory (temperature, costate or power) over `[0, T]`.
///
/// Samples always include the uniform output grid; simulations may add event
/// times (breakpoints, boundary hits) between grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidTrajectory(format!(
                "{} times for {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTrajectory("times not strictly increasing".into()));
        }
        if times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidTrajectory("non-finite sample".into()));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Value at `t`: the stored sample when `t` matches a sample time, else linear
    /// interpolation between neighbours (clamped at the ends).
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s < t - EPS);
        if k >= self.times.len() {
            return *self.values.last().unwrap();
        }
        if (self.times[k] - t).abs() <= EPS || k == 0 {
            return self.values[k];
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn resample(&self, grid: &[f64]) -> Result<Trajectory> {
        Trajectory::new(grid.to_vec(), grid.iter().map(|&t| self.value_at(t)).collect())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Uniform sample times `0, h, 2h, ...` ending exactly at `horizon`.
pub fn uniform_grid(horizon: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(horizon > 0.0) {
        return Err(Error::InvalidTrajectory(format!(
            "grid step {step} and horizon {horizon} must be positive"
        )));
    }
    let n = (horizon / step + EPS).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    let last = *grid.last().unwrap();
    if horizon - last > EPS {
        grid.push(horizon);
    } else {
        *grid.last_mut().unwrap() = horizon;
    }
    Ok(grid)
}

/// Sorted union of several time lists, dropping entries within tolerance of a kept one.
pub(crate) fn merge_times<'a>(lists: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut all: Vec<f64> = lists.into_iter().flatten().copied().collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for t in all {
        match out.last() {
            Some(&last) if t - last <= EPS => {}
            _ => out.push(t),
        }
    }
    out
}
