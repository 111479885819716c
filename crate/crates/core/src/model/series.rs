//! Right-continuous step functions over `[0, T]` and the signals built on them.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::model::EPS;

/// One constant piece `[start, end)` of a step function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

/// A right-continuous step function on `[0, T]`.
///
/// `breakpoints` has one more entry than `values`; segment `k` covers
/// `[breakpoints[k], breakpoints[k + 1])`. Evaluation at `T` returns the last value.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("no segments".into()));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidSeries(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidSeries(format!(
                "first breakpoint is {}, expected 0",
                breakpoints[0]
            )));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSeries(format!(
                "breakpoints not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if breakpoints.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidSeries("non-finite entry".into()));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![0.0, horizon], vec![value])
    }

    /// Equal-length segments of `step` seconds.
    pub fn uniform(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidSeries(format!("segment length {step} must be positive")));
        }
        let breakpoints = (0..=values.len()).map(|k| k as f64 * step).collect();
        Self::new(breakpoints, values)
    }

    /// Builds a step function from consecutive `(start, end, value)` pieces covering
    /// `[0, T]`. Pieces shorter than the tolerance are dropped and adjacent pieces with
    /// equal values are merged.
    pub fn from_pieces(pieces: impl IntoIterator<Item = Segment>) -> Result<Self> {
        let mut breakpoints: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for p in pieces {
            if p.end - p.start <= EPS * 1e-3 {
                continue;
            }
            match values.last() {
                None => {
                    breakpoints.push(p.start);
                    values.push(p.value);
                    breakpoints.push(p.end);
                }
                Some(&last) if last == p.value => {
                    *breakpoints.last_mut().unwrap() = p.end;
                }
                Some(_) => {
                    *breakpoints.last_mut().unwrap() = p.start;
                    values.push(p.value);
                    breakpoints.push(p.end);
                }
            }
        }
        Self::new(breakpoints, values)
    }

    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segment_count(&self) -> usize {
        self.values.len()
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.values.iter().enumerate().map(move |(k, &value)| Segment {
            start: self.breakpoints[k],
            end: self.breakpoints[k + 1],
            value,
        })
    }

    /// Index of the segment containing `t` (right-continuous; `t >= T` maps to the last).
    pub fn segment_index(&self, t: f64) -> usize {
        let n = self.values.len();
        // number of interior breakpoints <= t
        let interior = &self.breakpoints[1..n];
        interior.partition_point(|&b| b <= t)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.values[self.segment_index(t)]
    }

    pub fn integral(&self) -> f64 {
        self.segments().map(|s| s.value * s.len()).sum()
    }

    /// Exact integral over `[a, b]`, clipped to the horizon.
    pub fn integral_over(&self, a: f64, b: f64) -> f64 {
        self.segments()
            .map(|s| {
                let lo = s.start.max(a);
                let hi = s.end.min(b);
                if hi > lo {
                    s.value * (hi - lo)
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.horizon()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise map of the segment values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.breakpoints.clone(), self.values.iter().map(|&v| f(v)).collect())
    }
}

/// A day-ahead forecast (price in currency/MWh or ambient temperature in °C).
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSeries(StepFunction);

impl ForecastSeries {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        StepFunction::new(breakpoints, values).map(Self)
    }

    /// Price forecast; every value must be strictly positive.
    pub fn price(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let series = Self::new(breakpoints, values)?;
        series.ensure_positive()?;
        Ok(series)
    }

    /// One value per hour, starting at 0.
    pub fn hourly(values: Vec<f64>) -> Result<Self> {
        StepFunction::uniform(3600.0, values).map(Self)
    }

    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        StepFunction::constant(value, horizon).map(Self)
    }

    pub fn ensure_positive(&self) -> Result<()> {
        match self.0.segments().find(|s| !(s.value > 0.0)) {
            Some(s) => Err(Error::InvalidSeries(format!(
                "non-positive value {} at t = {} s",
                s.value, s.start
            ))),
            None => Ok(()),
        }
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }
}

impl From<StepFunction> for ForecastSeries {
    fn from(f: StepFunction) -> Self {
        Self(f)
    }
}

impl Deref for ForecastSeries {
    type Target = StepFunction;

    fn deref(&self) -> &StepFunction {
        &self.0
    }
}

/// Piecewise-constant control trajectory, binary or convexified.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal(StepFunction);

impl ControlSignal {
    /// Binary control: every value is exactly 0 or 1.
    pub fn binary(f: StepFunction) -> Result<Self> {
        if let Some(s) = f.segments().find(|s| s.value != 0.0 && s.value != 1.0) {
            return Err(Error::InvalidControl {
                time: s.start,
                value: s.value,
                allowed: "{0, 1}",
            });
        }
        Ok(Self(f))
    }

    /// Convexified control: every value in `[0, 1]`.
    pub fn convex(f: StepFunction) -> Result<Self> {
        if let Some(s) = f.segments().find(|s| !(0.0..=1.0).contains(&s.value)) {
            return Err(Error::InvalidControl {
                time: s.start,
                value: s.value,
                allowed: "[0, 1]",
            });
        }
        Ok(Self(f))
    }

    pub fn off(horizon: f64) -> Result<Self> {
        Self::binary(StepFunction::constant(0.0, horizon)?)
    }

    pub fn is_binary(&self) -> bool {
        self.0.values().iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Total ON measure, `∫ u dt`.
    pub fn on_time(&self) -> f64 {
        self.0.integral()
    }

    /// Number of value changes across interior breakpoints.
    pub fn switch_count(&self) -> usize {
        self.0.values().windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }
}

impl Deref for ControlSignal {
    type Target = StepFunction;

    fn deref(&self) -> &StepFunction {
        &self.0
    }
}

/// Finite union of disjoint, sorted, non-empty intervals `[a, b)` inside `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OnSet {
    horizon: f64,
    intervals: Vec<(f64, f64)>,
}

impl OnSet {
    pub fn new(horizon: f64, intervals: Vec<(f64, f64)>) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidOnSet(format!("horizon {horizon} must be positive")));
        }
        for &(a, b) in &intervals {
            if !(b > a) || a < -EPS || b > horizon + EPS {
                return Err(Error::InvalidOnSet(format!(
                    "interval [{a}, {b}) is empty or outside [0, {horizon}]"
                )));
            }
        }
        if let Some(w) = intervals.windows(2).find(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidOnSet(format!(
                "intervals [{}, {}) and [{}, {}) overlap or are unsorted",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(Self { horizon, intervals })
    }

    pub fn empty(horizon: f64) -> Result<Self> {
        Self::new(horizon, Vec::new())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= t && t < b)
    }

    /// Indicator function of the set as a binary control on `[0, T]`.
    pub fn indicator(&self) -> Result<ControlSignal> {
        let mut pieces = Vec::with_capacity(2 * self.intervals.len() + 1);
        let mut cursor = 0.0;
        for &(a, b) in &self.intervals {
            pieces.push(Segment {
                start: cursor,
                end: a,
                value: 0.0,
            });
            pieces.push(Segment {
                start: a,
                end: b,
                value: 1.0,
            });
            cursor = b;
        }
        pieces.push(Segment {
            start: cursor,
            end: self.horizon,
            value: 0.0,
        });
        ControlSignal::binary(StepFunction::from_pieces(pieces)?)
    }

    /// ON/OFF transitions strictly inside `(0, T)`.
    pub fn switch_count(&self) -> usize {
        self.intervals
            .iter()
            .map(|&(a, b)| usize::from(a > EPS) + usize::from(b < self.horizon - EPS))
            .sum()
    }
}
