use crate::model::{Boundary, ControlSignal, OnSet, Trajectory};

/// One duty-cycle window inside a boundary-sliding episode.
///
/// Upper-boundary windows are ON for `[start, start + gamma)`; lower-boundary
/// windows are ON for `[end - gamma, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyWindow {
    pub boundary: Boundary,
    pub start: f64,
    pub end: f64,
    pub gamma: f64,
}

impl DutyWindow {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    /// The ON sub-interval of the window.
    pub fn on_interval(&self) -> (f64, f64) {
        match self.boundary {
            Boundary::Upper => (self.start, self.start + self.gamma),
            Boundary::Lower => (self.end - self.gamma, self.end),
        }
    }
}

/// Implementable day-ahead plan: binary controls, resulting temperatures and the
/// aggregate electrical consumption the aggregator should buy.
#[derive(Debug, Clone)]
pub struct Plan {
    /// Uniform output grid, seconds.
    pub grid: Vec<f64>,
    /// Binary control per load.
    pub controls: Vec<ControlSignal>,
    /// Indoor temperature per load on the output grid, °C.
    pub trajectories: Vec<Trajectory>,
    /// `(P/η) Σ u_i(t)` on the output grid, kW.
    pub aggregate_power: Trajectory,
    /// Procurement cost of the binary controls.
    pub cost: f64,
    /// Procurement cost of the convexified controls the plan was recovered from.
    pub convex_cost: f64,
    pub threshold_price: f64,
    pub on_set: OnSet,
    /// Duty-cycle windows per load.
    pub windows: Vec<Vec<DutyWindow>>,
    /// Total ON time of the binary controls, load-seconds.
    pub on_time: f64,
    /// Total ON time of the convexified controls, load-seconds.
    pub convex_on_time: f64,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.controls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controls.is_empty()
    }

    pub fn max_window_len(&self) -> f64 {
        self.windows
            .iter()
            .flatten()
            .map(DutyWindow::len)
            .fold(0.0, f64::max)
    }
}
