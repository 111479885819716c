//! Domain types shared by every planning stage.
//!
//! Times are seconds from the start of the horizon, temperatures °C, powers kW
//! and prices currency/MWh. Piecewise signals are right-continuous step functions.

pub mod budget;
pub mod cost;
pub mod params;
pub mod plan;
pub mod series;
pub mod trajectory;

pub use budget::EnergyBudget;
pub use cost::{procurement_cost, product_integral};
pub use params::{validate_population, Boundary, Population, TclParams, ValidationReport, Violation};
pub use plan::{DutyWindow, Plan};
pub use series::{ControlSignal, ForecastSeries, OnSet, Segment, StepFunction};
pub use trajectory::{uniform_grid, Trajectory};

/// Absolute tolerance for invariant checks (seconds or °C).
pub const EPS: f64 = 1e-9;

pub const KWS_PER_KWH: f64 = 3600.0;
pub const KWS_PER_MWH: f64 = 3.6e6;
