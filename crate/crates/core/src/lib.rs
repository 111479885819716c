//! Day-ahead consumption planning for populations of thermostatically controlled
//! loads (air conditioners) buying energy against a price forecast.
//!
//! Pipeline: [`feasibility`] bounds the energy budget, [`threshold`] finds the
//! synchronized threshold-price schedule, [`skorokhod`] confines it to each load's
//! comfort band with boundary sliding, and [`recovery`] turns the sliding segments
//! into binary duty cycles with a minimum switching period. [`planner`] chains the
//! stages; [`oracle`] is a brute-force reference for small discretized instances.

// `!(x > y)` style checks are deliberate: NaN has to fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod feasibility;
pub mod model;
pub mod oracle;
pub mod planner;
pub mod recovery;
pub mod skorokhod;
pub mod threshold;

pub use error::{Error, Result};
pub use model::{
    Boundary, ControlSignal, DutyWindow, EnergyBudget, ForecastSeries, OnSet, Plan, Population,
    StepFunction, TclParams, Trajectory, EPS,
};
