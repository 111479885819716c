use thiserror::Error;

use crate::model::Boundary;

/// Errors raised while building domain values or running a planning stage.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid step series: {0}")]
    InvalidSeries(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("invalid on-set: {0}")]
    InvalidOnSet(String),

    #[error("invalid population: {0}")]
    InvalidPopulation(String),

    #[error("control signal value {value} at t = {time} s is outside {allowed}")]
    InvalidControl {
        time: f64,
        value: f64,
        allowed: &'static str,
    },

    #[error("horizon mismatch: {left} s vs {right} s")]
    HorizonMismatch { left: f64, right: f64 },

    #[error("normalized budget {tau_bar} is outside [0, 1]")]
    BudgetOutOfRange { tau_bar: f64 },

    #[error("ambient {ambient} °C at t = {time} s is below the upper comfort bound {upper} °C")]
    NotCooling { time: f64, ambient: f64, upper: f64 },

    #[error("load cannot hold its {boundary} boundary at t = {time} s: required control {required}")]
    SlidingInfeasible {
        time: f64,
        boundary: Boundary,
        required: f64,
    },

    #[error("load cannot cool below its upper bound at t = {time} s (ON steady state {steady_state} °C)")]
    InsufficientCapacity { time: f64, steady_state: f64 },

    #[error("requested on-time {requested} s exceeds the horizon {horizon} s")]
    OnTimeExceedsHorizon { requested: f64, horizon: f64 },

    #[error("budget tau_bar = {tau_bar} is infeasible: feasible range is [{lower}, {upper}]")]
    InfeasibleBudget { tau_bar: f64, lower: f64, upper: f64 },

    #[error("lower-boundary duty cycle not realizable in a {window} s window (log argument {argument})")]
    UnrealizableDutyCycle { window: f64, argument: f64 },

    #[error("instance too large for enumeration: {0}")]
    InstanceTooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
