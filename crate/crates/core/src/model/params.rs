use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ForecastSeries, EPS};

/// Thermal coefficients, comfort band and initial state of one load.
///
/// This is the raw, deserializable record; [`Population::new`] enforces the invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TclParams {
    /// Heating time-constant coefficient, 1/s.
    pub alpha: f64,
    /// Thermal conductivity, °C/(kW·s).
    pub beta: f64,
    /// Thermal power drawn while ON, kW.
    pub power_thermal: f64,
    /// Load efficiency; electrical power is `power_thermal / efficiency`.
    pub efficiency: f64,
    /// Setpoint, °C.
    pub setpoint: f64,
    /// Comfort half-width, °C.
    pub delta: f64,
    /// Initial indoor temperature, °C.
    pub theta0: f64,
    /// Initial mode, 0 (OFF) or 1 (ON).
    pub sigma0: u8,
}

impl TclParams {
    pub fn lower(&self) -> f64 {
        self.setpoint - self.delta
    }

    pub fn upper(&self) -> f64 {
        self.setpoint + self.delta
    }

    pub fn bound(&self, boundary: Boundary) -> f64 {
        match boundary {
            Boundary::Lower => self.lower(),
            Boundary::Upper => self.upper(),
        }
    }

    /// Electrical power drawn while ON, kW.
    pub fn electrical_power(&self) -> f64 {
        self.power_thermal / self.efficiency
    }

    /// Equilibrium temperature under constant ambient and control level.
    pub fn steady_state(&self, ambient: f64, u: f64) -> f64 {
        ambient - self.beta * self.power_thermal * u / self.alpha
    }

    /// Control level that holds the temperature fixed at `temperature`.
    pub fn holding_control(&self, ambient: f64, temperature: f64) -> f64 {
        self.alpha * (ambient - temperature) / (self.beta * self.power_thermal)
    }

    fn violations(&self, load: usize, out: &mut Vec<Violation>) {
        for (name, value) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("power_thermal", self.power_thermal),
            ("efficiency", self.efficiency),
            ("delta", self.delta),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                out.push(Violation::NonPositiveParameter { load, name, value });
            }
        }
        if !self.setpoint.is_finite() || !self.theta0.is_finite() {
            out.push(Violation::NonFiniteTemperature { load });
        } else if self.theta0 < self.lower() - EPS || self.theta0 > self.upper() + EPS {
            out.push(Violation::InitialTemperatureOutsideBand {
                load,
                theta0: self.theta0,
                lower: self.lower(),
                upper: self.upper(),
            });
        }
        if self.sigma0 > 1 {
            out.push(Violation::InvalidInitialMode {
                load,
                sigma0: self.sigma0,
            });
        }
    }
}

/// Comfort boundary of a load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Lower,
    Upper,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Lower => "lower",
            Boundary::Upper => "upper",
        })
    }
}

/// One violated modelling assumption.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyPopulation,
    NonPositiveParameter {
        load: usize,
        name: &'static str,
        value: f64,
    },
    NonFiniteTemperature {
        load: usize,
    },
    InitialTemperatureOutsideBand {
        load: usize,
        theta0: f64,
        lower: f64,
        upper: f64,
    },
    InvalidInitialMode {
        load: usize,
        sigma0: u8,
    },
    HeterogeneousThermalPower {
        load: usize,
        expected: f64,
        found: f64,
    },
    HeterogeneousEfficiency {
        load: usize,
        expected: f64,
        found: f64,
    },
    NonCoolingAmbient {
        load: usize,
        time: f64,
        ambient: f64,
        upper: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPopulation => write!(f, "population is empty"),
            Violation::NonPositiveParameter { load, name, value } => {
                write!(f, "load {load}: {name} = {value} must be strictly positive")
            }
            Violation::NonFiniteTemperature { load } => {
                write!(f, "load {load}: setpoint or initial temperature is not finite")
            }
            Violation::InitialTemperatureOutsideBand {
                load,
                theta0,
                lower,
                upper,
            } => write!(
                f,
                "load {load}: initial temperature outside comfort band ({theta0} not in [{lower}, {upper}])"
            ),
            Violation::InvalidInitialMode { load, sigma0 } => {
                write!(f, "load {load}: initial mode {sigma0} is not binary")
            }
            Violation::HeterogeneousThermalPower {
                load,
                expected,
                found,
            } => write!(
                f,
                "load {load}: heterogeneous thermal power ({found} kW, population uses {expected} kW)"
            ),
            Violation::HeterogeneousEfficiency {
                load,
                expected,
                found,
            } => write!(
                f,
                "load {load}: heterogeneous efficiency ({found}, population uses {expected})"
            ),
            Violation::NonCoolingAmbient {
                load,
                time,
                ambient,
                upper,
            } => write!(
                f,
                "load {load}: non-cooling ambient {ambient} °C at t = {time} s (upper bound {upper} °C)"
            ),
        }
    }
}

/// Result of [`validate_population`]: empty when every assumption holds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("pass");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn load_violations(loads: &[TclParams]) -> Vec<Violation> {
    let mut out = Vec::new();
    let Some(first) = loads.first() else {
        out.push(Violation::EmptyPopulation);
        return out;
    };
    for (i, p) in loads.iter().enumerate() {
        p.violations(i, &mut out);
        if p.power_thermal != first.power_thermal {
            out.push(Violation::HeterogeneousThermalPower {
                load: i,
                expected: first.power_thermal,
                found: p.power_thermal,
            });
        }
        if p.efficiency != first.efficiency {
            out.push(Violation::HeterogeneousEfficiency {
                load: i,
                expected: first.efficiency,
                found: p.efficiency,
            });
        }
    }
    out
}

/// Checks every load against the modelling assumptions, including that the ambient
/// forecast stays above each load's upper comfort bound (all loads cooling).
pub fn validate_population(loads: &[TclParams], ambient: &ForecastSeries) -> ValidationReport {
    let mut violations = load_violations(loads);
    for (i, p) in loads.iter().enumerate() {
        if let Some(s) = ambient.segments().find(|s| !(s.value > p.upper())) {
            violations.push(Violation::NonCoolingAmbient {
                load: i,
                time: s.start,
                ambient: s.value,
                upper: p.upper(),
            });
        }
    }
    ValidationReport { violations }
}

/// Validated, non-empty set of loads sharing thermal power and efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    loads: Vec<TclParams>,
}

impl Population {
    pub fn new(loads: Vec<TclParams>) -> Result<Self> {
        let violations = load_violations(&loads);
        if !violations.is_empty() {
            let report = ValidationReport { violations };
            return Err(Error::InvalidPopulation(report.to_string()));
        }
        Ok(Self { loads })
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    pub fn loads(&self) -> &[TclParams] {
        &self.loads
    }

    pub fn get(&self, i: usize) -> &TclParams {
        &self.loads[i]
    }

    pub fn power_thermal(&self) -> f64 {
        self.loads[0].power_thermal
    }

    pub fn efficiency(&self) -> f64 {
        self.loads[0].efficiency
    }

    pub fn electrical_power(&self) -> f64 {
        self.loads[0].electrical_power()
    }

    pub fn into_loads(self) -> Vec<TclParams> {
        self.loads
    }
}
