use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tclplan_core::{EnergyBudget, Population, TclParams};

use crate::error::{CliError, Result};
use crate::synth::{synth_population, SynthRanges};

/// Budget as given by the user; converted to ON time once the population is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetSpec {
    /// Fraction of the population's full-power ON time.
    TauBar(f64),
    EnergyKwh(f64),
}

impl BudgetSpec {
    /// Exactly one of the two forms must be present.
    pub fn from_options(tau_bar: Option<f64>, energy_kwh: Option<f64>) -> Result<Self> {
        match (tau_bar, energy_kwh) {
            (Some(t), None) => Ok(BudgetSpec::TauBar(t)),
            (None, Some(e)) => Ok(BudgetSpec::EnergyKwh(e)),
            _ => Err(CliError::Config("give exactly one of tau_bar and energy".into())),
        }
    }

    pub fn resolve(self, pop: &Population, horizon: f64) -> Result<EnergyBudget> {
        let b = match self {
            BudgetSpec::TauBar(t) => EnergyBudget::from_tau_bar(t, pop, horizon),
            BudgetSpec::EnergyKwh(e) => EnergyBudget::from_energy_kwh(e, pop, horizon),
        };
        b.map_err(CliError::stage("budget"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PopulationSource {
    /// JSON file `{"loads": [...]}`.
    File(PathBuf),
    /// Drawn with the run seed.
    Synthetic { count: usize, ranges: SynthRanges },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub price: PathBuf,
    pub ambient: PathBuf,
    pub population: PopulationSource,
    /// Seconds; inferred from the forecasts when absent.
    pub horizon: Option<f64>,
    /// Output grid step, seconds.
    pub grid_step: f64,
    pub budget: BudgetSpec,
    /// Minimum switching period, seconds.
    pub tm: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tm > 0.0 && self.tm.is_finite()) {
            return Err(CliError::Config(format!("minimum switching period {} must be positive", self.tm)));
        }
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(CliError::Config(format!("grid step {} must be positive", self.grid_step)));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Config(format!("horizon {h} must be positive")));
            }
        }
        match self.budget {
            BudgetSpec::TauBar(v) | BudgetSpec::EnergyKwh(v) if !(v >= 0.0 && v.is_finite()) => {
                Err(CliError::Config(format!("budget {v} must be non-negative")))
            }
            _ => Ok(()),
        }
    }

    pub fn load_population(&self) -> Result<Population> {
        match &self.population {
            PopulationSource::File(path) => load_population_json(path),
            PopulationSource::Synthetic { count, ranges } => synth_population(*count, self.seed, ranges),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PopulationFile {
    loads: Vec<TclParams>,
}

pub fn load_population_json(path: &Path) -> Result<Population> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let file: PopulationFile = serde_json::from_str(&text).map_err(|e| CliError::input(path, e.to_string()))?;
    Population::new(file.loads).map_err(|e| CliError::input(path, e.to_string()))
}

pub fn write_population_json(pop: &Population, path: &Path) -> Result<()> {
    let file = PopulationFile {
        loads: pop.loads().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| CliError::write(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::write(path, e))
}
