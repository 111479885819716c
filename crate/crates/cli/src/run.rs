//! End-to-end run: ingest, plan, export.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use tclplan_core::feasibility::{check_feasible, tau_bounds, FeasibilityBounds, Verdict};
use tclplan_core::planner::{calibrate_on_time, PlanOutcome};
use tclplan_core::recovery::{recover_binary, verify_matching};
use tclplan_core::skorokhod::solve_constrained;
use tclplan_core::threshold::solve_with_on_time;
use tclplan_core::{model::validate_population, EnergyBudget, Error, ForecastSeries, Population};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::ingest::{load_ambient_csv, load_price_csv};

pub const AGGREGATE_FILE: &str = "plan_aggregate.csv";
pub const CONTROLS_FILE: &str = "plan_controls.csv";
pub const TRAJECTORIES_FILE: &str = "plan_trajectories.csv";
pub const SWITCHES_FILE: &str = "plan_switches.csv";
pub const REPORT_FILE: &str = "plan_report.txt";

#[derive(Debug, Clone)]
pub struct Inputs {
    pub price: ForecastSeries,
    pub ambient: ForecastSeries,
    pub population: Population,
}

pub fn load_inputs(config: &RunConfig) -> Result<Inputs> {
    config.validate()?;
    let price = load_price_csv(&config.price, config.horizon)?;
    let ambient = load_ambient_csv(&config.ambient, config.horizon)?;
    if price.horizon() != ambient.horizon() {
        return Err(CliError::Stage {
            stage: "ingest",
            source: Error::HorizonMismatch {
                left: price.horizon(),
                right: ambient.horizon(),
            },
        });
    }
    let population = config.load_population()?;
    Ok(Inputs {
        price,
        ambient,
        population,
    })
}

/// Budget bounds and the verdict for the configured budget.
#[derive(Debug, Clone)]
pub struct FeasibilityCheck {
    pub budget: EnergyBudget,
    pub bounds: FeasibilityBounds,
    pub verdict: Verdict,
}

impl FeasibilityCheck {
    pub fn render(&self) -> String {
        format!(
            "tau_bar = {}\nenergy_kwh = {}\n{}\nverdict = {}\n",
            self.budget.tau_bar, self.budget.energy_kwh, self.bounds, self.verdict
        )
    }

    fn into_error(self) -> CliError {
        CliError::Stage {
            stage: "feasibility",
            source: Error::InfeasibleBudget {
                tau_bar: self.budget.tau_bar,
                lower: self.bounds.tau_bar_lower,
                upper: self.bounds.tau_bar_upper,
            },
        }
    }
}

pub fn check(config: &RunConfig, inputs: &Inputs) -> Result<FeasibilityCheck> {
    let horizon = inputs.price.horizon();
    let budget = config.budget.resolve(&inputs.population, horizon)?;
    let bounds = tau_bounds(&inputs.population, &inputs.ambient, horizon);
    Ok(FeasibilityCheck {
        budget,
        bounds,
        verdict: check_feasible(&budget, &bounds),
    })
}

/// Runs every planning stage. Infeasible budgets fail before any solving.
pub fn solve(config: &RunConfig, inputs: &Inputs) -> Result<PlanOutcome> {
    let Inputs {
        price,
        ambient,
        population: pop,
    } = inputs;
    let report = validate_population(pop.loads(), ambient);
    if !report.is_ok() {
        return Err(CliError::Stage {
            stage: "validate",
            source: Error::InvalidPopulation(report.to_string()),
        });
    }
    let feas = check(config, inputs)?;
    if !feas.verdict.is_accept() {
        return Err(feas.into_error());
    }
    let budget = feas.budget;
    let m = calibrate_on_time(pop, price, ambient, &budget).map_err(CliError::stage("threshold"))?;
    let base = solve_with_on_time(pop, price, ambient, m, config.grid_step).map_err(CliError::stage("threshold"))?;
    let solution = solve_constrained(base, pop, ambient, config.grid_step).map_err(CliError::stage("skorokhod"))?;
    let plan = recover_binary(&solution, pop, config.tm).map_err(CliError::stage("recovery"))?;
    let max_deviation = verify_matching(&plan, &solution, pop).map_err(CliError::stage("recovery"))?;
    Ok(PlanOutcome {
        bounds: feas.bounds,
        budget,
        solution,
        plan,
        max_deviation,
    })
}

/// Key/value summary of a finished run.
pub fn render_report(config: &RunConfig, outcome: &PlanOutcome) -> String {
    let plan = &outcome.plan;
    let sol = &outcome.solution;
    let kw = plan.aggregate_power.values().iter().copied().fold(0.0, f64::max);
    let on_set = plan
        .on_set
        .intervals()
        .iter()
        .map(|(a, b)| format!("[{a}, {b})"))
        .collect::<Vec<_>>()
        .join(" ");
    let n = plan.len() as f64;
    let horizon = outcome.budget.horizon();
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("loads", plan.len().to_string());
    kv("horizon_s", horizon.to_string());
    kv("grid_step_s", config.grid_step.to_string());
    kv("min_switch_period_s", config.tm.to_string());
    kv("threshold_price", plan.threshold_price.to_string());
    kv("on_set", on_set);
    kv("on_set_measure_s", plan.on_set.measure().to_string());
    kv("tau_bar", outcome.budget.tau_bar.to_string());
    kv("tau_load_s", outcome.budget.tau.to_string());
    kv("energy_kwh", outcome.budget.energy_kwh.to_string());
    kv("cost_unconstrained", sol.base.cost.to_string());
    kv("cost_convex", plan.convex_cost.to_string());
    kv("cost_binary", plan.cost.to_string());
    kv(
        "cost_gap_relative",
        ((plan.cost - plan.convex_cost) / plan.convex_cost.abs().max(f64::MIN_POSITIVE)).to_string(),
    );
    kv("on_time_convex_load_s", plan.convex_on_time.to_string());
    kv("on_time_binary_load_s", plan.on_time.to_string());
    kv("tau_bar_convex", (plan.convex_on_time / (n * horizon)).to_string());
    kv("tau_bar_binary", (plan.on_time / (n * horizon)).to_string());
    kv("budget_error_relative", outcome.budget_error().to_string());
    kv("max_window_deviation_c", outcome.max_deviation.to_string());
    kv("max_window_s", plan.max_window_len().to_string());
    kv("peak_power_kw", kw.to_string());
    s.push_str(&outcome.bounds.to_string());
    s.push('\n');
    s
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::write(path, e))
}

fn write_rows(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(&header).map_err(|e| CliError::write(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::write(path, e))?;
    }
    w.flush().map_err(|e| CliError::write(path, e))
}

fn load_columns(prefix: &str, n: usize) -> Vec<String> {
    std::iter::once("time_s".to_string())
        .chain((1..=n).map(|i| format!("{prefix}{i}")))
        .collect()
}

/// Writes the output bundle and returns the written paths.
pub fn write_outputs(config: &RunConfig, outcome: &PlanOutcome) -> Result<Vec<PathBuf>> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    let plan = &outcome.plan;
    let n = plan.len();
    let path = |f: &str| dir.join(f);

    write_rows(
        &path(AGGREGATE_FILE),
        vec!["time_s".into(), "power_kw".into()],
        plan.aggregate_power
            .times()
            .iter()
            .zip(plan.aggregate_power.values())
            .map(|(t, p)| vec![t.to_string(), p.to_string()]),
    )?;
    write_rows(
        &path(CONTROLS_FILE),
        load_columns("u_", n),
        plan.grid.iter().map(|&t| {
            std::iter::once(t.to_string())
                .chain(plan.controls.iter().map(|u| u.value_at(t).to_string()))
                .collect()
        }),
    )?;
    write_rows(
        &path(TRAJECTORIES_FILE),
        load_columns("theta_", n),
        plan.grid.iter().enumerate().map(|(k, &t)| {
            std::iter::once(t.to_string())
                .chain(plan.trajectories.iter().map(|tr| tr.values()[k].to_string()))
                .collect()
        }),
    )?;
    write_rows(
        &path(SWITCHES_FILE),
        vec!["load".into(), "time_s".into(), "u".into()],
        plan.controls.iter().enumerate().flat_map(|(i, u)| {
            let mut last = f64::NAN;
            let mut events = Vec::new();
            for (&t, &v) in u.breakpoints().iter().zip(u.values()) {
                if v != last {
                    events.push(vec![(i + 1).to_string(), t.to_string(), v.to_string()]);
                    last = v;
                }
            }
            events
        }),
    )?;
    let report = path(REPORT_FILE);
    fs::write(&report, render_report(config, outcome)).map_err(|e| CliError::write(&report, e))?;
    Ok([AGGREGATE_FILE, CONTROLS_FILE, TRAJECTORIES_FILE, SWITCHES_FILE, REPORT_FILE]
        .iter()
        .map(|f| path(f))
        .collect())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub outcome: PlanOutcome,
    pub files: Vec<PathBuf>,
}

/// Loads inputs, plans and writes the output bundle.
pub fn run_plan(config: &RunConfig) -> Result<RunOutput> {
    let inputs = load_inputs(config)?;
    let outcome = solve(config, &inputs)?;
    let files = write_outputs(config, &outcome)?;
    Ok(RunOutput { outcome, files })
}
