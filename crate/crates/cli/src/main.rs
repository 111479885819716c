use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tclplan_cli::config::write_population_json;
use tclplan_cli::run::{check, load_inputs, solve, write_outputs};
use tclplan_cli::{BudgetSpec, CliError, PopulationSource, RunConfig, SynthRanges};

#[derive(Parser)]
#[command(name = "tclplan", version, about = "Day-ahead consumption planning for air-conditioner populations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan and write the output bundle.
    Plan {
        #[command(flatten)]
        inputs: InputArgs,
        /// Minimum switching period, seconds.
        #[arg(long, default_value_t = 90.0)]
        tm: f64,
        /// Output directory.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Print the feasible budget interval and the verdict for the given budget.
    Feasibility {
        #[command(flatten)]
        inputs: InputArgs,
    },
    /// Draw a synthetic population and write it as JSON.
    Synth {
        #[arg(long, short = 'n')]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        ranges: RangeArgs,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Price CSV: start_time_iso8601,price_per_mwh.
    #[arg(long)]
    price: PathBuf,
    /// Ambient CSV: start_time_iso8601,temperature_c.
    #[arg(long)]
    ambient: PathBuf,
    /// Population JSON.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    population: Option<PathBuf>,
    /// Draw this many loads instead of reading a population file.
    #[arg(long)]
    synthetic: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    ranges: RangeArgs,
    /// Horizon in seconds; defaults to the end of the last forecast segment.
    #[arg(long)]
    horizon: Option<f64>,
    /// Output grid step, seconds.
    #[arg(long, default_value_t = 60.0)]
    grid_step: f64,
    /// Budget as a fraction of full-power ON time.
    #[arg(long, conflicts_with = "energy", required_unless_present = "energy")]
    tau_bar: Option<f64>,
    /// Budget in kWh.
    #[arg(long)]
    energy: Option<f64>,
}

#[derive(Args)]
struct RangeArgs {
    /// Thermal decay rate range, 1/s.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    alpha: Option<Vec<f64>>,
    /// Thermal gain range, °C/kJ.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    beta: Option<Vec<f64>>,
    /// Comfort half-width range, °C.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    delta: Option<Vec<f64>>,
    /// Set-point range, °C.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    setpoint: Option<Vec<f64>>,
}

impl RangeArgs {
    fn ranges(&self) -> SynthRanges {
        let pick = |v: &Option<Vec<f64>>, d: (f64, f64)| v.as_ref().map_or(d, |v| (v[0], v[1]));
        let d = SynthRanges::default();
        SynthRanges {
            alpha: pick(&self.alpha, d.alpha),
            beta: pick(&self.beta, d.beta),
            delta: pick(&self.delta, d.delta),
            setpoint: pick(&self.setpoint, d.setpoint),
            ..d
        }
    }
}

impl InputArgs {
    fn config(self, tm: f64, out_dir: PathBuf) -> Result<RunConfig, CliError> {
        let population = match (self.population, self.synthetic) {
            (Some(p), _) => PopulationSource::File(p),
            (None, Some(count)) => PopulationSource::Synthetic {
                count,
                ranges: self.ranges.ranges(),
            },
            (None, None) => return Err(CliError::Config("no population given".into())),
        };
        Ok(RunConfig {
            price: self.price,
            ambient: self.ambient,
            population,
            horizon: self.horizon,
            grid_step: self.grid_step,
            budget: BudgetSpec::from_options(self.tau_bar, self.energy)?,
            tm,
            out_dir,
            seed: self.seed,
        })
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Plan { inputs, tm, out } => {
            let config = inputs.config(tm, out)?;
            let data = load_inputs(&config)?;
            let outcome = match solve(&config, &data) {
                Err(e @ CliError::Stage { stage: "feasibility", .. }) => {
                    print!("{}", check(&config, &data)?.render());
                    return Err(e);
                }
                other => other?,
            };
            for f in write_outputs(&config, &outcome)? {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Feasibility { inputs } => {
            let config = inputs.config(1.0, PathBuf::new())?;
            let data = load_inputs(&config)?;
            let feas = check(&config, &data)?;
            print!("{}", feas.render());
            if feas.verdict.is_accept() {
                Ok(())
            } else {
                Err(CliError::Stage {
                    stage: "feasibility",
                    source: tclplan_core::Error::InfeasibleBudget {
                        tau_bar: feas.budget.tau_bar,
                        lower: feas.bounds.tau_bar_lower,
                        upper: feas.bounds.tau_bar_upper,
                    },
                })
            }
        }
        Command::Synth {
            count,
            seed,
            ranges,
            out,
        } => {
            let pop = tclplan_cli::synth_population(count, seed, &ranges.ranges())?;
            write_population_json(&pop, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // usage errors share the input-error status; 2 is reserved for infeasible budgets
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
