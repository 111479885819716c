//! Command-line front end: forecast ingestion, synthetic populations and the
//! plan export bundle.

// `!(x > y)` style checks are deliberate: NaN has to fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod ingest;
pub mod run;
pub mod synth;

pub use config::{BudgetSpec, PopulationSource, RunConfig};
pub use error::{CliError, Result};
pub use ingest::{load_ambient_csv, load_price_csv};
pub use run::{run_plan, RunOutput};
pub use synth::{synth_population, SynthRanges};
