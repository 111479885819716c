//! Synthetic populations for experiments and smoke tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tclplan_core::{Population, TclParams};

use crate::error::{CliError, Result};

/// Closed sampling intervals. Every parameter is drawn uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthRanges {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub delta: (f64, f64),
    pub setpoint: (f64, f64),
    pub power_thermal: (f64, f64),
    pub efficiency: (f64, f64),
}

impl Default for SynthRanges {
    fn default() -> Self {
        SynthRanges {
            alpha: (4.0e-3, 4.5e-3),
            beta: (8.4e-3, 8.6e-3),
            delta: (0.1, 1.1),
            setpoint: (20.5, 23.0),
            power_thermal: (14.0, 14.0),
            efficiency: (2.5, 2.5),
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

impl SynthRanges {
    fn check(&self) -> Result<()> {
        let named = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta", self.delta),
            ("setpoint", self.setpoint),
            ("power_thermal", self.power_thermal),
            ("efficiency", self.efficiency),
        ];
        for (name, (lo, hi)) in named {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(CliError::Config(format!("{name} range [{lo}, {hi}] is empty")));
            }
        }
        Ok(())
    }
}

/// `n` loads drawn from `ranges`. Initial temperatures are uniform in each band and
/// initial modes are fair coin flips. Identical seeds give identical populations.
pub fn synth_population(n: usize, seed: u64, ranges: &SynthRanges) -> Result<Population> {
    if n == 0 {
        return Err(CliError::Config("population size must be at least 1".into()));
    }
    ranges.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let loads = (0..n)
        .map(|_| {
            let alpha = draw(&mut rng, ranges.alpha);
            let beta = draw(&mut rng, ranges.beta);
            let delta = draw(&mut rng, ranges.delta);
            let setpoint = draw(&mut rng, ranges.setpoint);
            let power_thermal = draw(&mut rng, ranges.power_thermal);
            let efficiency = draw(&mut rng, ranges.efficiency);
            let theta0 = draw(&mut rng, (setpoint - delta, setpoint + delta));
            let sigma0 = u8::from(rng.random_bool(0.5));
            TclParams {
                alpha,
                beta,
                power_thermal,
                efficiency,
                setpoint,
                delta,
                theta0,
                sigma0,
            }
        })
        .collect();
    Population::new(loads).map_err(|e| CliError::Config(e.to_string()))
}
