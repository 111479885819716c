//! Deterministic inputs shared by the benchmarks.

use tclplan_core::{ForecastSeries, Trajectory};

/// Hourly prices with an evening peak.
pub fn day_price() -> ForecastSeries {
    ForecastSeries::hourly(vec![
        22.1, 20.4, 19.8, 19.2, 19.9, 21.7, 25.3, 28.8, 30.2, 31.5, 33.9, 37.2, 41.0, 46.3, 52.8, 61.5,
        70.2, 64.1, 55.7, 44.9, 36.4, 30.8, 27.5, 24.3,
    ])
    .expect("valid prices")
}

/// Hot-day hourly ambient, mean 31 °C.
pub fn day_ambient() -> ForecastSeries {
    let v = (0..24)
        .map(|h| 31.0 + 4.0 * (2.0 * std::f64::consts::PI * (f64::from(h) - 9.0) / 24.0).sin())
        .collect();
    ForecastSeries::hourly(v).expect("valid ambient")
}

/// Oscillating path of `n` points that leaves `[-1, 1]` on both sides.
pub fn wavy_path(n: usize) -> Trajectory {
    let times = (0..n).map(|k| k as f64).collect();
    let values = (0..n)
        .map(|k| {
            let x = k as f64;
            1.8 * (x * 0.011).sin() + 0.7 * (x * 0.173).sin() + 0.2 * (x * 1.37).cos()
        })
        .collect();
    Trajectory::new(times, values).expect("finite path")
}
