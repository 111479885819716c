#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Hot-day hourly ambient, °C: mean 31, minimum 27.
pub fn ambient_day() -> Vec<f64> {
    (0..24)
        .map(|h| 31.0 + 4.0 * (2.0 * std::f64::consts::PI * (f64::from(h) - 9.0) / 24.0).sin())
        .collect()
}

/// Hourly day-ahead prices with an evening peak, currency/MWh.
pub fn price_day() -> Vec<f64> {
    vec![
        22.1, 20.4, 19.8, 19.2, 19.9, 21.7, 25.3, 28.8, 30.2, 31.5, 33.9, 37.2, 41.0, 46.3, 52.8, 61.5,
        70.2, 64.1, 55.7, 44.9, 36.4, 30.8, 27.5, 24.3,
    ]
}

pub fn series_csv(header: &str, values: &[f64]) -> String {
    let mut s = format!("start_time_iso8601,{header}\n");
    for (h, v) in values.iter().enumerate() {
        let _ = writeln!(s, "2026-07-15T{h:02}:00:00-05:00,{v}");
    }
    s
}

pub fn write_inputs(dir: &Path) -> (PathBuf, PathBuf) {
    let price = dir.join("price.csv");
    let ambient = dir.join("ambient.csv");
    std::fs::write(&price, series_csv("price_per_mwh", &price_day())).unwrap();
    std::fs::write(&ambient, series_csv("temperature_c", &ambient_day())).unwrap();
    (price, ambient)
}
