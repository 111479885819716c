//! Forecast CSV ingestion.
//!
//! Files have a header row and two columns: a segment start timestamp and a value.
//! Each value holds until the next row; the last one holds for as long as the
//! previous segment (one hour for a single row) unless a horizon is given.

use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use tclplan_core::ForecastSeries;

use crate::error::{CliError, Result};

/// Longest segment accepted; longer spacing means missing rows.
pub const MAX_SEGMENT: f64 = 3600.0;

const NAIVE_FORMATS: [&str; 4] = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"];

/// Column semantics of a forecast file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Prices in currency/MWh, strictly positive.
    Price,
    /// Ambient temperature in °C.
    Ambient,
}

/// Parses an ISO 8601 timestamp into seconds since the Unix epoch. Timestamps
/// without an offset are taken as UTC.
pub fn parse_timestamp(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp() as f64 + f64::from(t.timestamp_subsec_nanos()) * 1e-9);
    }
    NAIVE_FORMATS.iter().find_map(|f| {
        NaiveDateTime::parse_from_str(s, f)
            .ok()
            .map(|t| t.and_utc().timestamp() as f64)
    })
}

/// Reads a forecast from any reader. `path` only labels error messages.
pub fn read_series<R: Read>(reader: R, kind: SeriesKind, horizon: Option<f64>, path: &Path) -> Result<ForecastSeries> {
    let err = |msg: String| CliError::input(path, msg);
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut rows = rdr.records();

    match rows.next() {
        None => return Err(err("empty file".into())),
        Some(Err(e)) => return Err(err(e.to_string())),
        Some(Ok(h)) => {
            if h.len() != 2 || parse_timestamp(&h[0]).is_some() {
                return Err(err("missing header row".into()));
            }
        }
    }

    let mut stamps: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for rec in rows {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(err(format!("line {line}: expected 2 columns, found {}", rec.len())));
        }
        let t = parse_timestamp(&rec[0]).ok_or_else(|| err(format!("line {line}: bad timestamp {:?}", &rec[0])))?;
        let v: f64 = rec[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(format!("line {line}: bad value {:?}", &rec[1])))?;
        if kind == SeriesKind::Price && v <= 0.0 {
            return Err(err(format!("line {line}: price {v} is not positive")));
        }
        if let Some(&prev) = stamps.last() {
            if t == prev {
                return Err(err(format!("line {line}: duplicate timestamp {:?}", &rec[0])));
            }
            if t < prev {
                return Err(err(format!("line {line}: timestamps are not increasing")));
            }
            if t - prev > MAX_SEGMENT {
                return Err(err(format!("line {line}: gap of {} s before this row", t - prev)));
            }
        }
        stamps.push(t);
        values.push(v);
    }
    if stamps.is_empty() {
        return Err(err("no data rows".into()));
    }

    let t0 = stamps[0];
    let mut breakpoints: Vec<f64> = stamps.iter().map(|t| t - t0).collect();
    let last = *breakpoints.last().unwrap();
    let end = match horizon {
        Some(h) => {
            if !(h > last && h - last <= MAX_SEGMENT) {
                return Err(err(format!("horizon {h} s does not end the last segment starting at {last} s")));
            }
            h
        }
        None if breakpoints.len() > 1 => 2.0 * last - breakpoints[breakpoints.len() - 2],
        None => MAX_SEGMENT,
    };
    breakpoints.push(end);
    let series = match kind {
        SeriesKind::Price => ForecastSeries::price(breakpoints, values),
        SeriesKind::Ambient => ForecastSeries::new(breakpoints, values),
    };
    series.map_err(|e| err(e.to_string()))
}

fn load(path: &Path, kind: SeriesKind, horizon: Option<f64>) -> Result<ForecastSeries> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    read_series(file, kind, horizon, path)
}

/// Loads `start_time_iso8601,price_per_mwh`.
pub fn load_price_csv(path: &Path, horizon: Option<f64>) -> Result<ForecastSeries> {
    load(path, SeriesKind::Price, horizon)
}

/// Loads `start_time_iso8601,temperature_c`. Whether the loads can cool against it
/// is checked later, together with the population.
pub fn load_ambient_csv(path: &Path, horizon: Option<f64>) -> Result<ForecastSeries> {
    load(path, SeriesKind::Ambient, horizon)
}
