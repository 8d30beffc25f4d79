//! Reading and writing the tabular artifacts.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::demand_gen::{DemandEvent, DemandSeries};
use crate::error::{Error, Result};
use crate::forecasting::ForecastSeries;
use crate::records::{DemandRow, ForecastRow, SigmaRow};

pub const DEMAND_SERIES_FILE: &str = "demand_series.csv";
pub const DEMAND_EVENTS_FILE: &str = "demand_events.jsonl";
pub const FORECAST_FILE: &str = "forecast.csv";
pub const SIGMA_FILE: &str = "forecast_sigma.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const KPI_FILE: &str = "kpi.csv";

pub const FORECAST_HEADER: [&str; 5] = ["model_name", "dealer_id", "part_type", "date", "value"];

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            create_dir(parent)?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// Writes `rows` with a header line; an empty slice still yields the header.
pub fn write_csv<R: Serialize>(path: &Path, header: &[&str], rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize().enumerate() {
        rows.push(rec.map_err(|e| ingest(path, format!("row {}: {e}", i + 1)))?);
    }
    Ok(rows)
}

fn ingest(path: &Path, message: impl Into<String>) -> Error {
    Error::Ingest {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<V: Serialize>(path: &Path, value: &V) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<V: DeserializeOwned>(path: &Path) -> Result<V> {
    Ok(serde_json::from_reader(open(path)?)?)
}

pub const DEMAND_HEADER: [&str; 4] = ["date", "dealer_id", "part_type", "count"];

/// Dense series, one block per (dealer, part type) in input order.
pub fn write_demand_series(path: &Path, series: &[DemandSeries]) -> Result<()> {
    let rows: Vec<DemandRow> = series
        .iter()
        .flat_map(|s| {
            s.counts.iter().enumerate().map(move |(d, &count)| DemandRow {
                date: s.start_date + Duration::days(d as i64),
                dealer_id: s.dealer_id,
                part_type: s.part_type,
                count,
            })
        })
        .collect();
    write_csv(path, &DEMAND_HEADER, &rows)
}

/// Reads a dense series file; every (dealer, part type) must cover the same
/// consecutive dates.
pub fn read_demand_series(path: &Path) -> Result<Vec<DemandSeries>> {
    let rows: Vec<DemandRow> = read_csv(path)?;
    let mut grouped: BTreeMap<(u32, u32), Vec<(NaiveDate, u32)>> = BTreeMap::new();
    for r in rows {
        grouped.entry((r.dealer_id, r.part_type)).or_default().push((r.date, r.count));
    }
    let mut series = Vec::with_capacity(grouped.len());
    let mut span: Option<(NaiveDate, usize)> = None;
    for ((dealer_id, part_type), mut days) in grouped {
        days.sort_by_key(|d| d.0);
        let start_date = days[0].0;
        for (i, (date, _)) in days.iter().enumerate() {
            if *date != start_date + Duration::days(i as i64) {
                return Err(ingest(
                    path,
                    format!("series dealer {dealer_id} part type {part_type} is not dense at {date}"),
                ));
            }
        }
        match span {
            None => span = Some((start_date, days.len())),
            Some(s) if s != (start_date, days.len()) => {
                return Err(ingest(
                    path,
                    format!("series dealer {dealer_id} part type {part_type} spans a different date range"),
                ))
            }
            _ => {}
        }
        series.push(DemandSeries {
            dealer_id,
            part_type,
            start_date,
            counts: days.into_iter().map(|d| d.1).collect(),
        });
    }
    Ok(series)
}

pub fn write_events(path: &Path, events: &[DemandEvent]) -> Result<()> {
    let mut w = create(path)?;
    for ev in events {
        serde_json::to_writer(&mut w, ev)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_events(path: &Path) -> Result<Vec<DemandEvent>> {
    let mut events = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(serde_json::from_str(&line).map_err(|e| ingest(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(events)
}

pub fn forecast_rows(series: &[ForecastSeries<f64>]) -> Vec<ForecastRow> {
    series
        .iter()
        .flat_map(|s| {
            s.values.iter().enumerate().map(move |(d, &value)| ForecastRow {
                model_name: s.model_name.clone(),
                dealer_id: s.dealer_id,
                part_type: s.part_type,
                date: s.start_date + Duration::days(d as i64),
                value,
            })
        })
        .collect()
}

pub fn write_forecasts(path: &Path, series: &[ForecastSeries<f64>]) -> Result<()> {
    write_csv(path, &FORECAST_HEADER, &forecast_rows(series))
}

pub const SIGMA_HEADER: [&str; 4] = ["model_name", "dealer_id", "part_type", "residual_sigma"];

pub fn write_sigmas(path: &Path, rows: &[SigmaRow]) -> Result<()> {
    write_csv(path, &SIGMA_HEADER, rows)
}

/// What a forecast file must cover: the series keys and the forecast dates.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedIndex {
    pub keys: BTreeSet<(u32, u32)>,
    pub start_date: NaiveDate,
    pub horizon: usize,
}

/// Parses and validates a forecast file in the `forecast.csv` schema. Each
/// model in the file must supply a complete, non-negative daily forecast for
/// every expected key and nothing else.
pub fn ingest_external(path: &Path, expected: &ExpectedIndex) -> Result<Vec<ForecastSeries<f64>>> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != FORECAST_HEADER {
        return Err(ingest(
            path,
            format!("header must be `{}`, found `{}`", FORECAST_HEADER.join(","), header.join(",")),
        ));
    }
    let mut by_key: BTreeMap<(String, u32, u32), BTreeMap<NaiveDate, f64>> = BTreeMap::new();
    for (i, rec) in rdr.deserialize::<ForecastRow>().enumerate() {
        let line = i + 2;
        let row = rec.map_err(|e| ingest(path, format!("row {line}: {e}")))?;
        if row.value.is_nan() {
            return Err(ingest(path, format!("row {line}: column `value` is NaN")));
        }
        if !row.value.is_finite() || row.value < 0.0 {
            return Err(ingest(
                path,
                format!("row {line}: column `value` must be non-negative and finite, got {}", row.value),
            ));
        }
        let slot = by_key.entry((row.model_name.clone(), row.dealer_id, row.part_type)).or_default();
        if slot.insert(row.date, row.value).is_some() {
            return Err(ingest(path, format!("row {line}: duplicate date {} for model {}", row.date, row.model_name)));
        }
    }
    if by_key.is_empty() {
        return Err(ingest(path, "file holds no forecast rows"));
    }

    let models: BTreeSet<String> = by_key.keys().map(|k| k.0.clone()).collect();
    let mut out = Vec::new();
    for model in &models {
        let present: BTreeSet<(u32, u32)> =
            by_key.keys().filter(|k| &k.0 == model).map(|k| (k.1, k.2)).collect();
        let missing: Vec<_> = expected.keys.difference(&present).collect();
        if !missing.is_empty() {
            let list: Vec<String> = missing.iter().map(|(d, p)| format!("(dealer {d}, part type {p})")).collect();
            return Err(ingest(path, format!("model {model} is missing keys: {}", list.join(", "))));
        }
        let extra: Vec<_> = present.difference(&expected.keys).collect();
        if !extra.is_empty() {
            let list: Vec<String> = extra.iter().map(|(d, p)| format!("(dealer {d}, part type {p})")).collect();
            return Err(ingest(path, format!("model {model} has unexpected keys: {}", list.join(", "))));
        }
        for &(dealer_id, part_type) in &expected.keys {
            let days = &by_key[&(model.clone(), dealer_id, part_type)];
            let mut values = Vec::with_capacity(expected.horizon);
            for d in 0..expected.horizon {
                let date = expected.start_date + Duration::days(d as i64);
                match days.get(&date) {
                    Some(&v) => values.push(v),
                    None => {
                        return Err(ingest(
                            path,
                            format!("model {model} dealer {dealer_id} part type {part_type}: no value for {date}"),
                        ))
                    }
                }
            }
            if days.len() != expected.horizon {
                return Err(ingest(
                    path,
                    format!("model {model} dealer {dealer_id} part type {part_type}: dates outside the forecast horizon"),
                ));
            }
            out.push(ForecastSeries::new(model.clone(), dealer_id, part_type, expected.start_date, values)?);
        }
    }
    Ok(out)
}

/// Groups flat forecast rows back into series without index checks.
pub fn read_forecasts(path: &Path) -> Result<Vec<ForecastSeries<f64>>> {
    let rows: Vec<ForecastRow> = read_csv(path)?;
    let mut grouped: BTreeMap<(String, u32, u32), Vec<(NaiveDate, f64)>> = BTreeMap::new();
    for r in rows {
        grouped.entry((r.model_name, r.dealer_id, r.part_type)).or_default().push((r.date, r.value));
    }
    grouped
        .into_iter()
        .map(|((model, dealer, part), mut days)| {
            days.sort_by_key(|d| d.0);
            ForecastSeries::new(model, dealer, part, days[0].0, days.into_iter().map(|d| d.1).collect())
        })
        .collect()
}

pub fn scenario_dir(out: &Path, scenario_id: &str) -> PathBuf {
    out.join("scenarios").join(scenario_id)
}
