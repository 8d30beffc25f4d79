//! Batch orchestration: generate → forecast → simulate → analyze over the
//! scenario grid. Every scenario writes into its own directory; merged
//! tables are assembled afterwards in scenario order, so the degree of
//! parallelism never affects the output bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::{Duration, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, linear_fit, simpson_summary, Metric, ScenarioSpec, SimpsonSummary};
use crate::config::{derive_seed, SimConfig};
use crate::demand_gen::{self, DemandSeries};
use crate::error::{Error, Result};
use crate::forecasting::{self, ForecastSeries, Method};
use crate::inventory_sim::{residual_sigma_from, run_des, InventoryPolicy};
use crate::io::{self, ExpectedIndex};
use crate::metrics::{AccuracyReport, PatternReport};
use crate::records::{KpiRow, MetricsRow, SigmaRow};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const ANALYSIS_DIR: &str = "analysis";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    #[serde(flatten)]
    pub spec: ScenarioSpec,
    pub seed: u64,
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub outputs: Vec<PathBuf>,
    pub started: String,
    pub finished: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub master_seed: u64,
    pub tool_version: String,
    pub scenarios: Vec<ScenarioEntry>,
    pub stages: Vec<StageRecord>,
}

impl RunManifest {
    pub fn load(out: &Path) -> Result<Self> {
        io::read_json(&out.join(MANIFEST_FILE))
    }

    fn save(&self, out: &Path) -> Result<()> {
        io::write_json(&out.join(MANIFEST_FILE), self)
    }

    fn record(&mut self, stage: &str, outputs: Vec<PathBuf>, started: String) {
        self.stages.retain(|s| s.stage != stage);
        self.stages.push(StageRecord {
            stage: stage.to_string(),
            outputs,
            started,
            finished: now(),
        });
    }
}

fn now() -> String {
    Utc::now().to_rfc3339()
}

/// Scenario list for a configuration: the grid product, or a single scenario
/// built from the generator settings when the grid is disabled.
pub fn scenarios(config: &SimConfig) -> Result<Vec<ScenarioSpec>> {
    if config.grid.enabled {
        analysis::build_scenario_grid(&config.grid)
    } else {
        let g = &config.generator;
        Ok(vec![ScenarioSpec {
            scenario_id: analysis::scenario_id(0, g.drift_mode, g.trucks_per_dealer, g.median_range),
            drift_mode: g.drift_mode,
            trucks_range: g.trucks_per_dealer,
            median_range: g.median_range,
        }])
    }
}

pub fn scenario_generator(config: &SimConfig, entry: &ScenarioEntry) -> demand_gen::GeneratorConfig {
    demand_gen::GeneratorConfig {
        drift_mode: entry.spec.drift_mode,
        trucks_per_dealer: entry.spec.trucks_range,
        median_range: entry.spec.median_range,
        seed: entry.seed,
        ..config.generator.clone()
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

fn for_each_scenario<R: Send>(
    jobs: usize,
    entries: &[ScenarioEntry],
    f: impl Fn(&ScenarioEntry) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    pool(jobs)?.install(|| {
        entries
            .par_iter()
            .map(|e| f(e).map_err(|err| Error::invalid(format!("scenario {}: {err}", e.spec.scenario_id))))
            .collect()
    })
}

/// Generates demand for every scenario and starts a fresh manifest.
pub fn cmd_generate(config: &SimConfig, out: &Path, jobs: usize) -> Result<RunManifest> {
    config.validate()?;
    let started = now();
    io::create_dir(out)?;
    io::write_text(&out.join(CONFIG_FILE), &config.to_toml()?)?;
    let entries: Vec<ScenarioEntry> = scenarios(config)?
        .into_iter()
        .map(|spec| ScenarioEntry {
            seed: derive_seed(config.seed, &spec.scenario_id),
            dir: PathBuf::from("scenarios").join(&spec.scenario_id),
            spec,
        })
        .collect();
    let outputs = for_each_scenario(jobs, &entries, |e| {
        let dir = out.join(&e.dir);
        let generated = demand_gen::run(&scenario_generator(config, e))?;
        io::write_demand_series(&dir.join(io::DEMAND_SERIES_FILE), &generated.series)?;
        io::write_events(&dir.join(io::DEMAND_EVENTS_FILE), &generated.events)?;
        Ok(vec![e.dir.join(io::DEMAND_SERIES_FILE), e.dir.join(io::DEMAND_EVENTS_FILE)])
    })?;
    let mut manifest = RunManifest {
        config_hash: config.hash()?,
        master_seed: config.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        scenarios: entries,
        stages: Vec::new(),
    };
    manifest.record("generate", outputs.concat(), started);
    manifest.save(out)?;
    Ok(manifest)
}

/// Where external forecasts come from: one file for every scenario, or a
/// directory holding `<scenario_id>.csv` per scenario.
pub fn external_file(external: &Path, scenario_id: &str) -> PathBuf {
    if external.is_dir() {
        external.join(format!("{scenario_id}.csv"))
    } else {
        external.to_path_buf()
    }
}

fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Native forecasts for one scenario plus the residual spread of each model
/// over the training window.
pub fn forecast_scenario(
    config: &SimConfig,
    series: &[DemandSeries],
    models: &[Method],
) -> Result<(Vec<ForecastSeries<f64>>, Vec<SigmaRow>)> {
    let train = config.forecast.train_days as usize;
    let mut forecasts = Vec::new();
    let mut sigmas = Vec::new();
    for &method in models {
        for s in series {
            if s.counts.len() <= train {
                return Err(Error::invalid(format!(
                    "series dealer {} part type {} has {} days, need more than {train}",
                    s.dealer_id,
                    s.part_type,
                    s.counts.len()
                )));
            }
            let history = &s.as_f64()[..train];
            let horizon = s.counts.len() - train;
            let fc = forecasting::forecast(method, history, horizon, &config.forecast)?;
            let residual_sigma = if fc.fit.fitted.is_empty() {
                population_std(history)
            } else {
                residual_sigma_from(&history[fc.fit.fitted_from..], &fc.fit.fitted)?
            };
            let start = s.start_date + Duration::days(train as i64);
            forecasts.push(ForecastSeries::new(method.as_str(), s.dealer_id, s.part_type, start, fc.values)?);
            sigmas.push(SigmaRow {
                model_name: method.as_str().to_string(),
                dealer_id: s.dealer_id,
                part_type: s.part_type,
                residual_sigma,
            });
        }
    }
    Ok((forecasts, sigmas))
}

/// Fits the requested native models (and merges validated external
/// forecasts) for every scenario in the manifest.
pub fn cmd_forecast(
    config: &SimConfig,
    out: &Path,
    models: &[Method],
    external: Option<&Path>,
    jobs: usize,
) -> Result<RunManifest> {
    config.validate()?;
    let started = now();
    let mut manifest = RunManifest::load(out)?;
    let train = config.forecast.train_days as usize;
    let outputs = for_each_scenario(jobs, &manifest.scenarios, |e| {
        let dir = out.join(&e.dir);
        let series = io::read_demand_series(&dir.join(io::DEMAND_SERIES_FILE))?;
        let (mut forecasts, mut sigmas) = forecast_scenario(config, &series, models)?;
        if let Some(ext) = external {
            let Some(first) = series.first() else {
                return Err(Error::invalid("scenario has no demand series"));
            };
            let expected = ExpectedIndex {
                keys: series.iter().map(|s| (s.dealer_id, s.part_type)).collect(),
                start_date: first.start_date + Duration::days(train as i64),
                horizon: first.counts.len() - train,
            };
            let ingested = io::ingest_external(&external_file(ext, &e.spec.scenario_id), &expected)?;
            let native: BTreeSet<&str> = models.iter().map(|m| m.as_str()).collect();
            if let Some(clash) = ingested.iter().find(|f| native.contains(f.model_name.as_str())) {
                return Err(Error::invalid(format!(
                    "external model name `{}` collides with a native model",
                    clash.model_name
                )));
            }
            // no in-sample fit available: fall back to the spread of training demand
            let spread: BTreeMap<(u32, u32), f64> = series
                .iter()
                .map(|s| ((s.dealer_id, s.part_type), population_std(&s.as_f64()[..train])))
                .collect();
            for f in &ingested {
                sigmas.push(SigmaRow {
                    model_name: f.model_name.clone(),
                    dealer_id: f.dealer_id,
                    part_type: f.part_type,
                    residual_sigma: spread[&f.key()],
                });
            }
            forecasts.extend(ingested);
        }
        io::write_forecasts(&dir.join(io::FORECAST_FILE), &forecasts)?;
        io::write_sigmas(&dir.join(io::SIGMA_FILE), &sigmas)?;
        Ok(vec![e.dir.join(io::FORECAST_FILE), e.dir.join(io::SIGMA_FILE)])
    })?;
    manifest.record("forecast", outputs.concat(), started);
    manifest.save(out)?;
    Ok(manifest)
}

/// Scores and simulates every forecast of one scenario against its test
/// window. Rows are ordered by model name, then dealer, then part type.
pub fn evaluate_scenario(
    config: &SimConfig,
    scenario_id: &str,
    series: &[DemandSeries],
    forecasts: &[ForecastSeries<f64>],
    sigmas: &[SigmaRow],
) -> Result<(Vec<MetricsRow>, Vec<KpiRow>)> {
    let train = config.forecast.train_days as usize;
    let by_key: BTreeMap<(u32, u32), &DemandSeries> =
        series.iter().map(|s| ((s.dealer_id, s.part_type), s)).collect();
    let sigma_by_key: BTreeMap<(&str, u32, u32), f64> = sigmas
        .iter()
        .map(|s| ((s.model_name.as_str(), s.dealer_id, s.part_type), s.residual_sigma))
        .collect();
    let mut ordered: Vec<&ForecastSeries<f64>> = forecasts.iter().collect();
    ordered.sort_by(|a, b| (&a.model_name, a.key()).cmp(&(&b.model_name, b.key())));

    let mut metrics = Vec::with_capacity(ordered.len());
    let mut kpis = Vec::with_capacity(ordered.len());
    for f in ordered {
        let s = by_key.get(&f.key()).ok_or_else(|| {
            Error::Join(format!(
                "forecast {} has no demand series for dealer {} part type {}",
                f.model_name, f.dealer_id, f.part_type
            ))
        })?;
        let test = &s.counts[train.min(s.counts.len())..];
        if test.len() != f.values.len() {
            return Err(Error::invalid(format!(
                "forecast {} dealer {} part type {} covers {} days, test window has {}",
                f.model_name,
                f.dealer_id,
                f.part_type,
                f.values.len(),
                test.len()
            )));
        }
        let actual: Vec<f64> = test.iter().map(|&c| c as f64).collect();
        let acc = AccuracyReport::compute(&actual, &f.values)?;
        let pattern = PatternReport::compute(&s.as_f64(), &config.analysis.class_thresholds)?;
        metrics.push(MetricsRow {
            scenario_id: scenario_id.to_string(),
            model_name: f.model_name.clone(),
            dealer_id: f.dealer_id,
            part_type: f.part_type,
            mae: acc.mae,
            rmse: acc.rmse,
            r2: acc.r2,
            iae: acc.iae,
            adi: pattern.adi,
            cv2: pattern.cv2,
            class: pattern.class,
        });

        let sigma = *sigma_by_key
            .get(&(f.model_name.as_str(), f.dealer_id, f.part_type))
            .ok_or_else(|| Error::Join(format!("no residual sigma for {} {:?}", f.model_name, f.key())))?;
        let policy = InventoryPolicy::from_forecast(&f.values, sigma, &config.policy)?;
        let k = run_des(test, &f.values, &policy, &config.costs)?;
        kpis.push(KpiRow {
            scenario_id: scenario_id.to_string(),
            model_name: f.model_name.clone(),
            dealer_id: f.dealer_id,
            part_type: f.part_type,
            total_cost: k.total_cost,
            holding_cost: k.holding_cost,
            order_cost: k.order_cost,
            rush_cost: k.rush_cost,
            transport_cost: k.transport_cost,
            badwill_cost: k.badwill_cost,
            service_level: k.service_level,
            order_count: k.order_count,
            rush_order_count: k.rush_order_count,
        });
    }
    Ok((metrics, kpis))
}

pub const METRICS_HEADER: [&str; 11] = [
    "scenario_id",
    "model_name",
    "dealer_id",
    "part_type",
    "mae",
    "rmse",
    "r2",
    "iae",
    "adi",
    "cv2",
    "class",
];

pub const KPI_HEADER: [&str; 13] = [
    "scenario_id",
    "model_name",
    "dealer_id",
    "part_type",
    "total_cost",
    "holding_cost",
    "order_cost",
    "rush_cost",
    "transport_cost",
    "badwill_cost",
    "service_level",
    "order_count",
    "rush_order_count",
];

/// Runs the inventory simulation and accuracy scoring for every scenario,
/// then merges the per-scenario tables into `metrics.csv` and `kpi.csv`.
pub fn cmd_simulate(config: &SimConfig, out: &Path, jobs: usize) -> Result<RunManifest> {
    config.validate()?;
    let started = now();
    let mut manifest = RunManifest::load(out)?;
    let results = for_each_scenario(jobs, &manifest.scenarios, |e| {
        let dir = out.join(&e.dir);
        let series = io::read_demand_series(&dir.join(io::DEMAND_SERIES_FILE))?;
        let forecasts = io::read_forecasts(&dir.join(io::FORECAST_FILE))?;
        let sigmas: Vec<SigmaRow> = io::read_csv(&dir.join(io::SIGMA_FILE))?;
        let (metrics, kpis) = evaluate_scenario(config, &e.spec.scenario_id, &series, &forecasts, &sigmas)?;
        io::write_csv(&dir.join(io::METRICS_FILE), &METRICS_HEADER, &metrics)?;
        io::write_csv(&dir.join(io::KPI_FILE), &KPI_HEADER, &kpis)?;
        Ok((metrics, kpis))
    })?;
    let (metrics, kpis): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    io::write_csv(&out.join(io::METRICS_FILE), &METRICS_HEADER, &metrics.concat())?;
    io::write_csv(&out.join(io::KPI_FILE), &KPI_HEADER, &kpis.concat())?;
    let mut outputs: Vec<PathBuf> = manifest
        .scenarios
        .iter()
        .flat_map(|e| [e.dir.join(io::METRICS_FILE), e.dir.join(io::KPI_FILE)])
        .collect();
    outputs.extend([PathBuf::from(io::METRICS_FILE), PathBuf::from(io::KPI_FILE)]);
    manifest.record("simulate", outputs, started);
    manifest.save(out)?;
    Ok(manifest)
}

#[derive(Debug, Clone, Serialize)]
struct SummaryRow<'a> {
    model_name: &'a str,
    n_series: usize,
    mae_mean: f64,
    mae_std: f64,
    rmse_mean: f64,
    rmse_std: f64,
    r2_mean: Option<f64>,
    r2_std: Option<f64>,
    r2_n: usize,
    iae_mean: f64,
    iae_std: f64,
    total_cost: f64,
    service_level_mean: f64,
    best: String,
}

#[derive(Debug, Clone, Serialize)]
struct RegressionRow {
    scenario_id: String,
    metric: &'static str,
    slope: Option<f64>,
    intercept: Option<f64>,
    n_points: usize,
    pearson_r: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct AdiCv2Row<'a> {
    scenario_id: &'a str,
    dealer_id: u32,
    part_type: u32,
    adi: Option<f64>,
    cv2: f64,
    class: Option<crate::metrics::PatternClass>,
}

#[derive(Debug, Clone, Serialize)]
struct CostPointRow<'a> {
    scenario_id: &'a str,
    model_name: &'a str,
    metric_value: f64,
    total_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpsonReport {
    pub metric: Metric,
    pub summary: Option<SimpsonSummary<f64>>,
    pub skipped_scenarios: Vec<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub point_mode: analysis::PointMode,
    pub simpson: Vec<SimpsonReport>,
    /// Rank agreement between mean MAE and summed total cost across models.
    pub kendall_tau_mae_cost: Option<f64>,
}

/// Summary tables, per-scenario regressions, Simpson diagnostics and
/// plot-ready scatter data from merged metric and KPI tables.
pub fn analyze_tables(
    config: &SimConfig,
    metrics: &[MetricsRow],
    kpis: &[KpiRow],
    out_dir: &Path,
) -> Result<(analysis::Summary, AnalysisReport)> {
    let summary = analysis::summarize(metrics, kpis)?;
    let summary_rows: Vec<SummaryRow> = summary
        .models
        .iter()
        .map(|m| SummaryRow {
            model_name: &m.model_name,
            n_series: m.n_series,
            mae_mean: m.mae.mean,
            mae_std: m.mae.std,
            rmse_mean: m.rmse.mean,
            rmse_std: m.rmse.std,
            r2_mean: m.r2.map(|r| r.mean),
            r2_std: m.r2.map(|r| r.std),
            r2_n: m.r2.map_or(0, |r| r.n),
            iae_mean: m.iae.mean,
            iae_std: m.iae.std,
            total_cost: m.total_cost,
            service_level_mean: m.service_level.mean,
            best: summary
                .best
                .iter()
                .filter(|(_, w)| **w == m.model_name)
                .map(|(c, _)| c.as_str())
                .collect::<Vec<_>>()
                .join(";"),
        })
        .collect();
    io::write_csv(
        &out_dir.join("summary.csv"),
        &[
            "model_name",
            "n_series",
            "mae_mean",
            "mae_std",
            "rmse_mean",
            "rmse_std",
            "r2_mean",
            "r2_std",
            "r2_n",
            "iae_mean",
            "iae_std",
            "total_cost",
            "service_level_mean",
            "best",
        ],
        &summary_rows,
    )?;
    io::write_text(&out_dir.join("summary.txt"), &summary.to_text())?;

    let mode = config.analysis.point_mode;
    let plot_dir = out_dir.join("plotdata");
    let mut regressions = Vec::new();
    let mut simpson = Vec::new();
    for metric in Metric::ALL {
        let points = analysis::scenario_points(metrics, kpis, metric, mode)?;
        let mut cost_rows = Vec::new();
        let mut groups = Vec::new();
        let mut ids = Vec::new();
        for (scenario, pts) in &points {
            let xy: Vec<(f64, f64)> = pts.iter().map(|p| (p.1, p.2)).collect();
            let fit = linear_fit(&xy);
            regressions.push(RegressionRow {
                scenario_id: scenario.clone(),
                metric: metric.as_str(),
                slope: fit.map(|f| f.slope),
                intercept: fit.map(|f| f.intercept),
                n_points: xy.len(),
                pearson_r: fit.and_then(|f| f.pearson_r),
            });
            cost_rows.extend(pts.iter().map(|(model, x, y)| CostPointRow {
                scenario_id: scenario,
                model_name: model,
                metric_value: *x,
                total_cost: *y,
            }));
            groups.push(xy);
            ids.push(scenario.as_str());
        }
        let pooled: Vec<(f64, f64)> = groups.iter().flatten().copied().collect();
        let fit = linear_fit(&pooled);
        regressions.push(RegressionRow {
            scenario_id: "pooled".to_string(),
            metric: metric.as_str(),
            slope: fit.map(|f| f.slope),
            intercept: fit.map(|f| f.intercept),
            n_points: pooled.len(),
            pearson_r: fit.and_then(|f| f.pearson_r),
        });
        io::write_csv(
            &plot_dir.join(format!("cost_vs_{}.csv", metric.as_str())),
            &["scenario_id", "model_name", "metric_value", "total_cost"],
            &cost_rows,
        )?;
        simpson.push(match simpson_summary(&groups) {
            Ok(s) => SimpsonReport {
                metric,
                skipped_scenarios: s.skipped_groups.iter().map(|&i| ids[i].to_string()).collect(),
                summary: Some(s),
                note: None,
            },
            Err(e) => SimpsonReport {
                metric,
                summary: None,
                skipped_scenarios: Vec::new(),
                note: Some(e.to_string()),
            },
        });
    }
    io::write_csv(
        &out_dir.join("regressions.csv"),
        &["scenario_id", "metric", "slope", "intercept", "n_points", "pearson_r"],
        &regressions,
    )?;

    let mut seen = BTreeSet::new();
    let scatter: Vec<AdiCv2Row> = metrics
        .iter()
        .filter(|m| seen.insert((m.scenario_id.as_str(), m.dealer_id, m.part_type)))
        .map(|m| AdiCv2Row {
            scenario_id: &m.scenario_id,
            dealer_id: m.dealer_id,
            part_type: m.part_type,
            adi: m.adi,
            cv2: m.cv2,
            class: m.class,
        })
        .collect();
    io::write_csv(
        &plot_dir.join("adi_cv2.csv"),
        &["scenario_id", "dealer_id", "part_type", "adi", "cv2", "class"],
        &scatter,
    )?;

    let report = AnalysisReport {
        point_mode: mode,
        simpson,
        kendall_tau_mae_cost: summary.mae_cost_tau().ok(),
    };
    io::write_json(&out_dir.join("simpson.json"), &report)?;
    Ok((summary, report))
}

pub fn cmd_analyze(config: &SimConfig, metrics: &Path, kpi: &Path, out_dir: &Path) -> Result<(analysis::Summary, AnalysisReport)> {
    let metrics: Vec<MetricsRow> = io::read_csv(metrics)?;
    let kpis: Vec<KpiRow> = io::read_csv(kpi)?;
    analyze_tables(config, &metrics, &kpis, out_dir)
}

/// Analysis stage over a run directory, recorded in its manifest.
pub fn cmd_analyze_run(config: &SimConfig, out: &Path) -> Result<(analysis::Summary, AnalysisReport)> {
    let started = now();
    let mut manifest = RunManifest::load(out)?;
    let result = cmd_analyze(config, &out.join(io::METRICS_FILE), &out.join(io::KPI_FILE), &out.join(ANALYSIS_DIR))?;
    let a = PathBuf::from(ANALYSIS_DIR);
    let mut outputs = vec![a.join("summary.csv"), a.join("summary.txt"), a.join("regressions.csv"), a.join("simpson.json")];
    outputs.push(a.join("plotdata").join("adi_cv2.csv"));
    outputs.extend(Metric::ALL.iter().map(|m| a.join("plotdata").join(format!("cost_vs_{}.csv", m.as_str()))));
    manifest.record("analyze", outputs, started);
    manifest.save(out)?;
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct RunOptions<'a> {
    pub jobs: usize,
    pub external: Option<&'a Path>,
}

/// All four stages in sequence with the models listed in the configuration.
pub fn cmd_run_all(config: &SimConfig, out: &Path, opts: &RunOptions) -> Result<(analysis::Summary, AnalysisReport)> {
    cmd_generate(config, out, opts.jobs)?;
    cmd_forecast(config, out, &config.forecast.models, opts.external, opts.jobs)?;
    cmd_simulate(config, out, opts.jobs)?;
    cmd_analyze_run(config, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand_gen::CountRange;

    fn smoke() -> SimConfig {
        let mut c = SimConfig::default();
        c.generator.horizon_days = 60;
        c.generator.n_dealers = 2;
        c.generator.trucks_per_dealer = CountRange::new(3, 4);
        c.forecast.train_days = 40;
        c.forecast.tuning_window_days = 10;
        c.forecast.seasonal_period_days = 7;
        c.grid.enabled = false;
        c
    }

    #[test]
    fn single_scenario_without_grid() {
        let specs = scenarios(&smoke()).unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].scenario_id, "s00_none_t3-4_m100-150");
    }

    #[test]
    fn forecasts_cover_test_window() {
        let cfg = smoke();
        let gen = demand_gen::run(&cfg.generator).unwrap();
        let (fc, sig) = forecast_scenario(&cfg, &gen.series, &Method::ALL).unwrap();
        assert_eq!(fc.len(), gen.series.len() * Method::ALL.len());
        assert_eq!(sig.len(), fc.len());
        assert!(fc.iter().all(|f| f.values.len() == 20));
        assert!(sig.iter().all(|s| s.residual_sigma.is_finite() && s.residual_sigma >= 0.0));
        let (m, k) = evaluate_scenario(&cfg, "x", &gen.series, &fc, &sig).unwrap();
        assert_eq!(m.len(), fc.len());
        assert_eq!(k.len(), fc.len());
        assert!(k.iter().all(|r| (0.0..=1.0).contains(&r.service_level)));
    }

    #[test]
    fn all_zero_history_gives_zero_croston() {
        let cfg = smoke();
        let series = vec![DemandSeries {
            dealer_id: 0,
            part_type: 0,
            start_date: cfg.generator.start_date,
            counts: vec![0; 60],
        }];
        let (fc, _) = forecast_scenario(&cfg, &series, &[Method::Croston]).unwrap();
        assert!(fc[0].values.iter().all(|&v| v == 0.0));
    }
}
