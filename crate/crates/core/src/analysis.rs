//! Cross-scenario analysis: the scenario grid, least-squares fits of cost on
//! accuracy metrics, Simpson's-paradox diagnostics and per-model summaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::demand_gen::{CountRange, DriftMode};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::records::{KpiRow, MetricsRow};
use crate::survival::Interval;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario_id: String,
    pub drift_mode: DriftMode,
    pub trucks_range: CountRange,
    pub median_range: Interval<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// When false the pipeline runs a single scenario built from the
    /// generator settings as given.
    pub enabled: bool,
    pub drift_modes: Vec<DriftMode>,
    pub truck_ranges: Vec<CountRange>,
    pub median_ranges: Vec<Interval<f64>>,
}

impl Default for GridConfig {
    /// Four drift conditions × four fleet-size ranges × three lifetime ranges.
    fn default() -> Self {
        Self {
            enabled: true,
            drift_modes: DriftMode::ALL.to_vec(),
            truck_ranges: vec![
                CountRange::new(5, 10),
                CountRange::new(10, 30),
                CountRange::new(30, 50),
                CountRange::new(50, 100),
            ],
            median_ranges: vec![
                Interval { lo: 100.0, hi: 150.0 },
                Interval { lo: 150.0, hi: 365.0 },
                Interval { lo: 365.0, hi: 730.0 },
            ],
        }
    }
}

pub fn scenario_id(index: usize, drift: DriftMode, trucks: CountRange, median: Interval<f64>) -> String {
    format!("s{index:02}_{drift}_t{trucks}_m{}-{}", median.lo, median.hi)
}

/// Cartesian product of the grid axes, drift mode outermost.
pub fn build_scenario_grid(grid: &GridConfig) -> Result<Vec<ScenarioSpec>> {
    if grid.drift_modes.is_empty() || grid.truck_ranges.is_empty() || grid.median_ranges.is_empty() {
        return Err(Error::config("grid axes must all be non-empty"));
    }
    let mut specs = Vec::new();
    for &drift_mode in &grid.drift_modes {
        for &trucks_range in &grid.truck_ranges {
            for &median_range in &grid.median_ranges {
                let scenario_id = scenario_id(specs.len(), drift_mode, trucks_range, median_range);
                specs.push(ScenarioSpec {
                    scenario_id,
                    drift_mode,
                    trucks_range,
                    median_range,
                });
            }
        }
    }
    Ok(specs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult<T> {
    pub slope: T,
    pub intercept: T,
    pub n_points: usize,
    /// `None` when `y` is constant.
    pub pearson_r: Option<T>,
}

/// Ordinary least squares of `y` on `x`. `None` with fewer than two points or
/// constant `x`, where the slope is undefined.
pub fn linear_fit<T: Scalar>(points: &[(T, T)]) -> Option<RegressionResult<T>> {
    if points.len() < 2 {
        return None;
    }
    let n = T::from_count(points.len());
    let mean_x = points.iter().map(|p| p.0).sum::<T>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || !sxx.is_finite() {
        return None;
    }
    let slope = sxy / sxx;
    let pearson_r = (syy > T::zero()).then(|| (sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one()));
    Some(RegressionResult {
        slope,
        intercept: mean_y - slope * mean_x,
        n_points: points.len(),
        pearson_r,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpsonSummary<T> {
    pub mean_within_slope: T,
    /// Mean Pearson r over groups where it is defined.
    pub mean_within_r: Option<T>,
    pub pooled_slope: T,
    pub pooled_r: Option<T>,
    /// Within-group and pooled slopes have opposite signs.
    pub paradox: bool,
    pub groups_used: usize,
    /// Indices of groups whose fit was undefined.
    pub skipped_groups: Vec<usize>,
}

/// Compares the average within-group slope with the slope of all points
/// pooled together.
pub fn simpson_summary<T: Scalar>(groups: &[Vec<(T, T)>]) -> Result<SimpsonSummary<T>> {
    if groups.len() < 2 {
        return Err(Error::invalid("Simpson summary needs at least two groups"));
    }
    let mut slopes = Vec::new();
    let mut rs = Vec::new();
    let mut skipped_groups = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        match linear_fit(g) {
            Some(fit) => {
                slopes.push(fit.slope);
                rs.extend(fit.pearson_r);
            }
            None => skipped_groups.push(i),
        }
    }
    if slopes.is_empty() {
        return Err(Error::invalid("no group admits a regression fit"));
    }
    let pooled_points: Vec<(T, T)> = groups.iter().flatten().copied().collect();
    let pooled = linear_fit(&pooled_points).ok_or_else(|| Error::invalid("pooled regression is undefined"))?;
    let mean_within_slope = slopes.iter().copied().sum::<T>() / T::from_count(slopes.len());
    let mean_within_r = (!rs.is_empty()).then(|| rs.iter().copied().sum::<T>() / T::from_count(rs.len()));
    let paradox = (mean_within_slope < T::zero() && pooled.slope > T::zero())
        || (mean_within_slope > T::zero() && pooled.slope < T::zero());
    Ok(SimpsonSummary {
        mean_within_slope,
        mean_within_r,
        pooled_slope: pooled.slope,
        pooled_r: pooled.pearson_r,
        paradox,
        groups_used: slopes.len(),
        skipped_groups,
    })
}

/// Kendall rank correlation (tau-a) between two score vectors; tied pairs
/// count as neither concordant nor discordant.
pub fn kendall_tau<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::invalid("Kendall tau needs two equally long vectors of length >= 2"));
    }
    let mut score = 0i64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            let s = da * db;
            if s > T::zero() {
                score += 1;
            } else if s < T::zero() {
                score -= 1;
            }
        }
    }
    let pairs = a.len() * (a.len() - 1) / 2;
    Ok(T::from_i64(score).unwrap() / T::from_count(pairs))
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Self {
            mean,
            std: var.sqrt(),
            n: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model_name: String,
    pub n_series: usize,
    pub mae: MeanStd,
    pub rmse: MeanStd,
    /// Over series with defined R² only.
    pub r2: Option<MeanStd>,
    pub iae: MeanStd,
    pub total_cost: f64,
    pub service_level: MeanStd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Mae,
    Rmse,
    R2,
    Iae,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Mae, Metric::Rmse, Metric::R2, Metric::Iae];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Mae => "mae",
            Metric::Rmse => "rmse",
            Metric::R2 => "r2",
            Metric::Iae => "iae",
        }
    }

    pub fn value(self, row: &MetricsRow) -> Option<f64> {
        match self {
            Metric::Mae => Some(row.mae),
            Metric::Rmse => Some(row.rmse),
            Metric::R2 => row.r2,
            Metric::Iae => Some(row.iae),
        }
    }

    pub fn higher_is_better(self) -> bool {
        self == Metric::R2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub models: Vec<ModelSummary>,
    /// Best model per column (`mae`, `rmse`, `r2`, `iae`, `total_cost`).
    pub best: BTreeMap<String, String>,
    pub grand_total_cost: f64,
    pub r2_undefined: usize,
}

/// Joins metric and KPI rows and verifies that both sides carry exactly the
/// same (scenario, model, dealer, part type) keys.
pub fn join<'a>(metrics: &'a [MetricsRow], kpis: &'a [KpiRow]) -> Result<Vec<(&'a MetricsRow, &'a KpiRow)>> {
    let kpi_by_key: BTreeMap<_, _> = kpis.iter().map(|k| (k.key(), k)).collect();
    let metric_keys: BTreeSet<_> = metrics.iter().map(|m| m.key()).collect();
    let mut orphans = Vec::new();
    for k in &metric_keys {
        if !kpi_by_key.contains_key(k) {
            orphans.push(format!("metrics-only {k:?}"));
        }
    }
    for k in kpi_by_key.keys() {
        if !metric_keys.contains(k) {
            orphans.push(format!("kpi-only {k:?}"));
        }
    }
    if !orphans.is_empty() {
        let shown = orphans.iter().take(20).cloned().collect::<Vec<_>>().join("; ");
        return Err(Error::Join(format!("{} orphan key(s): {shown}", orphans.len())));
    }
    Ok(metrics.iter().map(|m| (m, kpi_by_key[&m.key()])).collect())
}

/// Per-model mean ± std of each accuracy metric across all series and
/// scenarios, with summed total cost.
pub fn summarize(metrics: &[MetricsRow], kpis: &[KpiRow]) -> Result<Summary> {
    let joined = join(metrics, kpis)?;
    let mut by_model: BTreeMap<&str, Vec<(&MetricsRow, &KpiRow)>> = BTreeMap::new();
    for (m, k) in joined {
        by_model.entry(m.model_name.as_str()).or_default().push((m, k));
    }
    let mut models = Vec::new();
    let mut r2_undefined = 0;
    for (name, rows) in by_model {
        let col = |f: &dyn Fn(&MetricsRow) -> f64| rows.iter().map(|(m, _)| f(m)).collect::<Vec<_>>();
        let r2: Vec<f64> = rows.iter().filter_map(|(m, _)| m.r2).collect();
        r2_undefined += rows.len() - r2.len();
        let service: Vec<f64> = rows.iter().map(|(_, k)| k.service_level).collect();
        models.push(ModelSummary {
            model_name: name.to_string(),
            n_series: rows.len(),
            mae: MeanStd::of(&col(&|m| m.mae)).unwrap(),
            rmse: MeanStd::of(&col(&|m| m.rmse)).unwrap(),
            r2: MeanStd::of(&r2),
            iae: MeanStd::of(&col(&|m| m.iae)).unwrap(),
            total_cost: rows.iter().map(|(_, k)| k.total_cost).sum(),
            service_level: MeanStd::of(&service).unwrap(),
        });
    }

    let mut best = BTreeMap::new();
    let mut pick = |column: &str, score: &dyn Fn(&ModelSummary) -> Option<f64>, higher: bool| {
        let winner = models
            .iter()
            .filter_map(|m| score(m).map(|s| (m, s)))
            .fold(None::<(&ModelSummary, f64)>, |acc, (m, s)| match acc {
                Some((_, b)) if (higher && s <= b) || (!higher && s >= b) => acc,
                _ => Some((m, s)),
            });
        if let Some((m, _)) = winner {
            best.insert(column.to_string(), m.model_name.clone());
        }
    };
    pick("mae", &|m| Some(m.mae.mean), false);
    pick("rmse", &|m| Some(m.rmse.mean), false);
    pick("r2", &|m| m.r2.map(|r| r.mean), true);
    pick("iae", &|m| Some(m.iae.mean), false);
    pick("total_cost", &|m| Some(m.total_cost), false);

    Ok(Summary {
        models,
        best,
        grand_total_cost: kpis.iter().map(|k| k.total_cost).sum(),
        r2_undefined,
    })
}

fn fmt_ms(ms: Option<MeanStd>) -> String {
    ms.map_or_else(|| "n/a".to_string(), |m| format!("{:.3} ± {:.3}", m.mean, m.std))
}

impl Summary {
    /// Aligned plain-text rendering; best value per column marked with `*`.
    pub fn to_text(&self) -> String {
        let header = ["model", "series", "MAE", "RMSE", "R2", "IAE", "total cost", "fill rate"];
        let star = |col: &str, name: &str| if self.best.get(col).map(String::as_str) == Some(name) { "*" } else { "" };
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for m in &self.models {
            let n = m.model_name.as_str();
            rows.push(vec![
                n.to_string(),
                m.n_series.to_string(),
                format!("{}{}", fmt_ms(Some(m.mae)), star("mae", n)),
                format!("{}{}", fmt_ms(Some(m.rmse)), star("rmse", n)),
                format!("{}{}", fmt_ms(m.r2), star("r2", n)),
                format!("{}{}", fmt_ms(Some(m.iae)), star("iae", n)),
                format!("{:.4e}{}", m.total_cost, star("total_cost", n)),
                format!("{:.4}", m.service_level.mean),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap())
            .collect();
        let mut out = String::new();
        for (i, r) in rows.iter().enumerate() {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| {
                    let pad = w - cell.chars().count();
                    if c == 0 {
                        format!("{cell}{}", " ".repeat(pad))
                    } else {
                        format!("{}{cell}", " ".repeat(pad))
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
            if i == 0 {
                let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
            }
        }
        let _ = writeln!(out, "\ngrand total cost: {:.6e}", self.grand_total_cost);
        if self.r2_undefined > 0 {
            let _ = writeln!(out, "R2 undefined (constant actuals) for {} series, excluded", self.r2_undefined);
        }
        out
    }

    /// Kendall tau between the model order by mean MAE and by summed cost.
    pub fn mae_cost_tau(&self) -> Result<f64> {
        let mae: Vec<f64> = self.models.iter().map(|m| m.mae.mean).collect();
        let cost: Vec<f64> = self.models.iter().map(|m| m.total_cost).collect();
        kendall_tau(&mae, &cost)
    }
}

/// How points entering the per-scenario regressions are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointMode {
    /// One point per model: its mean metric and summed cost in the scenario.
    ModelMeans,
    /// One point per (model, series).
    PerSeries,
}

/// `(model_name, metric value, total cost)` points keyed by scenario id.
pub type ScenarioPoints = BTreeMap<String, Vec<(String, f64, f64)>>;

/// Regression points per scenario for `metric`, keyed by scenario id. Points
/// whose metric is undefined are dropped.
pub fn scenario_points(
    metrics: &[MetricsRow],
    kpis: &[KpiRow],
    metric: Metric,
    mode: PointMode,
) -> Result<ScenarioPoints> {
    let joined = join(metrics, kpis)?;
    let mut out = ScenarioPoints::new();
    match mode {
        PointMode::PerSeries => {
            for (m, k) in joined {
                if let Some(v) = metric.value(m) {
                    out.entry(m.scenario_id.clone())
                        .or_default()
                        .push((m.model_name.clone(), v, k.total_cost));
                }
            }
        }
        PointMode::ModelMeans => {
            let mut acc: BTreeMap<(String, String), (f64, usize, f64)> = BTreeMap::new();
            for (m, k) in joined {
                let e = acc.entry((m.scenario_id.clone(), m.model_name.clone())).or_insert((0.0, 0, 0.0));
                if let Some(v) = metric.value(m) {
                    e.0 += v;
                    e.1 += 1;
                }
                e.2 += k.total_cost;
            }
            for ((scenario, model), (sum, n, cost)) in acc {
                if n > 0 {
                    out.entry(scenario).or_default().push((model, sum / n as f64, cost));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_grid_has_48_scenarios() {
        let specs = build_scenario_grid(&GridConfig::default()).unwrap();
        assert_eq!(specs.len(), 48);
        let ids: BTreeSet<_> = specs.iter().map(|s| s.scenario_id.clone()).collect();
        assert_eq!(ids.len(), 48);
        assert_eq!(specs[0].scenario_id, "s00_none_t5-10_m100-150");
    }

    #[test]
    fn small_grids() {
        let one = GridConfig {
            enabled: true,
            drift_modes: vec![DriftMode::Slow],
            truck_ranges: vec![CountRange::new(1, 2)],
            median_ranges: vec![Interval { lo: 10.0, hi: 20.0 }],
        };
        assert_eq!(build_scenario_grid(&one).unwrap().len(), 1);
        let six = GridConfig {
            enabled: true,
            drift_modes: vec![DriftMode::None, DriftMode::Sudden],
            truck_ranges: vec![CountRange::new(1, 2), CountRange::new(3, 4), CountRange::new(5, 6)],
            median_ranges: vec![Interval { lo: 10.0, hi: 20.0 }],
        };
        let specs = build_scenario_grid(&six).unwrap();
        assert_eq!(specs.len(), 6);
        assert_eq!(specs.iter().map(|s| &s.scenario_id).collect::<BTreeSet<_>>().len(), 6);
        assert!(build_scenario_grid(&GridConfig {
            drift_modes: vec![],
            ..GridConfig::default()
        })
        .is_err());
    }

    #[test]
    fn linear_fit_examples() {
        let f = linear_fit(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!((f.slope, f.intercept, f.pearson_r), (1.0, 0.0, Some(1.0)));
        let f = linear_fit(&[(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!((f.slope, f.pearson_r), (-1.0, Some(-1.0)));
        assert!(linear_fit(&[(2.0, 1.0), (2.0, 3.0)]).is_none());
        assert!(linear_fit(&[(2.0, 1.0)]).is_none());
        let flat = linear_fit(&[(0.0, 2.0), (1.0, 2.0), (3.0, 2.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.pearson_r, None);
    }

    #[test]
    fn simpson_identical_groups() {
        let g: Vec<(f64, f64)> = vec![(0.0, 1.0), (1.0, 2.5), (2.0, 3.9), (3.0, 6.1)];
        let s = simpson_summary(&[g.clone(), g.clone(), g]).unwrap();
        assert!(s.mean_within_slope > 0.0 && s.pooled_slope > 0.0);
        assert_relative_eq!(s.mean_within_slope, s.pooled_slope, max_relative = 1e-12);
        assert!(!s.paradox);
    }

    #[test]
    fn simpson_skips_degenerate_groups() {
        let good = vec![(0.0, 0.0), (1.0, 1.0)];
        let bad = vec![(5.0, 0.0), (5.0, 3.0)];
        let s = simpson_summary(&[good, bad]).unwrap();
        assert_eq!(s.skipped_groups, vec![1]);
        assert_eq!(s.groups_used, 1);
        assert!(simpson_summary(&[vec![(0.0, 0.0), (1.0, 1.0)]]).is_err());
    }

    #[test]
    fn kendall_examples() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_relative_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap(), 1.0 / 3.0);
    }

    fn mrow(scenario: &str, model: &str, part: u32, mae: f64, r2: Option<f64>) -> MetricsRow {
        MetricsRow {
            scenario_id: scenario.into(),
            model_name: model.into(),
            dealer_id: 0,
            part_type: part,
            mae,
            rmse: mae * 1.5,
            r2,
            iae: mae / 2.0,
            adi: Some(2.0),
            cv2: 0.1,
            class: None,
        }
    }

    fn krow(scenario: &str, model: &str, part: u32, cost: f64) -> KpiRow {
        KpiRow {
            scenario_id: scenario.into(),
            model_name: model.into(),
            dealer_id: 0,
            part_type: part,
            total_cost: cost,
            holding_cost: cost,
            order_cost: 0.0,
            rush_cost: 0.0,
            transport_cost: 0.0,
            badwill_cost: 0.0,
            service_level: 1.0,
            order_count: 0,
            rush_order_count: 0,
        }
    }

    #[test]
    fn summarize_single_series() {
        let s = summarize(&[mrow("a", "croston", 0, 0.4, Some(-0.1))], &[krow("a", "croston", 0, 99.0)]).unwrap();
        let m = &s.models[0];
        assert_eq!((m.mae.mean, m.mae.std), (0.4, 0.0));
        assert_eq!(m.total_cost, 99.0);
    }

    #[test]
    fn summarize_identical_models() {
        let metrics = vec![mrow("a", "x", 0, 0.3, Some(0.2)), mrow("a", "y", 0, 0.3, Some(0.2))];
        let kpis = vec![krow("a", "x", 0, 10.0), krow("a", "y", 0, 10.0)];
        let s = summarize(&metrics, &kpis).unwrap();
        let (x, y) = (&s.models[0], &s.models[1]);
        assert_eq!((x.mae, x.rmse, x.r2, x.iae, x.total_cost), (y.mae, y.rmse, y.r2, y.iae, y.total_cost));
    }

    #[test]
    fn summarize_three_model_fixture() {
        // hand-computed: a: mae {0.2, 0.6} -> 0.4 ± 0.2; b: {0.5, 0.5} -> 0.5 ± 0; c: {0.1, 0.4} -> 0.25 ± 0.15
        let metrics = vec![
            mrow("s", "a", 0, 0.2, Some(0.1)),
            mrow("s", "a", 1, 0.6, None),
            mrow("s", "b", 0, 0.5, Some(-0.3)),
            mrow("s", "b", 1, 0.5, Some(-0.1)),
            mrow("s", "c", 0, 0.1, Some(0.0)),
            mrow("s", "c", 1, 0.4, Some(0.4)),
        ];
        let kpis = vec![
            krow("s", "a", 0, 100.0),
            krow("s", "a", 1, 50.0),
            krow("s", "b", 0, 20.0),
            krow("s", "b", 1, 30.0),
            krow("s", "c", 0, 70.0),
            krow("s", "c", 1, 90.0),
        ];
        let s = summarize(&metrics, &kpis).unwrap();
        let get = |n: &str| s.models.iter().find(|m| m.model_name == n).unwrap();
        assert_relative_eq!(get("a").mae.mean, 0.4);
        assert_relative_eq!(get("a").mae.std, 0.2, max_relative = 1e-12);
        assert_relative_eq!(get("b").mae.std, 0.0);
        assert_relative_eq!(get("c").mae.mean, 0.25);
        assert_relative_eq!(get("c").mae.std, 0.15, max_relative = 1e-12);
        assert_eq!(get("a").r2.unwrap().n, 1);
        assert_relative_eq!(get("b").r2.unwrap().mean, -0.2);
        assert_relative_eq!(get("c").r2.unwrap().std, 0.2, max_relative = 1e-12);
        assert_eq!(get("a").total_cost, 150.0);
        assert_eq!(s.best["mae"], "c");
        assert_eq!(s.best["total_cost"], "b");
        assert_eq!(s.best["r2"], "c");
        assert_eq!(s.r2_undefined, 1);
        assert_eq!(s.grand_total_cost, 360.0);
        let text = s.to_text();
        assert!(text.contains("0.250 ± 0.150*"));
    }

    #[test]
    fn join_reports_orphans() {
        let metrics = vec![mrow("a", "x", 0, 0.3, None), mrow("a", "x", 1, 0.3, None)];
        let kpis = vec![krow("a", "x", 0, 1.0), krow("a", "x", 2, 1.0)];
        let err = summarize(&metrics, &kpis).unwrap_err().to_string();
        assert!(err.contains("2 orphan"), "{err}");
        assert!(err.contains("metrics-only") && err.contains("kpi-only"));
    }

    #[test]
    fn model_mean_points() {
        let metrics = vec![mrow("s", "a", 0, 0.2, None), mrow("s", "a", 1, 0.6, None), mrow("s", "b", 0, 0.5, None)];
        let kpis = vec![krow("s", "a", 0, 1.0), krow("s", "a", 1, 2.0), krow("s", "b", 0, 4.0)];
        let pts = scenario_points(&metrics, &kpis, Metric::Mae, PointMode::ModelMeans).unwrap();
        assert_eq!(pts["s"], vec![("a".to_string(), 0.4, 3.0), ("b".to_string(), 0.5, 4.0)]);
        let pts = scenario_points(&metrics, &kpis, Metric::R2, PointMode::ModelMeans).unwrap();
        assert!(pts.is_empty());
        let pts = scenario_points(&metrics, &kpis, Metric::Mae, PointMode::PerSeries).unwrap();
        assert_eq!(pts["s"].len(), 3);
    }
}
