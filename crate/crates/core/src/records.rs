//! Row types of the tabular outputs. Field order is the CSV column order.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::metrics::PatternClass;

/// `demand_series.csv`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandRow {
    pub date: NaiveDate,
    pub dealer_id: u32,
    pub part_type: u32,
    pub count: u32,
}

/// `forecast.csv`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub model_name: String,
    pub dealer_id: u32,
    pub part_type: u32,
    pub date: NaiveDate,
    pub value: f64,
}

/// `forecast_sigma.csv`: training-window residual spread per model and series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub model_name: String,
    pub dealer_id: u32,
    pub part_type: u32,
    pub residual_sigma: f64,
}

/// `metrics.csv`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario_id: String,
    pub model_name: String,
    pub dealer_id: u32,
    pub part_type: u32,
    pub mae: f64,
    pub rmse: f64,
    pub r2: Option<f64>,
    pub iae: f64,
    pub adi: Option<f64>,
    pub cv2: f64,
    pub class: Option<PatternClass>,
}

/// `kpi.csv`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiRow {
    pub scenario_id: String,
    pub model_name: String,
    pub dealer_id: u32,
    pub part_type: u32,
    pub total_cost: f64,
    pub holding_cost: f64,
    pub order_cost: f64,
    pub rush_cost: f64,
    pub transport_cost: f64,
    pub badwill_cost: f64,
    pub service_level: f64,
    pub order_count: u64,
    pub rush_order_count: u64,
}

pub type RowKey = (String, String, u32, u32);

impl MetricsRow {
    pub fn key(&self) -> RowKey {
        (self.scenario_id.clone(), self.model_name.clone(), self.dealer_id, self.part_type)
    }
}

impl KpiRow {
    pub fn key(&self) -> RowKey {
        (self.scenario_id.clone(), self.model_name.clone(), self.dealer_id, self.part_type)
    }
}
