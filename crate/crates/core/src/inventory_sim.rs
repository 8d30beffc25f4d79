//! Discrete-event simulation of a single part at a single dealer under a
//! periodic-review order-up-to policy with lost sales and rush replenishment.
//!
//! Same-day events are processed in the order delivery, demand, inventory
//! check, so deliveries can serve same-day demand and reviews see the
//! end-of-day position.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyParams {
    pub review_period_days: u32,
    pub lead_time_days: u32,
    pub rush_lead_time_days: u32,
    /// Safety factor applied to the residual standard deviation.
    pub service_z: f64,
    /// Defaults to `ceil(μ (L + R))` when absent.
    pub initial_stock: Option<u64>,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            review_period_days: 7,
            lead_time_days: 14,
            rush_lead_time_days: 2,
            service_z: 1.645,
            initial_stock: None,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<()> {
        if self.review_period_days == 0 {
            return Err(Error::config("policy.review_period_days must be at least 1"));
        }
        if !self.service_z.is_finite() {
            return Err(Error::config("policy.service_z must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostParams {
    pub holding_per_unit_day: f64,
    pub order_fixed: f64,
    pub rush_order_fixed_premium: f64,
    pub transport_per_unit: f64,
    pub badwill_per_unit: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            holding_per_unit_day: 0.1,
            order_fixed: 50.0,
            rush_order_fixed_premium: 200.0,
            transport_per_unit: 5.0,
            badwill_per_unit: 500.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("holding_per_unit_day", self.holding_per_unit_day),
            ("order_fixed", self.order_fixed),
            ("rush_order_fixed_premium", self.rush_order_fixed_premium),
            ("transport_per_unit", self.transport_per_unit),
            ("badwill_per_unit", self.badwill_per_unit),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("costs.{name} must be a non-negative number, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyLevels {
    pub safety_stock: u64,
    pub reorder_point: u64,
    pub order_up_to: u64,
}

/// Rounds up, treating values within 1e-9 of an integer as that integer.
fn ceil_units(x: f64) -> u64 {
    (x - 1e-9).ceil().max(0.0) as u64
}

/// Safety stock `z σ √(L+R)`, order-up-to level `μ (L+R) + SS` and reorder
/// point `μ L + SS`, with μ the mean daily forecast. All rounded up.
pub fn compute_policy(forecast: &[f64], residual_sigma: f64, params: &PolicyParams) -> Result<PolicyLevels> {
    params.validate()?;
    if forecast.is_empty() {
        return Err(Error::invalid("policy needs a non-empty forecast window"));
    }
    if !(residual_sigma.is_finite() && residual_sigma >= 0.0) {
        return Err(Error::invalid(format!("residual sigma must be non-negative, got {residual_sigma}")));
    }
    let mu = forecast.iter().sum::<f64>() / forecast.len() as f64;
    let lead = params.lead_time_days as f64;
    let cover = lead + params.review_period_days as f64;
    let safety_stock = ceil_units(params.service_z * residual_sigma * cover.sqrt());
    Ok(PolicyLevels {
        safety_stock,
        reorder_point: ceil_units(mu * lead + safety_stock as f64),
        order_up_to: ceil_units(mu * cover + safety_stock as f64),
    })
}

/// Population standard deviation of `actual - fitted`.
pub fn residual_sigma_from(actual: &[f64], fitted: &[f64]) -> Result<f64> {
    if actual.len() != fitted.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} actual vs {} fitted values",
            actual.len(),
            fitted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::invalid("residual sigma of an empty window"));
    }
    let n = actual.len() as f64;
    let residuals: Vec<f64> = actual.iter().zip(fitted).map(|(a, f)| a - f).collect();
    let mean = residuals.iter().sum::<f64>() / n;
    let var = residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    Ok(var.sqrt())
}

/// Levels plus the operational parameters a simulation run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InventoryPolicy {
    pub levels: PolicyLevels,
    pub review_period_days: u32,
    pub lead_time_days: u32,
    pub rush_lead_time_days: u32,
    pub initial_stock: u64,
}

impl InventoryPolicy {
    pub fn from_forecast(forecast: &[f64], residual_sigma: f64, params: &PolicyParams) -> Result<Self> {
        let levels = compute_policy(forecast, residual_sigma, params)?;
        let initial_stock = params.initial_stock.unwrap_or_else(|| {
            let mu = forecast.iter().sum::<f64>() / forecast.len() as f64;
            ceil_units(mu * (params.lead_time_days + params.review_period_days) as f64)
        });
        Ok(Self {
            levels,
            review_period_days: params.review_period_days,
            lead_time_days: params.lead_time_days,
            rush_lead_time_days: params.rush_lead_time_days,
            initial_stock,
        })
    }

    /// Policy that never places regular orders.
    pub fn no_reorder(initial_stock: u64, params: &PolicyParams) -> Self {
        Self {
            levels: PolicyLevels {
                safety_stock: 0,
                reorder_point: 0,
                order_up_to: 0,
            },
            review_period_days: params.review_period_days,
            lead_time_days: params.lead_time_days,
            rush_lead_time_days: params.rush_lead_time_days,
            initial_stock,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    Delivery { quantity: u64, rush: bool },
    Demand { quantity: u64 },
    InventoryCheck,
}

impl EventKind {
    fn priority(&self) -> u8 {
        match self {
            EventKind::Delivery { .. } => 0,
            EventKind::Demand { .. } => 1,
            EventKind::InventoryCheck => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub time: u32,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InventoryState {
    pub on_hand: u64,
    pub on_order: u64,
    pub filled: u64,
    pub lost: u64,
    pub delivered: u64,
    pub holding_unit_days: u64,
    pub orders: u64,
    pub rush_orders: u64,
}

impl InventoryState {
    pub fn position(&self) -> u64 {
        self.on_hand + self.on_order
    }

    pub fn total_demand(&self) -> u64 {
        self.filled + self.lost
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub total_cost: f64,
    pub holding_cost: f64,
    pub order_cost: f64,
    pub rush_cost: f64,
    pub transport_cost: f64,
    pub badwill_cost: f64,
    /// Fill rate; 1 when nothing was demanded.
    pub service_level: f64,
    pub order_count: u64,
    pub rush_order_count: u64,
    pub initial_stock: u64,
    pub delivered_units: u64,
    pub filled_units: u64,
    pub lost_units: u64,
    pub final_on_hand: u64,
}

struct Queue {
    heap: BinaryHeap<Reverse<(u32, u8, u64, EventKind)>>,
    seq: u64,
    horizon: u32,
}

impl Queue {
    fn push(&mut self, time: u32, kind: EventKind) {
        if time < self.horizon {
            self.heap.push(Reverse((time, kind.priority(), self.seq, kind)));
            self.seq += 1;
        }
    }

    fn pop(&mut self) -> Option<Event> {
        self.heap.pop().map(|Reverse((time, _, _, kind))| Event { time, kind })
    }
}

/// Simulates the window covered by `demand` and returns cost and service KPIs.
/// The forecast must cover the same window; it only enters through `policy`.
pub fn run_des(demand: &[u32], forecast: &[f64], policy: &InventoryPolicy, costs: &CostParams) -> Result<KpiReport> {
    if demand.len() != forecast.len() {
        return Err(Error::invalid(format!(
            "demand window of {} days does not match forecast window of {} days",
            demand.len(),
            forecast.len()
        )));
    }
    costs.validate()?;
    if policy.review_period_days == 0 {
        return Err(Error::invalid("review period must be at least 1 day"));
    }
    let horizon = demand.len() as u32;
    let mut queue = Queue {
        heap: BinaryHeap::new(),
        seq: 0,
        horizon,
    };
    for (day, &q) in demand.iter().enumerate() {
        if q > 0 {
            queue.push(day as u32, EventKind::Demand { quantity: q as u64 });
        }
    }
    let mut day = 0;
    while day < horizon {
        queue.push(day, EventKind::InventoryCheck);
        day += policy.review_period_days;
    }

    let mut state = InventoryState {
        on_hand: policy.initial_stock,
        ..InventoryState::default()
    };
    let mut clock = 0u32;
    while let Some(event) = queue.pop() {
        if event.time > clock {
            state.holding_unit_days += state.on_hand * (event.time - clock) as u64;
            clock = event.time;
        }
        match event.kind {
            EventKind::Delivery { quantity, .. } => {
                state.on_hand += quantity;
                state.on_order -= quantity;
                state.delivered += quantity;
            }
            EventKind::Demand { quantity } => {
                let filled = quantity.min(state.on_hand);
                let short = quantity - filled;
                state.on_hand -= filled;
                state.filled += filled;
                if short > 0 {
                    state.lost += short;
                    state.rush_orders += 1;
                    state.on_order += short;
                    queue.push(
                        event.time.saturating_add(policy.rush_lead_time_days),
                        EventKind::Delivery { quantity: short, rush: true },
                    );
                }
            }
            EventKind::InventoryCheck => {
                let position = state.position();
                if position < policy.levels.order_up_to {
                    let quantity = policy.levels.order_up_to - position;
                    state.orders += 1;
                    state.on_order += quantity;
                    queue.push(
                        event.time.saturating_add(policy.lead_time_days),
                        EventKind::Delivery { quantity, rush: false },
                    );
                }
            }
        }
    }
    state.holding_unit_days += state.on_hand * (horizon - clock) as u64;

    Ok(report(&state, policy.initial_stock, costs))
}

fn report(state: &InventoryState, initial_stock: u64, costs: &CostParams) -> KpiReport {
    let holding_cost = costs.holding_per_unit_day * state.holding_unit_days as f64;
    let order_cost = costs.order_fixed * state.orders as f64;
    let rush_cost = costs.rush_order_fixed_premium * state.rush_orders as f64;
    let transport_cost = costs.transport_per_unit * state.delivered as f64;
    let badwill_cost = costs.badwill_per_unit * state.lost as f64;
    let total_demand = state.total_demand();
    KpiReport {
        total_cost: holding_cost + order_cost + rush_cost + transport_cost + badwill_cost,
        holding_cost,
        order_cost,
        rush_cost,
        transport_cost,
        badwill_cost,
        service_level: if total_demand == 0 {
            1.0
        } else {
            state.filled as f64 / total_demand as f64
        },
        order_count: state.orders,
        rush_order_count: state.rush_orders,
        initial_stock,
        delivered_units: state.delivered,
        filled_units: state.filled,
        lost_units: state.lost,
        final_on_hand: state.on_hand,
    }
}
