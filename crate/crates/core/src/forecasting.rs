//! Classical intermittent-demand forecasters.
//!
//! Croston, SBA, TSB and SES are rate estimators and emit a flat daily value
//! over the horizon. Each method also reports its one-step-ahead in-sample
//! predictions so the inventory policy can size safety stock from residuals.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams<T> {
    /// Size (and Croston interval) smoothing constant.
    pub alpha: T,
    /// TSB demand-probability smoothing constant.
    pub beta: T,
}

impl<T: Scalar> SmoothingParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        let p = Self { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > T::zero() && v <= T::one()) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SmoothingParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.1),
            beta: T::lit(0.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Croston,
    Sba,
    Tsb,
    Ses,
    SeasonalNaive,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Croston, Method::Sba, Method::Tsb, Method::Ses, Method::SeasonalNaive];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Croston => "croston",
            Method::Sba => "sba",
            Method::Tsb => "tsb",
            Method::Ses => "ses",
            Method::SeasonalNaive => "seasonal_naive",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| {
            let known: Vec<_> = Method::ALL.iter().map(|m| m.as_str()).collect();
            Error::invalid(format!("unknown model `{s}` (known: {})", known.join(", ")))
        })
    }
}

/// In-sample one-step-ahead predictions plus the out-of-sample level.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit<T> {
    /// `fitted[i]` predicts `history[fitted_from + i]`.
    pub fitted: Vec<T>,
    pub fitted_from: usize,
    pub level: T,
}

fn non_empty<T>(history: &[T]) -> Result<()> {
    if history.is_empty() {
        Err(Error::invalid("history must contain at least one period"))
    } else {
        Ok(())
    }
}

/// Croston's method: sizes and inter-demand intervals smoothed at demand
/// epochs only, initialised at the first demand with the interval counted
/// from the start of the history.
pub fn croston_fit<T: Scalar>(history: &[T], params: &SmoothingParams<T>) -> Result<Fit<T>> {
    non_empty(history)?;
    params.validate()?;
    let alpha = params.alpha;
    let mut state: Option<(T, T)> = None;
    let mut since = T::zero();
    let mut fitted = Vec::with_capacity(history.len());
    for &y in history {
        fitted.push(state.map_or(T::zero(), |(z, p)| z / p));
        since = since + T::one();
        if y > T::zero() {
            state = Some(match state {
                None => (y, since),
                Some((z, p)) => (z + alpha * (y - z), p + alpha * (since - p)),
            });
            since = T::zero();
        }
    }
    Ok(Fit {
        fitted,
        fitted_from: 0,
        level: state.map_or(T::zero(), |(z, p)| z / p),
    })
}

pub fn croston<T: Scalar>(history: &[T], params: &SmoothingParams<T>) -> Result<T> {
    croston_fit(history, params).map(|f| f.level)
}

/// Syntetos–Boylan approximation: Croston scaled by `1 - α/2`.
pub fn sba_fit<T: Scalar>(history: &[T], params: &SmoothingParams<T>) -> Result<Fit<T>> {
    let factor = T::one() - params.alpha / T::lit(2.0);
    let mut fit = croston_fit(history, params)?;
    fit.fitted.iter_mut().for_each(|v| *v = *v * factor);
    fit.level = fit.level * factor;
    Ok(fit)
}

pub fn sba<T: Scalar>(history: &[T], params: &SmoothingParams<T>) -> Result<T> {
    sba_fit(history, params).map(|f| f.level)
}

/// Teunter–Syntetos–Babai: demand probability smoothed every period, size on
/// demand periods only. Starts from the overall demand frequency and the mean
/// nonzero size.
pub fn tsb_fit<T: Scalar>(history: &[T], params: &SmoothingParams<T>) -> Result<Fit<T>> {
    non_empty(history)?;
    params.validate()?;
    let (alpha, beta) = (params.alpha, params.beta);
    let nonzero: Vec<T> = history.iter().copied().filter(|&y| y > T::zero()).collect();
    if nonzero.is_empty() {
        return Ok(Fit {
            fitted: vec![T::zero(); history.len()],
            fitted_from: 0,
            level: T::zero(),
        });
    }
    let mut prob = T::from_count(nonzero.len()) / T::from_count(history.len());
    let mut size = nonzero.iter().copied().sum::<T>() / T::from_count(nonzero.len());
    let mut fitted = Vec::with_capacity(history.len());
    for &y in history {
        fitted.push(prob * size);
        if y > T::zero() {
            prob = prob + beta * (T::one() - prob);
            size = size + alpha * (y - size);
        } else {
            prob = prob - beta * prob;
        }
    }
    Ok(Fit {
        fitted,
        fitted_from: 0,
        level: prob * size,
    })
}

pub fn tsb<T: Scalar>(history: &[T], params: &SmoothingParams<T>) -> Result<T> {
    tsb_fit(history, params).map(|f| f.level)
}

/// Simple exponential smoothing over every period, level seeded with the
/// first observation.
pub fn ses_fit<T: Scalar>(history: &[T], params: &SmoothingParams<T>) -> Result<Fit<T>> {
    non_empty(history)?;
    params.validate()?;
    let alpha = params.alpha;
    let mut level = history[0];
    let mut fitted = Vec::with_capacity(history.len());
    for &y in history {
        fitted.push(level);
        level = alpha * y + (T::one() - alpha) * level;
    }
    Ok(Fit {
        fitted,
        fitted_from: 0,
        level,
    })
}

pub fn ses<T: Scalar>(history: &[T], params: &SmoothingParams<T>) -> Result<T> {
    ses_fit(history, params).map(|f| f.level)
}

/// Repeats the last `period` observations over the horizon.
pub fn seasonal_naive<T: Scalar>(history: &[T], period: usize, horizon: usize) -> Result<Vec<T>> {
    if period == 0 {
        return Err(Error::invalid("seasonal period must be positive"));
    }
    if history.len() < period {
        return Err(Error::invalid(format!(
            "history of {} periods is shorter than the seasonal period {period}",
            history.len()
        )));
    }
    let last_cycle = &history[history.len() - period..];
    Ok((0..horizon).map(|h| last_cycle[h % period]).collect())
}

/// In-sample predictions of the seasonal naive method, available from the
/// second cycle onward.
pub fn seasonal_naive_fit<T: Scalar>(history: &[T], period: usize) -> Result<Fit<T>> {
    seasonal_naive(history, period, 0)?;
    Ok(Fit {
        fitted: history[..history.len() - period].to_vec(),
        fitted_from: period,
        level: history[history.len() - period..].iter().copied().sum::<T>() / T::from_count(period),
    })
}

/// Settings shared by all native forecasts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForecastConfig {
    pub models: Vec<Method>,
    /// Leading days of each series used for fitting.
    pub train_days: u32,
    /// Trailing days of the training window used to score the tuning grid.
    pub tuning_window_days: u32,
    pub smoothing_grid: Vec<f64>,
    pub seasonal_period_days: u32,
    /// Used when the training window is too short to tune.
    pub default_alpha: f64,
    pub default_beta: f64,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            models: Method::ALL.to_vec(),
            train_days: 730,
            tuning_window_days: 180,
            smoothing_grid: (1..=10).map(|i| i as f64 * 0.05).collect(),
            seasonal_period_days: 365,
            default_alpha: 0.1,
            default_beta: 0.1,
        }
    }
}

impl ForecastConfig {
    pub fn validate(&self) -> Result<()> {
        if self.train_days == 0 {
            return Err(Error::config("forecast.train_days must be positive"));
        }
        if self.seasonal_period_days == 0 {
            return Err(Error::config("forecast.seasonal_period_days must be positive"));
        }
        if self.smoothing_grid.is_empty() {
            return Err(Error::config("forecast.smoothing_grid must not be empty"));
        }
        for &v in self.smoothing_grid.iter().chain([&self.default_alpha, &self.default_beta]) {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::config(format!("smoothing constants must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Result of fitting one method to one training history.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelForecast<T> {
    pub method: Method,
    pub params: Option<SmoothingParams<T>>,
    pub values: Vec<T>,
    pub fit: Fit<T>,
}

fn fit_with<T: Scalar>(method: Method, history: &[T], params: &SmoothingParams<T>) -> Result<Fit<T>> {
    match method {
        Method::Croston => croston_fit(history, params),
        Method::Sba => sba_fit(history, params),
        Method::Tsb => tsb_fit(history, params),
        Method::Ses => ses_fit(history, params),
        Method::SeasonalNaive => Err(Error::invalid("seasonal naive has no smoothing parameters")),
    }
}

fn holdout_mae<T: Scalar>(actual: &[T], level: T) -> T {
    actual.iter().map(|&a| (a - level).abs()).sum::<T>() / T::from_count(actual.len())
}

/// Grid search over smoothing constants minimising MAE of the flat forecast
/// on the trailing tuning window. Ties keep the earliest grid point.
pub fn tune<T: Scalar>(method: Method, history: &[T], config: &ForecastConfig) -> Result<SmoothingParams<T>> {
    non_empty(history)?;
    let fallback = SmoothingParams::new(T::lit(config.default_alpha), T::lit(config.default_beta))?;
    let window = config.tuning_window_days as usize;
    if method == Method::SeasonalNaive || window == 0 || history.len() <= window {
        return Ok(fallback);
    }
    let (fit_part, holdout) = history.split_at(history.len() - window);
    let grid: Vec<T> = config.smoothing_grid.iter().map(|&g| T::lit(g)).collect();
    let betas: &[T] = if method == Method::Tsb { &grid } else { &grid[..1] };
    let mut best: Option<(T, SmoothingParams<T>)> = None;
    for &alpha in &grid {
        for &beta in betas {
            let params = SmoothingParams { alpha, beta };
            let level = fit_with(method, fit_part, &params)?.level;
            let score = holdout_mae(holdout, level);
            if best.as_ref().map_or(true, |(s, _)| score < *s) {
                best = Some((score, params));
            }
        }
    }
    let mut params = best.map(|(_, p)| p).unwrap_or(fallback);
    if method != Method::Tsb {
        params.beta = fallback.beta;
    }
    Ok(params)
}

/// Tunes (where applicable), fits on the full training history and emits
/// `horizon` daily values.
pub fn forecast<T: Scalar>(
    method: Method,
    history: &[T],
    horizon: usize,
    config: &ForecastConfig,
) -> Result<ModelForecast<T>> {
    non_empty(history)?;
    if method == Method::SeasonalNaive {
        let period = config.seasonal_period_days as usize;
        let values = seasonal_naive(history, period, horizon)?;
        return Ok(ModelForecast {
            method,
            params: None,
            values,
            fit: seasonal_naive_fit(history, period)?,
        });
    }
    let params = tune(method, history, config)?;
    let fit = fit_with(method, history, &params)?;
    Ok(ModelForecast {
        method,
        params: Some(params),
        values: vec![fit.level; horizon],
        fit,
    })
}

/// Daily forecast for one (dealer, part type) series.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSeries<T> {
    pub model_name: String,
    pub dealer_id: u32,
    pub part_type: u32,
    pub start_date: NaiveDate,
    pub values: Vec<T>,
}

impl<T: Scalar> ForecastSeries<T> {
    pub fn new(model_name: impl Into<String>, dealer_id: u32, part_type: u32, start_date: NaiveDate, values: Vec<T>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= T::zero())) {
            return Err(Error::invalid(format!("forecast value {v} at index {i} is not a non-negative finite number")));
        }
        Ok(Self {
            model_name: model_name.into(),
            dealer_id,
            part_type,
            start_date,
            values,
        })
    }

    pub fn key(&self) -> (u32, u32) {
        (self.dealer_id, self.part_type)
    }

    pub fn mean(&self) -> T {
        if self.values.is_empty() {
            T::zero()
        } else {
            self.values.iter().copied().sum::<T>() / T::from_count(self.values.len())
        }
    }
}
