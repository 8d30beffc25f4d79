//! Forecast accuracy metrics and demand-pattern characterisation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

fn check_pair<T>(actual: &[T], forecast: &[T]) -> Result<()> {
    if actual.len() != forecast.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} actual vs {} forecast values",
            actual.len(),
            forecast.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::invalid("metrics need at least one observation"));
    }
    Ok(())
}

pub fn mae<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<T> {
    check_pair(actual, forecast)?;
    let sum: T = actual.iter().zip(forecast).map(|(&a, &f)| (a - f).abs()).sum();
    Ok(sum / T::from_count(actual.len()))
}

pub fn rmse<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<T> {
    check_pair(actual, forecast)?;
    let sum: T = actual.iter().zip(forecast).map(|(&a, &f)| (a - f) * (a - f)).sum();
    Ok((sum / T::from_count(actual.len())).sqrt())
}

/// Coefficient of determination `1 - SSE/SST`. `None` when the actuals are
/// constant.
pub fn r2<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<Option<T>> {
    check_pair(actual, forecast)?;
    let mean = actual.iter().copied().sum::<T>() / T::from_count(actual.len());
    let sst: T = actual.iter().map(|&a| (a - mean) * (a - mean)).sum();
    if sst == T::zero() {
        return Ok(None);
    }
    let sse: T = actual.iter().zip(forecast).map(|(&a, &f)| (a - f) * (a - f)).sum();
    Ok(Some(T::one() - sse / sst))
}

/// Intermittent accuracy error, measured on cumulative demand trajectories:
/// `Σ |F_cum(d) - A_cum(d)| / Σ max(A_cum(d), 1)`.
///
/// Zero iff the cumulative forecast tracks cumulative demand exactly.
pub fn iae<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<T> {
    check_pair(actual, forecast)?;
    let (mut cum_a, mut cum_f) = (T::zero(), T::zero());
    let (mut num, mut den) = (T::zero(), T::zero());
    for (&a, &f) in actual.iter().zip(forecast) {
        cum_a = cum_a + a;
        cum_f = cum_f + f;
        num = num + (cum_f - cum_a).abs();
        den = den + cum_a.max(T::one());
    }
    Ok(num / den)
}

/// Average demand interval. The first interval runs from the series start to
/// the first demand, counted inclusively. `None` without any demand.
pub fn adi<T: Scalar>(series: &[T]) -> Result<Option<T>> {
    if series.is_empty() {
        return Err(Error::invalid("ADI of an empty series"));
    }
    let mut count = 0usize;
    let mut last = 0usize;
    for (i, &y) in series.iter().enumerate() {
        if y > T::zero() {
            count += 1;
            last = i + 1;
        }
    }
    Ok((count > 0).then(|| T::from_count(last) / T::from_count(count)))
}

/// Squared coefficient of variation of nonzero demand sizes (population
/// variance). Zero when fewer than two demands occurred.
pub fn cv2<T: Scalar>(series: &[T]) -> Result<T> {
    if series.is_empty() {
        return Err(Error::invalid("CV² of an empty series"));
    }
    let sizes: Vec<T> = series.iter().copied().filter(|&y| y > T::zero()).collect();
    if sizes.len() < 2 {
        return Ok(T::zero());
    }
    let n = T::from_count(sizes.len());
    let mean = sizes.iter().copied().sum::<T>() / n;
    let var = sizes.iter().map(|&s| (s - mean) * (s - mean)).sum::<T>() / n;
    Ok(var / (mean * mean))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternClass {
    Smooth,
    Intermittent,
    Erratic,
    Lumpy,
}

impl PatternClass {
    pub const ALL: [PatternClass; 4] = [
        PatternClass::Smooth,
        PatternClass::Intermittent,
        PatternClass::Erratic,
        PatternClass::Lumpy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternClass::Smooth => "smooth",
            PatternClass::Intermittent => "intermittent",
            PatternClass::Erratic => "erratic",
            PatternClass::Lumpy => "lumpy",
        }
    }

    /// True for the two high-ADI quadrants.
    pub fn is_sporadic(self) -> bool {
        matches!(self, PatternClass::Intermittent | PatternClass::Lumpy)
    }
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PatternClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown pattern class `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassThresholds<T> {
    pub adi: T,
    pub cv2: T,
}

impl<T: Scalar> Default for ClassThresholds<T> {
    fn default() -> Self {
        Self {
            adi: T::lit(1.32),
            cv2: T::lit(0.49),
        }
    }
}

pub fn classify_pattern<T: Scalar>(adi: T, cv2: T, thresholds: &ClassThresholds<T>) -> PatternClass {
    match (adi >= thresholds.adi, cv2 >= thresholds.cv2) {
        (true, false) => PatternClass::Intermittent,
        (true, true) => PatternClass::Lumpy,
        (false, false) => PatternClass::Smooth,
        (false, true) => PatternClass::Erratic,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyReport<T> {
    pub mae: T,
    pub rmse: T,
    pub r2: Option<T>,
    pub iae: T,
}

impl<T: Scalar> AccuracyReport<T> {
    pub fn compute(actual: &[T], forecast: &[T]) -> Result<Self> {
        Ok(Self {
            mae: mae(actual, forecast)?,
            rmse: rmse(actual, forecast)?,
            r2: r2(actual, forecast)?,
            iae: iae(actual, forecast)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternReport<T> {
    /// `None` for a series without demand.
    pub adi: Option<T>,
    pub cv2: T,
    pub class: Option<PatternClass>,
}

impl<T: Scalar> PatternReport<T> {
    pub fn compute(series: &[T], thresholds: &ClassThresholds<T>) -> Result<Self> {
        let adi = adi(series)?;
        let cv2 = cv2(series)?;
        Ok(Self {
            adi,
            cv2,
            class: adi.map(|a| classify_pattern(a, cv2, thresholds)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn perfect_forecast() {
        let a = [0.0, 2.0, 1.0, 0.0, 5.0];
        assert_eq!(mae(&a, &a).unwrap(), 0.0);
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        assert_eq!(r2(&a, &a).unwrap(), Some(1.0));
        assert_eq!(iae(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_pair() {
        let (a, f) = ([0.0, 2.0], [1.0, 1.0]);
        assert_eq!(mae(&a, &f).unwrap(), 1.0);
        assert_eq!(rmse(&a, &f).unwrap(), 1.0);
        assert_eq!(r2(&a, &f).unwrap(), Some(0.0));
    }

    #[test]
    fn mean_forecast_has_zero_r2() {
        let a = [1.0, 4.0, 0.0, 3.0];
        let f = [2.0; 4];
        assert_relative_eq!(r2(&a, &f).unwrap().unwrap(), 0.0);
        assert_eq!(r2(&[3.0; 4], &f).unwrap(), None);
    }

    #[test]
    fn iae_examples() {
        assert_eq!(iae(&[0.0; 5], &[0.0; 5]).unwrap(), 0.0);
        assert_relative_eq!(iae(&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse::<f64>(&[], &[]).is_err());
        assert!(iae(&[1.0, 2.0], &[1.0]).is_err());
        assert!(r2(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn adi_examples() {
        assert_eq!(adi(&[1.0; 10]).unwrap(), Some(1.0));
        let third: Vec<f64> = (1..=30).map(|d| if d % 3 == 0 { 2.0 } else { 0.0 }).collect();
        assert_eq!(adi(&third).unwrap(), Some(3.0));
        assert_eq!(adi(&[0.0; 4]).unwrap(), None);
        assert!(adi::<f64>(&[]).is_err());
    }

    #[test]
    fn cv2_examples() {
        assert_eq!(cv2(&[0.0, 3.0, 0.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(cv2(&[0.0, 7.0, 0.0]).unwrap(), 0.0);
        // sizes 1 and 3: mean 2, population variance 1
        assert_relative_eq!(cv2(&[1.0, 0.0, 3.0]).unwrap(), 0.25);
    }

    #[test]
    fn classification_quadrants() {
        let t = ClassThresholds::default();
        assert_eq!(classify_pattern(2.0, 0.2, &t), PatternClass::Intermittent);
        assert_eq!(classify_pattern(1.0, 0.0, &t), PatternClass::Smooth);
        assert_eq!(classify_pattern(2.0, 1.0, &t), PatternClass::Lumpy);
        assert_eq!(classify_pattern(1.1, 0.6, &t), PatternClass::Erratic);
        assert_eq!(classify_pattern(1.32, 0.49, &t), PatternClass::Lumpy);
    }

    #[test]
    fn single_precision() {
        let a = [0.0f32, 2.0];
        let f = [1.0f32, 1.0];
        assert_eq!(mae(&a, &f).unwrap(), 1.0f32);
        assert_eq!(adi(&[0.0f32, 0.0, 1.0]).unwrap(), Some(3.0f32));
    }
}
