//! Parametric hazard models for part lifetimes.
//!
//! Every family is parameterised by a scale `λ` and a shape `k`:
//!
//! | family       | hazard `h(t)`                      | cumulative `H(t)`     |
//! |--------------|------------------------------------|-----------------------|
//! | Exponential  | `λ`                                | `λ t`                 |
//! | Weibull      | `(k/λ) (t/λ)^(k-1)`                | `(t/λ)^k`             |
//! | LogLogistic  | `k λ^k t^(k-1) / (1 + (λ t)^k)`    | `ln(1 + (λ t)^k)`     |
//! | Gompertz     | `k λ e^(λ t)`                      | `k (e^(λ t) - 1)`     |
//!
//! Weibull `λ` is measured in days, the other scales in 1/day.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Exponential,
    Weibull,
    LogLogistic,
    Gompertz,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Exponential,
        Family::Weibull,
        Family::LogLogistic,
        Family::Gompertz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Weibull => "weibull",
            Family::LogLogistic => "log_logistic",
            Family::Gompertz => "gompertz",
        }
    }

    pub fn has_shape(self) -> bool {
        self != Family::Exponential
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown survival family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardModel<T> {
    pub family: Family,
    pub scale: T,
    pub shape: T,
}

fn check_finite<T: Scalar>(what: &str, x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be finite, got {x}")))
    }
}

impl<T: Scalar> HazardModel<T> {
    /// Builds a model, validating `scale > 0` and `shape > 0`. The shape of an
    /// exponential model is forced to 1.
    pub fn new(family: Family, scale: T, shape: T) -> Result<Self> {
        check_finite("scale", scale)?;
        check_finite("shape", shape)?;
        if scale <= T::zero() {
            return Err(Error::invalid(format!("scale must be positive, got {scale}")));
        }
        let shape = if family.has_shape() { shape } else { T::one() };
        if shape <= T::zero() {
            return Err(Error::invalid(format!("shape must be positive, got {shape}")));
        }
        Ok(Self {
            family,
            scale,
            shape,
        })
    }

    pub fn exponential(rate: T) -> Result<Self> {
        Self::new(Family::Exponential, rate, T::one())
    }

    /// Model whose median lifetime is `median`.
    pub fn from_median(family: Family, median: T, shape: T) -> Result<Self> {
        let scale = scale_from_median(family, median, shape)?;
        Self::new(family, scale, shape)
    }

    /// Instantaneous failure rate at age `t`. At `t = 0` the right limit is
    /// returned, which is `+inf` for shapes below one in the Weibull and
    /// log-logistic families.
    pub fn hazard_rate(&self, t: T) -> Result<T> {
        check_finite("age", t)?;
        if t < T::zero() {
            return Err(Error::invalid(format!("age must be non-negative, got {t}")));
        }
        let (lambda, k) = (self.scale, self.shape);
        let h = match self.family {
            Family::Exponential => lambda,
            Family::Weibull => (k / lambda) * (t / lambda).powf(k - T::one()),
            Family::LogLogistic => {
                let lt = lambda * t;
                k * lambda.powf(k) * t.powf(k - T::one()) / (T::one() + lt.powf(k))
            }
            Family::Gompertz => k * lambda * (lambda * t).exp(),
        };
        Ok(h)
    }

    /// Cumulative hazard `H(t)` from age zero.
    pub fn cumulative_hazard(&self, t: T) -> Result<T> {
        self.cumulative_hazard_increment(T::zero(), t)
    }

    /// `∫_{t0}^{t1} h(u) du` in closed form.
    pub fn cumulative_hazard_increment(&self, t0: T, t1: T) -> Result<T> {
        check_finite("t0", t0)?;
        check_finite("t1", t1)?;
        if t0 < T::zero() {
            return Err(Error::invalid(format!("t0 must be non-negative, got {t0}")));
        }
        if t1 < t0 {
            return Err(Error::invalid(format!("t1 ({t1}) precedes t0 ({t0})")));
        }
        let (lambda, k) = (self.scale, self.shape);
        let inc = match self.family {
            Family::Exponential => lambda * (t1 - t0),
            Family::Weibull => (t1 / lambda).powf(k) - (t0 / lambda).powf(k),
            Family::LogLogistic => {
                let a = (lambda * t0).powf(k);
                let b = (lambda * t1).powf(k);
                ((b - a) / (T::one() + a)).ln_1p()
            }
            // k e^{λ t0} (e^{λ (t1 - t0)} - 1), written to avoid cancellation
            Family::Gompertz => k * (lambda * t0).exp() * (lambda * (t1 - t0)).exp_m1(),
        };
        Ok(inc.max(T::zero()))
    }

    /// Probability that a part of age `age` fails within the next `dt` days,
    /// with its hazard scaled by `multiplier` over the interval.
    pub fn conditional_failure_prob(&self, age: T, dt: T, multiplier: T) -> Result<T> {
        check_finite("dt", dt)?;
        check_finite("multiplier", multiplier)?;
        if dt < T::zero() {
            return Err(Error::invalid(format!("dt must be non-negative, got {dt}")));
        }
        if multiplier < T::zero() {
            return Err(Error::invalid(format!(
                "hazard multiplier must be non-negative, got {multiplier}"
            )));
        }
        let inc = self.cumulative_hazard_increment(age, age + dt)?;
        let p = -(-(multiplier * inc)).exp_m1();
        Ok(p.max(T::zero()).min(T::one()))
    }

    /// Age at which the cumulative failure probability reaches one half.
    pub fn median(&self) -> T {
        let ln2 = T::LN_2();
        let (lambda, k) = (self.scale, self.shape);
        match self.family {
            Family::Exponential => ln2 / lambda,
            Family::Weibull => lambda * ln2.powf(k.recip()),
            Family::LogLogistic => lambda.recip(),
            Family::Gompertz => (ln2 / k).ln_1p() / lambda,
        }
    }
}

/// Inverts the median formula of `family` to obtain the scale parameter.
pub fn scale_from_median<T: Scalar>(family: Family, median: T, shape: T) -> Result<T> {
    check_finite("median", median)?;
    check_finite("shape", shape)?;
    if median <= T::zero() {
        return Err(Error::invalid(format!("median must be positive, got {median}")));
    }
    if family.has_shape() && shape <= T::zero() {
        return Err(Error::invalid(format!("shape must be positive, got {shape}")));
    }
    let ln2 = T::LN_2();
    let scale = match family {
        Family::Exponential => ln2 / median,
        Family::Weibull => median / ln2.powf(shape.recip()),
        // S(t) = 1 / (1 + (λt)^k) equals 1/2 exactly at t = 1/λ for every k.
        Family::LogLogistic => median.recip(),
        Family::Gompertz => (ln2 / shape).ln_1p() / median,
    };
    Ok(scale)
}

/// Closed interval `[lo, hi]` of positive reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        let iv = Self { lo, hi };
        iv.validate("interval")?;
        Ok(iv)
    }

    pub fn point(x: T) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo <= T::zero() {
            return Err(Error::config(format!(
                "{what}: bounds must be finite and positive, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.lo > self.hi {
            return Err(Error::config(format!(
                "{what}: lower bound {} exceeds upper bound {}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        if self.lo == self.hi {
            return self.lo;
        }
        let u = T::lit(rng.gen::<f64>());
        self.lo + u * (self.hi - self.lo)
    }
}

/// Median lifetime range plus the shape range used when drawing a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianSpec<T> {
    pub median: Interval<T>,
    pub shape: Interval<T>,
}

impl<T: Scalar> MedianSpec<T> {
    pub fn validate(&self) -> Result<()> {
        self.median.validate("median range")?;
        self.shape.validate("shape range")
    }
}

/// Draws a model of the given family: shape first (shaped families only),
/// then a median, then the scale that realises that median.
pub fn draw_model<T: Scalar, R: Rng + ?Sized>(
    family: Family,
    spec: &MedianSpec<T>,
    rng: &mut R,
) -> Result<HazardModel<T>> {
    spec.validate()?;
    let shape = if family.has_shape() {
        spec.shape.sample(rng)
    } else {
        T::one()
    };
    let median = spec.median.sample(rng);
    HazardModel::from_median(family, median, shape)
}

/// Default shape ranges per family.
pub fn default_shape_range(family: Family) -> Interval<f64> {
    match family {
        Family::Exponential => Interval::point(1.0),
        Family::Weibull => Interval { lo: 0.8, hi: 3.0 },
        Family::LogLogistic => Interval { lo: 1.2, hi: 3.0 },
        Family::Gompertz => Interval {
            lo: 0.001,
            hi: 0.1,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Usage {
    Normal,
    Hard,
}

impl Usage {
    pub fn as_str(self) -> &'static str {
        match self {
            Usage::Normal => "normal",
            Usage::Hard => "hard",
        }
    }
}

/// Hazard scaling applied for each usage style.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UsageModifier<T> {
    pub hard_multiplier: T,
}

impl<T: Scalar> Default for UsageModifier<T> {
    fn default() -> Self {
        Self {
            hard_multiplier: T::lit(1.5),
        }
    }
}

impl<T: Scalar> UsageModifier<T> {
    pub fn new(hard_multiplier: T) -> Result<Self> {
        if !hard_multiplier.is_finite() || hard_multiplier < T::one() {
            return Err(Error::config(format!(
                "hard usage multiplier must be >= 1, got {hard_multiplier}"
            )));
        }
        Ok(Self { hard_multiplier })
    }

    pub fn multiplier(&self, usage: Usage) -> T {
        match usage {
            Usage::Normal => T::one(),
            Usage::Hard => self.hard_multiplier,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hazard_examples() {
        let m = HazardModel::exponential(0.01).unwrap();
        assert_eq!(m.hazard_rate(50.0).unwrap(), 0.01);

        let m = HazardModel::new(Family::Weibull, 100.0, 1.0).unwrap();
        assert_relative_eq!(m.hazard_rate(73.0).unwrap(), 0.01, max_relative = 1e-15);

        let m = HazardModel::new(Family::Gompertz, 0.005, 0.002).unwrap();
        let expected = 0.002 * 0.005 * 1f64.exp();
        assert_relative_eq!(m.hazard_rate(200.0).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 2.718e-5, max_relative = 1e-3);
    }

    #[test]
    fn hazard_right_limits_at_zero() {
        let ll = HazardModel::new(Family::LogLogistic, 0.01, 2.0).unwrap();
        assert_eq!(ll.hazard_rate(0.0).unwrap(), 0.0);
        let g = HazardModel::new(Family::Gompertz, 0.01, 0.5).unwrap();
        assert_relative_eq!(g.hazard_rate(0.0).unwrap(), 0.005);
        let w = HazardModel::<f64>::new(Family::Weibull, 10.0, 0.8).unwrap();
        assert!(w.hazard_rate(0.0).unwrap().is_infinite());
    }

    #[test]
    fn invalid_inputs_rejected() {
        let m = HazardModel::exponential(0.1).unwrap();
        assert!(m.hazard_rate(f64::NAN).is_err());
        assert!(m.hazard_rate(-1.0).is_err());
        assert!(m.cumulative_hazard_increment(2.0, 1.0).is_err());
        assert!(HazardModel::new(Family::Weibull, 0.0, 1.0).is_err());
        assert!(HazardModel::new(Family::Weibull, 1.0, f64::INFINITY).is_err());
        assert!(scale_from_median(Family::Exponential, -3.0, 1.0).is_err());
    }

    #[test]
    fn cumulative_examples() {
        let m = HazardModel::exponential(0.1).unwrap();
        assert_relative_eq!(m.cumulative_hazard_increment(0.0, 10.0).unwrap(), 1.0);

        let m = HazardModel::new(Family::Weibull, 100.0, 2.0).unwrap();
        assert_relative_eq!(
            m.cumulative_hazard_increment(100.0, 101.0).unwrap(),
            0.0201,
            max_relative = 1e-12
        );

        let m = HazardModel::new(Family::LogLogistic, 0.01, 2.0).unwrap();
        assert_relative_eq!(
            m.cumulative_hazard_increment(0.0, 100.0).unwrap(),
            std::f64::consts::LN_2,
            max_relative = 1e-14
        );
        assert_relative_eq!(m.median(), 100.0);
    }

    #[test]
    fn conditional_probability_examples() {
        let m = HazardModel::exponential(std::f64::consts::LN_2).unwrap();
        assert_relative_eq!(m.conditional_failure_prob(0.0, 1.0, 1.0).unwrap(), 0.5);
        assert_relative_eq!(m.conditional_failure_prob(500.0, 1.0, 1.0).unwrap(), 0.5);
        assert!(m.conditional_failure_prob(3.0, 1e-12, 1.0).unwrap() < 1e-11);
        assert_eq!(m.conditional_failure_prob(3.0, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn median_inversion_examples() {
        assert_relative_eq!(
            scale_from_median(Family::Exponential, 100.0, 1.0).unwrap(),
            0.0069315,
            max_relative = 1e-5
        );
        let w = HazardModel::from_median(Family::Weibull, 100.0, 1.0).unwrap();
        assert_relative_eq!(w.scale, 100.0 / std::f64::consts::LN_2, max_relative = 1e-14);
        assert_relative_eq!(w.hazard_rate(17.0).unwrap(), std::f64::consts::LN_2 / 100.0, max_relative = 1e-14);
        assert_relative_eq!(
            scale_from_median(Family::Gompertz, 100.0, 1.0).unwrap(),
            0.005265890341390444,
            max_relative = 1e-14
        );
        for fam in Family::ALL {
            let shape = default_shape_range(fam).hi;
            let m = HazardModel::from_median(fam, 237.0, shape).unwrap();
            assert_relative_eq!(m.median(), 237.0, max_relative = 1e-12);
            assert_relative_eq!(
                m.cumulative_hazard(237.0).unwrap(),
                std::f64::consts::LN_2,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn draw_model_respects_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let point = MedianSpec {
            median: Interval::point(100.0),
            shape: Interval::point(1.0),
        };
        for _ in 0..10 {
            let m = draw_model(Family::Exponential, &point, &mut rng).unwrap();
            assert_relative_eq!(m.scale, std::f64::consts::LN_2 / 100.0);
        }

        let spec = MedianSpec {
            median: Interval::new(100.0, 150.0).unwrap(),
            shape: default_shape_range(Family::Weibull),
        };
        let mut sum = 0.0;
        let n = 10_000;
        for _ in 0..n {
            let m = draw_model(Family::Weibull, &spec, &mut rng).unwrap();
            let tm = m.median();
            assert!((100.0 - 1e-9..=150.0 + 1e-9).contains(&tm));
            assert!(spec.shape.contains(m.shape));
            sum += tm;
        }
        // uniform mean 125, sd of mean 50/sqrt(12 n) ≈ 0.144
        assert!((sum / n as f64 - 125.0).abs() < 1.5);
    }

    #[test]
    fn weibull_shape_one_matches_exponential() {
        let w = HazardModel::from_median(Family::Weibull, 80.0, 1.0).unwrap();
        let e = HazardModel::from_median(Family::Exponential, 80.0, 1.0).unwrap();
        for &(tp, dt) in &[(0.0, 1.0), (10.0, 0.5), (1000.0, 3.0)] {
            assert_relative_eq!(
                w.conditional_failure_prob(tp, dt, 1.0).unwrap(),
                e.conditional_failure_prob(tp, dt, 1.0).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn usage_multipliers() {
        let u = UsageModifier::<f64>::default();
        assert_eq!(u.multiplier(Usage::Normal), 1.0);
        assert_eq!(u.multiplier(Usage::Hard), 1.5);
        assert!(UsageModifier::new(0.5).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let m = HazardModel::<f32>::from_median(Family::Weibull, 100.0, 2.0).unwrap();
        let p = m.conditional_failure_prob(50.0, 1.0, 1.0).unwrap();
        assert!(p > 0.0 && p < 1.0);
        assert!((m.median() - 100.0).abs() < 1e-3);
    }
}
