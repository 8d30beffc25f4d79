//! Periodic seasonal hazard multiplier built from radial basis functions on
//! the day-of-year circle.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

pub const DEFAULT_YEAR_LENGTH: u32 = 365;

/// Lowest admissible value of `w` anywhere on the year.
pub const POSITIVITY_FLOOR: f64 = 0.05;

/// Width used for the constant baseline basis.
pub const FLAT_WIDTH: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Southern,
    Northern,
}

impl Region {
    pub const ALL: [Region; 2] = [Region::Southern, Region::Northern];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Southern => "southern",
            Region::Northern => "northern",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeasonLabel {
    BothSeasons,
    Summer,
    Winter,
    None,
}

impl SeasonLabel {
    pub const ALL: [SeasonLabel; 4] = [
        SeasonLabel::BothSeasons,
        SeasonLabel::Summer,
        SeasonLabel::Winter,
        SeasonLabel::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SeasonLabel::BothSeasons => "both_seasons",
            SeasonLabel::Summer => "summer",
            SeasonLabel::Winter => "winter",
            SeasonLabel::None => "none",
        }
    }
}

impl fmt::Display for SeasonLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeasonLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeasonLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown seasonality label `{s}`")))
    }
}

/// One Gaussian bump on the year circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeasonalBasis<T> {
    pub center: T,
    pub width: T,
    pub amplitude: T,
}

/// Per-basis amplitude scales for each region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionScales<T> {
    pub southern: Vec<T>,
    pub northern: Vec<T>,
}

impl<T> RegionScales<T> {
    pub fn get(&self, region: Region) -> &[T] {
        match region {
            Region::Southern => &self.southern,
            Region::Northern => &self.northern,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalProfile<T> {
    pub label: SeasonLabel,
    pub year_length: u32,
    pub bases: Vec<SeasonalBasis<T>>,
    pub region_scales: RegionScales<T>,
}

/// Shortest distance between two points on a circle of circumference `period`.
pub fn circular_distance<T: Scalar>(a: T, b: T, period: T) -> T {
    let diff = (a - b).abs() % period;
    diff.min(period - diff)
}

/// Day of year in `[0, 365)`, with Feb 29 sharing day 59 with Mar 1.
pub fn day_of_year(date: NaiveDate) -> u32 {
    let ord = date.ordinal0();
    if date.leap_year() && ord >= 60 {
        ord - 1
    } else {
        ord
    }
}

impl<T: Scalar> SeasonalProfile<T> {
    /// Profile with a single constant basis and unit region scales.
    pub fn flat() -> Self {
        Self {
            label: SeasonLabel::None,
            year_length: DEFAULT_YEAR_LENGTH,
            bases: vec![baseline()],
            region_scales: RegionScales {
                southern: vec![T::one()],
                northern: vec![T::one()],
            },
        }
    }

    /// Checks structural invariants and the positivity floor on every day.
    pub fn validate(&self) -> Result<()> {
        let label = self.label;
        if self.bases.is_empty() {
            return Err(Error::config(format!("profile `{label}`: needs at least one basis")));
        }
        if self.year_length == 0 {
            return Err(Error::config(format!("profile `{label}`: year length must be positive")));
        }
        let period = T::from_u32(self.year_length).unwrap();
        for (i, b) in self.bases.iter().enumerate() {
            if !(b.center >= T::zero() && b.center < period) {
                return Err(Error::config(format!(
                    "profile `{label}` basis {i}: center {} outside [0, {period})",
                    b.center
                )));
            }
            if !(b.width > T::zero()) {
                return Err(Error::config(format!(
                    "profile `{label}` basis {i}: width must be positive, got {}",
                    b.width
                )));
            }
            if !(b.amplitude >= T::zero()) || !b.amplitude.is_finite() {
                return Err(Error::config(format!(
                    "profile `{label}` basis {i}: amplitude must be non-negative, got {}",
                    b.amplitude
                )));
            }
        }
        for region in Region::ALL {
            let scales = self.region_scales.get(region);
            if scales.len() != self.bases.len() {
                return Err(Error::config(format!(
                    "profile `{label}`: {region} scales have {} entries for {} bases",
                    scales.len(),
                    self.bases.len()
                )));
            }
            if scales.iter().any(|s| !(*s >= T::zero()) || !s.is_finite()) {
                return Err(Error::config(format!(
                    "profile `{label}`: {region} scales must be non-negative"
                )));
            }
            let floor = T::lit(POSITIVITY_FLOOR);
            for day in 0..self.year_length {
                let w = self.coefficient_at(region, T::from_u32(day).unwrap());
                if !(w >= floor) {
                    return Err(Error::config(format!(
                        "profile `{label}`: seasonal coefficient {w} on day {day} ({region}) \
                         is below the floor {POSITIVITY_FLOOR}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Seasonal coefficient at a (possibly fractional) day of year.
    pub fn coefficient_at(&self, region: Region, day: T) -> T {
        let period = T::from_u32(self.year_length).unwrap();
        let scales = self.region_scales.get(region);
        self.bases
            .iter()
            .zip(scales)
            .map(|(b, &s)| {
                let d = circular_distance(b.center, day, period);
                b.amplitude * s * (-(d * d) / (b.width * b.width)).exp()
            })
            .sum()
    }

    pub fn coefficient(&self, region: Region, date: NaiveDate) -> T {
        let day = day_of_year(date) % self.year_length;
        self.coefficient_at(region, T::from_u32(day).unwrap())
    }
}

fn baseline<T: Scalar>() -> SeasonalBasis<T> {
    SeasonalBasis {
        center: T::zero(),
        width: T::lit(FLAT_WIDTH),
        amplitude: T::one(),
    }
}

/// Profiles by label, as used by the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalCatalog<T> {
    pub profiles: Vec<SeasonalProfile<T>>,
}

impl<T: Scalar> SeasonalCatalog<T> {
    pub fn get(&self, label: SeasonLabel) -> Option<&SeasonalProfile<T>> {
        self.profiles.iter().find(|p| p.label == label)
    }

    pub fn labels(&self) -> Vec<SeasonLabel> {
        self.profiles.iter().map(|p| p.label).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.profiles.is_empty() {
            return Err(Error::config("seasonal catalog is empty"));
        }
        for (i, p) in self.profiles.iter().enumerate() {
            if self.profiles[..i].iter().any(|q| q.label == p.label) {
                return Err(Error::config(format!("duplicate seasonal profile `{}`", p.label)));
            }
            p.validate()?;
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SeasonalCatalog<T> {
    /// Baseline plus a winter bump centred on Jan 1 and a summer bump centred
    /// on mid-July. Northern dealers amplify winter bumps, southern dealers
    /// summer bumps.
    fn default() -> Self {
        let winter = SeasonalBasis {
            center: T::zero(),
            width: T::lit(35.0),
            amplitude: T::lit(1.2),
        };
        let summer = SeasonalBasis {
            center: T::lit(196.0),
            width: T::lit(35.0),
            amplitude: T::lit(0.8),
        };
        let boost = T::lit(1.3);
        let one = T::one();
        let profile = |label, bumps: &[(SeasonalBasis<T>, bool)]| {
            let mut bases = vec![baseline()];
            let mut southern = vec![one];
            let mut northern = vec![one];
            for &(b, is_winter) in bumps {
                bases.push(b);
                southern.push(if is_winter { one } else { boost });
                northern.push(if is_winter { boost } else { one });
            }
            SeasonalProfile {
                label,
                year_length: DEFAULT_YEAR_LENGTH,
                bases,
                region_scales: RegionScales { southern, northern },
            }
        };
        Self {
            profiles: vec![
                profile(SeasonLabel::BothSeasons, &[(winter, true), (summer, false)]),
                profile(SeasonLabel::Summer, &[(summer, false)]),
                profile(SeasonLabel::Winter, &[(winter, true)]),
                profile(SeasonLabel::None, &[]),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brute_circular(a: f64, b: f64, period: f64) -> f64 {
        (-3..=3)
            .map(|k| (a - (b + k as f64 * period)).abs())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn circular_distance_examples() {
        assert_eq!(circular_distance(10.0, 10.0, 365.0), 0.0);
        assert_eq!(brute_circular(5.0, 360.0, 365.0), 10.0);
        assert_eq!(circular_distance(5.0, 360.0, 365.0), 10.0);
        assert_eq!(circular_distance(0.0, 182.5, 365.0), 182.5);
        for a in 0..73 {
            for b in 0..73 {
                let (a, b) = (a as f64 * 5.0, b as f64 * 5.0);
                assert_eq!(circular_distance(a, b, 365.0), brute_circular(a, b, 365.0));
            }
        }
    }

    fn single(center: f64, width: f64, amplitude: f64) -> SeasonalProfile<f64> {
        SeasonalProfile {
            label: SeasonLabel::Winter,
            year_length: 365,
            bases: vec![SeasonalBasis {
                center,
                width,
                amplitude,
            }],
            region_scales: RegionScales {
                southern: vec![1.0],
                northern: vec![1.0],
            },
        }
    }

    #[test]
    fn coefficient_examples() {
        let p = single(15.0, 30.0, 2.0);
        assert_eq!(p.coefficient_at(Region::Southern, 15.0), 2.0);

        let flat = SeasonalProfile::<f64>::flat();
        for d in 0..365 {
            assert_relative_eq!(flat.coefficient_at(Region::Northern, d as f64), 1.0, max_relative = 1e-7);
        }

        let mut winter = SeasonalProfile::<f64>::flat();
        winter.bases.push(SeasonalBasis {
            center: 0.0,
            width: 30.0,
            amplitude: 1.5,
        });
        winter.region_scales.southern.push(1.0);
        winter.region_scales.northern.push(1.0);
        let jul1 = NaiveDate::from_ymd_opt(2021, 7, 1).unwrap();
        assert_eq!(day_of_year(jul1), 181);
        let expected = (-(181.0f64 * 181.0) / 1e12).exp() + 1.5 * (-(181.0f64 * 181.0) / 900.0).exp();
        assert_relative_eq!(winter.coefficient(Region::Southern, jul1), expected, max_relative = 1e-15);
        assert_relative_eq!(expected, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn leap_day_folding() {
        let feb29 = NaiveDate::from_ymd_opt(2024, 2, 29).unwrap();
        let mar1 = NaiveDate::from_ymd_opt(2024, 3, 1).unwrap();
        let dec31 = NaiveDate::from_ymd_opt(2024, 12, 31).unwrap();
        assert_eq!(day_of_year(feb29), 59);
        assert_eq!(day_of_year(mar1), 59);
        assert_eq!(day_of_year(dec31), 364);
        assert_eq!(day_of_year(NaiveDate::from_ymd_opt(2023, 3, 1).unwrap()), 59);
    }

    #[test]
    fn default_catalog_is_valid_and_shaped() {
        let cat = SeasonalCatalog::<f64>::default();
        cat.validate().unwrap();
        let jan1 = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap();
        let jul15 = NaiveDate::from_ymd_opt(2022, 7, 15).unwrap();
        let winter = cat.get(SeasonLabel::Winter).unwrap();
        assert!(winter.coefficient(Region::Northern, jan1) > winter.coefficient(Region::Northern, jul15));
        assert!(winter.coefficient(Region::Northern, jan1) >= winter.coefficient(Region::Southern, jan1));
        let summer = cat.get(SeasonLabel::Summer).unwrap();
        assert!(summer.coefficient(Region::Southern, jul15) > summer.coefficient(Region::Northern, jul15));
        let none = cat.get(SeasonLabel::None).unwrap();
        assert_relative_eq!(none.coefficient(Region::Southern, jul15), 1.0, max_relative = 1e-7);
    }

    #[test]
    fn periodicity_over_dates() {
        let cat = SeasonalCatalog::<f64>::default();
        let p = cat.get(SeasonLabel::BothSeasons).unwrap();
        let start = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
        for offset in (0..365).step_by(7) {
            let d = start + chrono::Duration::days(offset);
            let next = NaiveDate::from_ymd_opt(d.year() + 1, d.month(), d.day()).unwrap();
            assert_eq!(p.coefficient(Region::Northern, d), p.coefficient(Region::Northern, next));
        }
    }

    #[test]
    fn basis_symmetry() {
        let p = single(100.0, 20.0, 1.0);
        for off in 1..150 {
            let off = off as f64;
            assert_relative_eq!(
                p.coefficient_at(Region::Southern, 100.0 + off),
                p.coefficient_at(Region::Southern, (100.0 - off).rem_euclid(365.0)),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn validation_errors() {
        let mut p = single(10.0, 5.0, 1.0);
        assert!(p.validate().is_err(), "narrow single bump falls below the floor");
        p = single(400.0, 1e6, 1.0);
        assert!(p.validate().is_err());
        p = single(10.0, 1e6, 1.0);
        p.region_scales.northern.push(1.0);
        assert!(p.validate().is_err());
        assert!(SeasonalCatalog::<f64> { profiles: vec![] }.validate().is_err());
    }
}
