//! Discrete-time simulation of the dealer → truck → part hierarchy.
//!
//! Each step evaluates every part's conditional failure probability over the
//! step, records a demand event when it beats a uniform draw, applies fleet
//! drift and ages all parts. Dealers never interact, so each dealer owns an
//! independent random stream derived from the master seed.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Duration, NaiveDate};
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seasonality::{Region, SeasonLabel, SeasonalCatalog};
use crate::survival::{self, draw_model, Family, HazardModel, Interval, MedianSpec, Usage, UsageModifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftMode {
    None,
    Sudden,
    Slow,
    Combined,
}

impl DriftMode {
    pub const ALL: [DriftMode; 4] = [DriftMode::None, DriftMode::Sudden, DriftMode::Slow, DriftMode::Combined];

    pub fn as_str(self) -> &'static str {
        match self {
            DriftMode::None => "none",
            DriftMode::Sudden => "sudden",
            DriftMode::Slow => "slow",
            DriftMode::Combined => "combined",
        }
    }

    pub fn sudden(self) -> bool {
        matches!(self, DriftMode::Sudden | DriftMode::Combined)
    }

    pub fn slow(self) -> bool {
        matches!(self, DriftMode::Slow | DriftMode::Combined)
    }
}

impl fmt::Display for DriftMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DriftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DriftMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown drift mode `{s}`")))
    }
}

/// Inclusive integer range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountRange {
    pub lo: u32,
    pub hi: u32,
}

impl CountRange {
    pub const fn new(lo: u32, hi: u32) -> Self {
        Self { lo, hi }
    }

    fn validate(&self, what: &str, min: u32) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::config(format!(
                "{what}: lower bound {} exceeds upper bound {}",
                self.lo, self.hi
            )));
        }
        if self.lo < min {
            return Err(Error::config(format!("{what}: lower bound must be at least {min}")));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(self.lo..=self.hi)
    }
}

impl fmt::Display for CountRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// Shape ranges for the shaped families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeRanges {
    pub weibull: Interval<f64>,
    pub log_logistic: Interval<f64>,
    pub gompertz: Interval<f64>,
}

impl Default for ShapeRanges {
    fn default() -> Self {
        Self {
            weibull: survival::default_shape_range(Family::Weibull),
            log_logistic: survival::default_shape_range(Family::LogLogistic),
            gompertz: survival::default_shape_range(Family::Gompertz),
        }
    }
}

impl ShapeRanges {
    pub fn for_family(&self, family: Family) -> Interval<f64> {
        match family {
            Family::Exponential => Interval::point(1.0),
            Family::Weibull => self.weibull,
            Family::LogLogistic => self.log_logistic,
            Family::Gompertz => self.gompertz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub start_date: NaiveDate,
    pub horizon_days: u32,
    pub step_days: u32,
    pub n_dealers: u32,
    pub trucks_per_dealer: CountRange,
    pub parts_per_truck: CountRange,
    /// Size of the part-type catalog shared by all dealers.
    pub n_part_types: u32,
    pub n_truck_models: u32,
    pub median_range: Interval<f64>,
    pub shape_ranges: ShapeRanges,
    pub families: Vec<Family>,
    pub drift_mode: DriftMode,
    pub slow_drift_period_days: u32,
    pub sudden_alpha: Interval<f64>,
    pub hard_usage_prob: f64,
    pub hard_multiplier: f64,
    pub seasonality: SeasonalCatalog<f64>,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            start_date: NaiveDate::from_ymd_opt(2021, 1, 1).unwrap(),
            horizon_days: 1095,
            step_days: 1,
            n_dealers: 4,
            trucks_per_dealer: CountRange::new(5, 10),
            parts_per_truck: CountRange::new(4, 8),
            n_part_types: 10,
            n_truck_models: 3,
            median_range: Interval { lo: 100.0, hi: 150.0 },
            shape_ranges: ShapeRanges::default(),
            families: Family::ALL.to_vec(),
            drift_mode: DriftMode::None,
            slow_drift_period_days: 7,
            sudden_alpha: Interval { lo: 1.25, hi: 1.5 },
            hard_usage_prob: 0.5,
            hard_multiplier: 1.5,
            seasonality: SeasonalCatalog::default(),
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step_days == 0 {
            return Err(Error::config("step_days must be positive"));
        }
        if self.n_dealers == 0 {
            return Err(Error::config("n_dealers must be at least 1"));
        }
        if self.n_part_types == 0 || self.n_truck_models == 0 {
            return Err(Error::config("n_part_types and n_truck_models must be at least 1"));
        }
        self.trucks_per_dealer.validate("trucks_per_dealer", 0)?;
        self.parts_per_truck.validate("parts_per_truck", 1)?;
        if self.parts_per_truck.lo > self.n_part_types {
            return Err(Error::config(format!(
                "parts_per_truck lower bound {} exceeds n_part_types {}",
                self.parts_per_truck.lo, self.n_part_types
            )));
        }
        self.median_range.validate("median_range")?;
        for fam in Family::ALL.into_iter().filter(|f| f.has_shape()) {
            self.shape_ranges
                .for_family(fam)
                .validate(&format!("shape_ranges.{}", fam.as_str()))?;
        }
        if self.families.is_empty() {
            return Err(Error::config("families must list at least one survival family"));
        }
        if self.slow_drift_period_days == 0 {
            return Err(Error::config("slow_drift_period_days must be positive"));
        }
        self.sudden_alpha.validate("sudden_alpha")?;
        if self.sudden_alpha.lo <= 1.0 {
            return Err(Error::config("sudden_alpha must lie within (1, inf)"));
        }
        if !(0.0..=1.0).contains(&self.hard_usage_prob) {
            return Err(Error::config("hard_usage_prob must lie in [0, 1]"));
        }
        UsageModifier::new(self.hard_multiplier)?;
        self.seasonality.validate()
    }

    fn median_spec(&self, family: Family) -> MedianSpec<f64> {
        MedianSpec {
            median: self.median_range,
            shape: self.shape_ranges.for_family(family),
        }
    }

    pub fn date_at(&self, day: u32) -> NaiveDate {
        self.start_date + Duration::days(day as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartType {
    pub id: u32,
    pub model: HazardModel<f64>,
    pub season: SeasonLabel,
}

/// A vehicle model: the ordered set of part types every truck of it carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruckModel {
    pub id: u32,
    pub part_types: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub id: u64,
    pub part_type: u32,
    /// Days since installation or last failure.
    pub age: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truck {
    pub id: u32,
    pub model_type: u32,
    pub usage: Usage,
    pub parts: Vec<Part>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dealer {
    pub id: u32,
    pub location: Region,
    /// Day offsets from the start date.
    pub sudden_time: u32,
    pub slow_time: u32,
    pub sudden_alpha: f64,
    pub trucks: Vec<Truck>,
    sudden_fired: bool,
    slow_added: u32,
    next_part_id: u64,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandEvent {
    pub time: NaiveDate,
    pub dealer_id: u32,
    pub truck_id: u32,
    pub part_id: u64,
    pub part_type: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandSeries {
    pub dealer_id: u32,
    pub part_type: u32,
    pub start_date: NaiveDate,
    pub counts: Vec<u32>,
}

impl DemandSeries {
    pub fn as_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub config: GeneratorConfig,
    pub part_types: Vec<PartType>,
    pub truck_models: Vec<TruckModel>,
    pub dealers: Vec<Dealer>,
    usage: UsageModifier<f64>,
    /// Catalog index of each part type's seasonal profile.
    profile_index: Vec<usize>,
}

fn dealer_rng(seed: u64, dealer: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(dealer as u64 + 1);
    rng
}

fn catalog_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Builds the part-type catalog, truck models and dealers. Every part starts
/// at age zero.
pub fn initialize(config: &GeneratorConfig) -> Result<World> {
    config.validate()?;
    let mut rng = catalog_rng(config.seed);
    let labels = config.seasonality.labels();

    let mut part_types = Vec::with_capacity(config.n_part_types as usize);
    for id in 0..config.n_part_types {
        let family = config.families[rng.gen_range(0..config.families.len())];
        let model = draw_model(family, &config.median_spec(family), &mut rng)?;
        let season = labels[rng.gen_range(0..labels.len())];
        part_types.push(PartType { id, model, season });
    }
    let profile_index = part_types
        .iter()
        .map(|pt| labels.iter().position(|&l| l == pt.season).unwrap())
        .collect();

    let truck_models = (0..config.n_truck_models)
        .map(|id| {
            let n = config.parts_per_truck.sample(&mut rng).min(config.n_part_types);
            let mut part_types: Vec<u32> = sample_indices(&mut rng, config.n_part_types as usize, n as usize)
                .into_iter()
                .map(|i| i as u32)
                .collect();
            part_types.sort_unstable();
            TruckModel { id, part_types }
        })
        .collect::<Vec<_>>();

    let mut world = World {
        config: config.clone(),
        part_types,
        truck_models,
        dealers: Vec::new(),
        usage: UsageModifier::new(config.hard_multiplier)?,
        profile_index,
    };

    for id in 0..config.n_dealers {
        let mut rng = dealer_rng(config.seed, id);
        let location = if rng.gen_bool(0.5) { Region::Northern } else { Region::Southern };
        let sudden_time = rng.gen_range(0..=config.horizon_days);
        let slow_time = rng.gen_range(0..=config.horizon_days);
        let sudden_alpha = config.sudden_alpha.sample(&mut rng);
        let n_trucks = config.trucks_per_dealer.sample(&mut rng);
        let mut dealer = Dealer {
            id,
            location,
            sudden_time,
            slow_time,
            sudden_alpha,
            trucks: Vec::with_capacity(n_trucks as usize),
            sudden_fired: false,
            slow_added: 0,
            next_part_id: 0,
            rng,
        };
        for _ in 0..n_trucks {
            world.add_truck(&mut dealer);
        }
        world.dealers.push(dealer);
    }
    Ok(world)
}

impl World {
    fn add_truck(&self, dealer: &mut Dealer) {
        let rng = &mut dealer.rng;
        let model_type = rng.gen_range(0..self.truck_models.len()) as u32;
        let usage = if rng.gen_bool(self.config.hard_usage_prob) {
            Usage::Hard
        } else {
            Usage::Normal
        };
        let parts = self.truck_models[model_type as usize]
            .part_types
            .iter()
            .map(|&pt| {
                let id = dealer.next_part_id;
                dealer.next_part_id += 1;
                Part {
                    id,
                    part_type: pt,
                    age: 0.0,
                }
            })
            .collect();
        let id = dealer.trucks.len() as u32;
        dealer.trucks.push(Truck {
            id,
            model_type,
            usage,
            parts,
        });
    }

    fn seasonal_weights(&self, region: Region, date: NaiveDate) -> Vec<f64> {
        self.config
            .seasonality
            .profiles
            .iter()
            .map(|p| p.coefficient(region, date))
            .collect()
    }

    /// Failure evaluation for one dealer at day `time`. One uniform draw is
    /// consumed per part; failed parts are reset to age zero.
    pub fn evaluate_demand(&mut self, dealer_idx: usize, time: u32) -> Result<Vec<DemandEvent>> {
        let date = self.config.date_at(time);
        let dt = self.config.step_days as f64;
        let region = self.dealers[dealer_idx].location;
        let weights = self.seasonal_weights(region, date);
        let part_types = &self.part_types;
        let profile_index = &self.profile_index;
        let usage = self.usage;
        let dealer = &mut self.dealers[dealer_idx];
        let mut events = Vec::new();
        for truck in &mut dealer.trucks {
            let usage_mult = usage.multiplier(truck.usage);
            for part in &mut truck.parts {
                let pt = part.part_type as usize;
                let multiplier = weights[profile_index[pt]] * usage_mult;
                let p = part_types[pt].model.conditional_failure_prob(part.age, dt, multiplier)?;
                // u in (0, 1], so a zero probability never fires
                let u = 1.0 - dealer.rng.gen::<f64>();
                if p >= u {
                    events.push(DemandEvent {
                        time: date,
                        dealer_id: dealer.id,
                        truck_id: truck.id,
                        part_id: part.id,
                        part_type: part.part_type,
                    });
                    part.age = 0.0;
                }
            }
        }
        Ok(events)
    }

    /// Applies sudden and slow fleet growth for one dealer at day `time`,
    /// returning the number of trucks added.
    pub fn apply_drift(&mut self, dealer_idx: usize, time: u32) -> u32 {
        let mode = self.config.drift_mode;
        let period = self.config.slow_drift_period_days;
        let mut dealer = std::mem::replace(&mut self.dealers[dealer_idx], placeholder_dealer());
        let before = dealer.trucks.len() as u32;

        if mode.sudden() && !dealer.sudden_fired && time >= dealer.sudden_time {
            dealer.sudden_fired = true;
            let target = (dealer.sudden_alpha * dealer.trucks.len() as f64).ceil() as usize;
            while dealer.trucks.len() < target {
                self.add_truck(&mut dealer);
            }
        }
        if mode.slow() && time >= dealer.slow_time {
            let due = (time - dealer.slow_time) / period;
            while dealer.slow_added < due {
                self.add_truck(&mut dealer);
                dealer.slow_added += 1;
            }
        }

        let added = dealer.trucks.len() as u32 - before;
        self.dealers[dealer_idx] = dealer;
        added
    }

    fn age_parts(&mut self, dealer_idx: usize) {
        let dt = self.config.step_days as f64;
        for truck in &mut self.dealers[dealer_idx].trucks {
            for part in &mut truck.parts {
                part.age += dt;
            }
        }
    }

    pub fn fleet_size(&self, dealer_idx: usize) -> u32 {
        self.dealers[dealer_idx].trucks.len() as u32
    }

    /// Part types carried by at least one of the dealer's trucks.
    pub fn dealer_part_types(&self, dealer_idx: usize) -> BTreeSet<u32> {
        self.dealers[dealer_idx]
            .trucks
            .iter()
            .flat_map(|t| self.truck_models[t.model_type as usize].part_types.iter().copied())
            .collect()
    }

    pub fn part_type(&self, id: u32) -> &PartType {
        &self.part_types[id as usize]
    }
}

fn placeholder_dealer() -> Dealer {
    Dealer {
        id: u32::MAX,
        location: Region::Southern,
        sudden_time: 0,
        slow_time: 0,
        sudden_alpha: 1.0,
        trucks: Vec::new(),
        sudden_fired: true,
        slow_added: 0,
        next_part_id: 0,
        rng: ChaCha8Rng::seed_from_u64(0),
    }
}

impl Dealer {
    pub fn n_parts(&self) -> usize {
        self.trucks.iter().map(|t| t.parts.len()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorOutput {
    pub world: World,
    pub events: Vec<DemandEvent>,
    pub series: Vec<DemandSeries>,
    /// Fleet size per dealer at the start of each day.
    pub fleet_history: Vec<Vec<u32>>,
}

/// Runs the full horizon and aggregates events into dense daily series per
/// (dealer, part type), for every part type present in the dealer's final fleet.
pub fn run(config: &GeneratorConfig) -> Result<GeneratorOutput> {
    let mut world = initialize(config)?;
    let horizon = config.horizon_days;
    let step = config.step_days;
    let mut events = Vec::new();
    let mut fleet_history = Vec::with_capacity(world.dealers.len());

    for d in 0..world.dealers.len() {
        let mut fleet = vec![0u32; horizon as usize];
        let mut time = 0u32;
        let mut last = 0u32;
        while time < horizon {
            for slot in &mut fleet[last as usize..time as usize] {
                *slot = world.fleet_size(d);
            }
            fleet[time as usize] = world.fleet_size(d);
            last = time + 1;
            events.extend(world.evaluate_demand(d, time)?);
            world.apply_drift(d, time);
            world.age_parts(d);
            time = time.saturating_add(step);
        }
        for slot in &mut fleet[(last as usize).min(horizon as usize)..] {
            *slot = world.fleet_size(d);
        }
        fleet_history.push(fleet);
    }

    events.sort_by(|a, b| {
        (a.time, a.dealer_id, a.truck_id, a.part_id).cmp(&(b.time, b.dealer_id, b.truck_id, b.part_id))
    });
    let series = aggregate(&world, &events);
    Ok(GeneratorOutput {
        world,
        events,
        series,
        fleet_history,
    })
}

fn aggregate(world: &World, events: &[DemandEvent]) -> Vec<DemandSeries> {
    let start = world.config.start_date;
    let horizon = world.config.horizon_days as usize;
    let mut series = Vec::new();
    let mut index = vec![Vec::new(); world.dealers.len()];
    for (d, dealer) in world.dealers.iter().enumerate() {
        let types = world.dealer_part_types(d);
        let mut lookup = vec![usize::MAX; world.part_types.len()];
        for pt in types {
            lookup[pt as usize] = series.len();
            series.push(DemandSeries {
                dealer_id: dealer.id,
                part_type: pt,
                start_date: start,
                counts: vec![0; horizon],
            });
        }
        index[d] = lookup;
    }
    for ev in events {
        let day = (ev.time - start).num_days() as usize;
        let s = index[ev.dealer_id as usize][ev.part_type as usize];
        series[s].counts[day] += 1;
    }
    series
}
