//! Statistical checks on the demand generator.

use chrono::Datelike;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparesim::demand_gen::{self, CountRange, GeneratorConfig};
use sparesim::seasonality::{Region, RegionScales, SeasonLabel, SeasonalBasis, SeasonalCatalog, SeasonalProfile};
use sparesim::survival::{Family, HazardModel};

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> (f64, f64) {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    let p: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1.0f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    (d, p.clamp(0.0, 1.0))
}

/// Intervals between successive failures of one renewed part.
fn renewal_intervals(model: &HazardModel<f64>, profile: Option<&SeasonalProfile<f64>>, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut day = 0u32;
    let mut age = 0.0;
    while out.len() < n {
        let w = profile.map_or(1.0, |p| p.coefficient_at(Region::Southern, (day % 365) as f64));
        let p = model.conditional_failure_prob(age, 1.0, w).unwrap();
        let u: f64 = 1.0 - rng.gen::<f64>();
        day += 1;
        age += 1.0;
        if p >= u {
            out.push(age);
            age = 0.0;
        }
    }
    out
}

#[test]
fn flat_profile_matches_unseasonal_simulation() {
    let flat = SeasonalProfile::flat();
    for family in Family::ALL {
        let shape = if family == Family::Gompertz { 0.02 } else { 1.5 };
        let model = HazardModel::from_median(family, 40.0, shape).unwrap();
        let seasonal = renewal_intervals(&model, Some(&flat), 10_000, 1);
        let plain = renewal_intervals(&model, None, 10_000, 2);
        let (d, p) = ks_two_sample(seasonal, plain);
        assert!(p > 0.01, "{family:?}: KS D={d} p={p}");
    }
}

#[test]
fn ks_detects_a_real_difference() {
    let model = HazardModel::from_median(Family::Weibull, 40.0, 1.5).unwrap();
    let faster = HazardModel::from_median(Family::Weibull, 30.0, 1.5).unwrap();
    let (_, p) = ks_two_sample(renewal_intervals(&model, None, 10_000, 1), renewal_intervals(&faster, None, 10_000, 2));
    assert!(p < 1e-6);
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for i in 1..=n {
        out[i] = out[i - 1] + (i as f64).ln();
    }
    out
}

/// P(X >= k) for X ~ Binomial(n, p).
fn binomial_upper_tail(k: usize, n: usize, p: f64) -> f64 {
    let lf = ln_factorials(n);
    (k..=n)
        .map(|i| (lf[n] - lf[i] - lf[n - i] + i as f64 * p.ln() + (n - i) as f64 * (1.0 - p).ln()).exp())
        .sum()
}

#[test]
fn winter_parts_fail_more_in_winter() {
    let profile = SeasonalProfile {
        label: SeasonLabel::Winter,
        year_length: 365,
        bases: vec![
            SeasonalBasis {
                center: 0.0,
                width: 1e6,
                amplitude: 1.0,
            },
            SeasonalBasis {
                center: 0.0,
                width: 35.0,
                amplitude: 2.0,
            },
        ],
        region_scales: RegionScales {
            southern: vec![1.0, 1.0],
            northern: vec![1.0, 1.0],
        },
    };
    let cfg = GeneratorConfig {
        horizon_days: 3650,
        n_dealers: 2,
        trucks_per_dealer: CountRange::new(10, 10),
        seasonality: SeasonalCatalog { profiles: vec![profile] },
        seed: 99,
        ..GeneratorConfig::default()
    };
    let out = demand_gen::run(&cfg).unwrap();
    let (mut winter, mut summer) = (0usize, 0usize);
    let (mut winter_days, mut summer_days) = (0usize, 0usize);
    for d in 0..cfg.horizon_days {
        match cfg.date_at(d).month() {
            12 | 1 | 2 => winter_days += 1,
            6..=8 => summer_days += 1,
            _ => {}
        }
    }
    for ev in &out.events {
        match ev.time.month() {
            12 | 1 | 2 => winter += 1,
            6..=8 => summer += 1,
            _ => {}
        }
    }
    assert!(winter as f64 / winter_days as f64 > summer as f64 / summer_days as f64);
    let null_p = winter_days as f64 / (winter_days + summer_days) as f64;
    let p_value = binomial_upper_tail(winter, winter + summer, null_p);
    assert!(p_value < 0.01, "winter {winter} summer {summer} p={p_value}");
}
