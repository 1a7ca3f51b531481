//! Deterministic synthetic daily data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{DataSourceType, Dataset, DatasetBuilder, SleepRecord, UserProfile};
use crate::timeparse::DateRange;

/// Distribution constants for [`generate_fixture`]. These are plausible
/// shapes for tests, not measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub missing_rate: f64,
    pub steps_mean: f64,
    pub steps_sd: f64,
    pub rhr_mean: f64,
    pub rhr_sd: f64,
    pub sleep_hours_mean: f64,
    pub sleep_hours_sd: f64,
    /// Fraction of time in bed actually asleep, drawn uniformly.
    pub sleep_efficiency: (f64, f64),
    pub bedtime_mean_min: f64,
    pub bedtime_sd_min: f64,
    pub weight_start_kg: f64,
    pub weight_step_sd_kg: f64,
    pub weight_bounds_kg: (f64, f64),
    pub step_goal: u32,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            missing_rate: 0.05,
            steps_mean: 9000.0,
            steps_sd: 3000.0,
            rhr_mean: 62.0,
            rhr_sd: 4.0,
            sleep_hours_mean: 7.5,
            sleep_hours_sd: 1.0,
            sleep_efficiency: (0.85, 0.97),
            bedtime_mean_min: -30.0,
            bedtime_sd_min: 60.0,
            weight_start_kg: 70.0,
            weight_step_sd_kg: 0.15,
            weight_bounds_kg: (50.0, 90.0),
            step_goal: 10_000,
        }
    }
}

/// Same `(seed, span)` always yields the same dataset.
pub fn generate_fixture(seed: u64, span: DateRange) -> Dataset {
    GeneratorConfig::default().generate(seed, span)
}

fn round_to(v: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (v * f).round() / f
}

impl GeneratorConfig {
    pub fn generate(&self, seed: u64, span: DateRange) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = Normal::new(self.steps_mean, self.steps_sd).expect("finite sd");
        let rhr = Normal::new(self.rhr_mean, self.rhr_sd).expect("finite sd");
        let sleep_h = Normal::new(self.sleep_hours_mean, self.sleep_hours_sd).expect("finite sd");
        let bedtime = Normal::new(self.bedtime_mean_min, self.bedtime_sd_min).expect("finite sd");
        let drift = Normal::new(0.0, self.weight_step_sd_kg).expect("finite sd");

        let mut b = DatasetBuilder::new();
        let mut weight = self.weight_start_kg;
        for day in span.days() {
            // Every draw happens every day so one source's gaps never shift
            // another source's values.
            let present: [bool; 5] = std::array::from_fn(|_| !rng.random_bool(self.missing_rate));
            let s = steps.sample(&mut rng).clamp(0.0, 40_000.0).round();
            let h = rhr.sample(&mut rng).clamp(40.0, 110.0).round();
            let bed = bedtime.sample(&mut rng).clamp(-300.0, 300.0).round();
            let in_bed = (sleep_h.sample(&mut rng) * 60.0).clamp(180.0, 720.0);
            let efficiency = rng.random_range(self.sleep_efficiency.0..self.sleep_efficiency.1);
            weight = (weight + drift.sample(&mut rng)).clamp(self.weight_bounds_kg.0, self.weight_bounds_kg.1);

            let wake = (bed + in_bed).round().clamp(30.0, 1439.0);
            let slept = round_to((wake - bed) / 60.0 * efficiency, 2);

            if present[0] {
                b.insert_value(DataSourceType::StepCount, day, s);
            }
            if present[1] {
                b.insert_value(DataSourceType::RestingHeartRate, day, h);
            }
            if present[2] {
                let rec = SleepRecord::new(day, bed as i16, wake as u16).expect("generator clamps keep bed < wake");
                b.insert_sleep(rec);
            }
            if present[3] {
                b.insert_value(DataSourceType::HoursSlept, day, slept);
            }
            if present[4] {
                b.insert_value(DataSourceType::Weight, day, round_to(weight, 1));
            }
        }
        b.set_profile(UserProfile {
            step_goal: self.step_goal,
            ..UserProfile::default()
        });
        b.seal()
    }
}
