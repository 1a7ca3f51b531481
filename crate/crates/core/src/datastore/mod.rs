//! Daily metric series, the user profile, CSV ingestion and the seeded
//! fixture generator.
//!
//! A [`DatasetBuilder`] accepts CSV streams and enforces record invariants.
//! [`DatasetBuilder::seal`] turns it into an immutable [`Dataset`] that any
//! number of readers may share.

mod generate;
mod ingest;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timeparse::{DateRange, LocalDate};

pub use generate::{generate_fixture, GeneratorConfig};
pub use ingest::{decode_sleep, encode_sleep, IngestReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSourceType {
    StepCount,
    RestingHeartRate,
    SleepRange,
    HoursSlept,
    Weight,
}

impl DataSourceType {
    pub const ALL: [DataSourceType; 5] = [
        DataSourceType::StepCount,
        DataSourceType::RestingHeartRate,
        DataSourceType::SleepRange,
        DataSourceType::HoursSlept,
        DataSourceType::Weight,
    ];

    pub const NUMERIC: [DataSourceType; 4] = [
        DataSourceType::StepCount,
        DataSourceType::RestingHeartRate,
        DataSourceType::HoursSlept,
        DataSourceType::Weight,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DataSourceType::StepCount => "Step Count",
            DataSourceType::RestingHeartRate => "Resting Heart Rate",
            DataSourceType::SleepRange => "Sleep Range",
            DataSourceType::HoursSlept => "Hours Slept",
            DataSourceType::Weight => "Weight",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            DataSourceType::StepCount => "step_count",
            DataSourceType::RestingHeartRate => "resting_heart_rate",
            DataSourceType::SleepRange => "sleep_range",
            DataSourceType::HoursSlept => "hours_slept",
            DataSourceType::Weight => "weight",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            DataSourceType::StepCount => "steps.csv",
            DataSourceType::RestingHeartRate => "rhr.csv",
            DataSourceType::SleepRange => "sleep.csv",
            DataSourceType::HoursSlept => "hours_slept.csv",
            DataSourceType::Weight => "weight.csv",
        }
    }

    pub fn is_numeric(self) -> bool {
        self != DataSourceType::SleepRange
    }

    /// Range check for a daily value of this source.
    pub fn accepts(self, v: f64) -> bool {
        v.is_finite()
            && match self {
                DataSourceType::StepCount => v >= 0.0 && v.fract() == 0.0,
                DataSourceType::RestingHeartRate => v > 20.0 && v < 250.0,
                DataSourceType::HoursSlept => (0.0..=24.0).contains(&v),
                DataSourceType::Weight => v > 0.0,
                DataSourceType::SleepRange => false,
            }
    }
}

impl fmt::Display for DataSourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DataSourceType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_lowercase().replace(['-', ' '], "_");
        Ok(match norm.as_str() {
            "step_count" | "steps" | "step" => DataSourceType::StepCount,
            "resting_heart_rate" | "rhr" | "heart_rate" => DataSourceType::RestingHeartRate,
            "sleep_range" | "sleep" => DataSourceType::SleepRange,
            "hours_slept" | "sleep_duration" => DataSourceType::HoursSlept,
            "weight" => DataSourceType::Weight,
            _ => return Err(format!("unknown data source {s:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyRecord {
    pub date: LocalDate,
    pub value: f64,
}

/// Main sleep attributed to its wake day. `bedtime` is signed minutes from
/// that day's midnight (negative means the previous evening).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SleepRecord {
    pub date: LocalDate,
    pub bedtime: i16,
    pub waketime: u16,
}

impl SleepRecord {
    pub fn new(date: LocalDate, bedtime: i16, waketime: u16) -> Option<SleepRecord> {
        let ok = (-720..720).contains(&bedtime) && waketime < 1440 && (bedtime as i32) < waketime as i32;
        ok.then_some(SleepRecord {
            date,
            bedtime,
            waketime,
        })
    }

    pub fn duration_minutes(&self) -> i32 {
        self.waketime as i32 - self.bedtime as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Numeric(DailyRecord),
    Sleep(SleepRecord),
}

impl Record {
    pub fn date(&self) -> LocalDate {
        match self {
            Record::Numeric(r) => r.date,
            Record::Sleep(r) => r.date,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightUnit {
    #[default]
    Kg,
    Lb,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub step_goal: u32,
    pub weight_unit_display: WeightUnit,
}

impl Default for UserProfile {
    fn default() -> Self {
        UserProfile {
            step_goal: 10_000,
            weight_unit_display: WeightUnit::Kg,
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {reason}")]
    Row { line: u64, reason: String },
    #[error("line {line}: {reason}")]
    Validation { line: u64, reason: String },
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: Box<DataError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Mutable dataset under construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetBuilder {
    numeric: BTreeMap<DataSourceType, BTreeMap<LocalDate, f64>>,
    sleep: BTreeMap<LocalDate, SleepRecord>,
    profile: Option<UserProfile>,
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_value(&mut self, source: DataSourceType, date: LocalDate, value: f64) -> bool {
        if !source.accepts(value) {
            return false;
        }
        self.numeric.entry(source).or_default().insert(date, value);
        true
    }

    pub fn insert_sleep(&mut self, rec: SleepRecord) {
        self.sleep.insert(rec.date, rec);
    }

    pub fn set_profile(&mut self, profile: UserProfile) {
        self.profile = Some(profile);
    }

    pub fn seal(self) -> Dataset {
        let mut numeric = self.numeric;
        for s in DataSourceType::NUMERIC {
            numeric.entry(s).or_default();
        }
        Dataset {
            numeric,
            sleep: self.sleep,
            profile: self.profile.unwrap_or_default(),
        }
    }
}

/// Sealed, read-only dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    numeric: BTreeMap<DataSourceType, BTreeMap<LocalDate, f64>>,
    sleep: BTreeMap<LocalDate, SleepRecord>,
    profile: UserProfile,
}

impl Dataset {
    pub fn profile(&self) -> &UserProfile {
        &self.profile
    }

    /// Numeric series for `source`; empty for [`DataSourceType::SleepRange`].
    pub fn numeric(&self, source: DataSourceType) -> &BTreeMap<LocalDate, f64> {
        static EMPTY: BTreeMap<LocalDate, f64> = BTreeMap::new();
        self.numeric.get(&source).unwrap_or(&EMPTY)
    }

    pub fn sleep(&self) -> &BTreeMap<LocalDate, SleepRecord> {
        &self.sleep
    }

    pub fn len(&self, source: DataSourceType) -> usize {
        match source {
            DataSourceType::SleepRange => self.sleep.len(),
            s => self.numeric(s).len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sleep.is_empty() && self.numeric.values().all(BTreeMap::is_empty)
    }

    pub fn coverage(&self, source: DataSourceType) -> Option<DateRange> {
        let (first, last) = match source {
            DataSourceType::SleepRange => (*self.sleep.keys().next()?, *self.sleep.keys().next_back()?),
            s => {
                let m = self.numeric(s);
                (*m.keys().next()?, *m.keys().next_back()?)
            }
        };
        DateRange::new(first, last)
    }

    pub fn numeric_in(
        &self,
        source: DataSourceType,
        range: DateRange,
    ) -> impl DoubleEndedIterator<Item = DailyRecord> + '_ {
        self.numeric(source)
            .range(range.start..=range.end)
            .map(|(&date, &value)| DailyRecord { date, value })
    }

    pub fn sleep_in(&self, range: DateRange) -> impl DoubleEndedIterator<Item = &SleepRecord> + '_ {
        self.sleep.range(range.start..=range.end).map(|(_, r)| r)
    }

    pub fn has_data(&self, source: DataSourceType, date: LocalDate) -> bool {
        match source {
            DataSourceType::SleepRange => self.sleep.contains_key(&date),
            s => self.numeric(s).contains_key(&date),
        }
    }

    /// Records of `source` whose date falls in `range`, ascending. Missing
    /// days are simply absent.
    pub fn get_range(&self, source: DataSourceType, range: DateRange) -> Vec<Record> {
        match source {
            DataSourceType::SleepRange => self.sleep_in(range).copied().map(Record::Sleep).collect(),
            s => self.numeric_in(s, range).map(Record::Numeric).collect(),
        }
    }
}
