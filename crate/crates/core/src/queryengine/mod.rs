//! Aggregation, comparison and highlight queries over a sealed dataset.
//!
//! Everything here is a pure read. Statistics cover the days that have a
//! record; missing days are skipped, never zero-filled.

use std::collections::BTreeSet;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::datastore::{DataSourceType, Dataset, SleepRecord, UserProfile};
use crate::interpreter::{Aspect, Comparator, ConditionSpec, CycleType, Operand};
use crate::timeparse::{DateRange, LocalDate, TimeOfDay};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n: usize,
    pub avg: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Total over the range; reported for step counts only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<f64>,
}

/// Average, earliest and latest of one end of the sleep range, in minutes
/// from the wake day's midnight (bedtimes may be negative).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockStats {
    pub avg: f64,
    pub earliest: i32,
    pub latest: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SleepAggregate {
    pub n: usize,
    pub bedtime: Option<ClockStats>,
    pub waketime: Option<ClockStats>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Aggregate {
    Numeric(AggregateStats),
    Sleep(SleepAggregate),
}

impl Aggregate {
    pub fn n(&self) -> usize {
        match self {
            Aggregate::Numeric(s) => s.n,
            Aggregate::Sleep(s) => s.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighlightResult {
    /// The condition as evaluated, with a goal operand bound.
    pub condition: ConditionSpec,
    pub evaluated_range: DateRange,
    pub dates: BTreeSet<LocalDate>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoRangeComparisonResult {
    pub source: DataSourceType,
    pub range_a: DateRange,
    pub range_b: DateRange,
    pub stats_a: Aggregate,
    pub stats_b: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleGroup {
    /// Sunday = 0 for weekdays, January = 0 for months.
    pub id: u8,
    pub label: String,
    pub stats: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicalComparisonResult {
    pub source: DataSourceType,
    pub range: DateRange,
    pub cycle: CycleType,
    pub groups: Vec<CycleGroup>,
}

const WEEKDAYS: [&str; 7] = ["Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"];
const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

/// Group a date falls into under `cycle`.
pub fn cycle_group(cycle: CycleType, date: LocalDate) -> u8 {
    match cycle {
        CycleType::DayOfWeek => date.weekday().num_days_from_sunday() as u8,
        CycleType::MonthOfYear => date.month0() as u8,
    }
}

pub fn cycle_group_label(cycle: CycleType, id: u8) -> &'static str {
    match cycle {
        CycleType::DayOfWeek => WEEKDAYS.get(id as usize).copied().unwrap_or("?"),
        CycleType::MonthOfYear => MONTHS.get(id as usize).copied().unwrap_or("?"),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct NumAcc {
    n: usize,
    sum: f64,
    min: f64,
    max: f64,
}

impl NumAcc {
    fn push(&mut self, v: f64) {
        if self.n == 0 {
            self.min = v;
            self.max = v;
        } else {
            self.min = self.min.min(v);
            self.max = self.max.max(v);
        }
        self.n += 1;
        self.sum += v;
    }

    fn finish(self, with_sum: bool) -> AggregateStats {
        if self.n == 0 {
            return AggregateStats {
                sum: with_sum.then_some(0.0),
                ..AggregateStats::default()
            };
        }
        AggregateStats {
            n: self.n,
            avg: Some(self.sum / self.n as f64),
            min: Some(self.min),
            max: Some(self.max),
            sum: with_sum.then_some(self.sum),
        }
    }

    fn clock(self) -> Option<ClockStats> {
        (self.n > 0).then(|| ClockStats {
            avg: self.sum / self.n as f64,
            earliest: self.min as i32,
            latest: self.max as i32,
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct SleepAcc {
    bed: NumAcc,
    wake: NumAcc,
}

impl SleepAcc {
    fn push(&mut self, r: &SleepRecord) {
        self.bed.push(r.bedtime as f64);
        self.wake.push(r.waketime as f64);
    }

    fn finish(self) -> SleepAggregate {
        SleepAggregate {
            n: self.bed.n,
            bedtime: self.bed.clock(),
            waketime: self.wake.clock(),
        }
    }
}

/// Per-group statistics; `group_of` maps each day to an index below `groups`.
fn aggregate_grouped(
    ds: &Dataset,
    source: DataSourceType,
    range: DateRange,
    groups: usize,
    group_of: impl Fn(LocalDate) -> usize,
) -> Vec<Aggregate> {
    if source == DataSourceType::SleepRange {
        let mut accs = vec![SleepAcc::default(); groups];
        for r in ds.sleep_in(range) {
            accs[group_of(r.date)].push(r);
        }
        accs.into_iter().map(|a| Aggregate::Sleep(a.finish())).collect()
    } else {
        let mut accs = vec![NumAcc::default(); groups];
        for r in ds.numeric_in(source, range) {
            accs[group_of(r.date)].push(r.value);
        }
        let with_sum = source == DataSourceType::StepCount;
        accs.into_iter()
            .map(|a| Aggregate::Numeric(a.finish(with_sum)))
            .collect()
    }
}

pub fn aggregate(ds: &Dataset, source: DataSourceType, range: DateRange) -> Aggregate {
    aggregate_grouped(ds, source, range, 1, |_| 0).remove(0)
}

pub fn compare_two_ranges(
    ds: &Dataset,
    source: DataSourceType,
    range_a: DateRange,
    range_b: DateRange,
) -> TwoRangeComparisonResult {
    TwoRangeComparisonResult {
        source,
        range_a,
        range_b,
        stats_a: aggregate(ds, source, range_a),
        stats_b: aggregate(ds, source, range_b),
    }
}

pub fn compare_cyclical(
    ds: &Dataset,
    source: DataSourceType,
    range: DateRange,
    cycle: CycleType,
) -> CyclicalComparisonResult {
    let stats = aggregate_grouped(ds, source, range, cycle.group_count(), |d| {
        cycle_group(cycle, d) as usize
    });
    CyclicalComparisonResult {
        source,
        range,
        cycle,
        groups: stats
            .into_iter()
            .enumerate()
            .map(|(i, stats)| CycleGroup {
                id: i as u8,
                label: cycle_group_label(cycle, i as u8).to_string(),
                stats,
            })
            .collect(),
    }
}

/// Signed minutes used to compare a bedtime: clock times from noon on
/// count as the previous evening.
pub fn bedtime_minutes(t: TimeOfDay) -> i32 {
    let m = t.minutes() as i32;
    if m >= 720 {
        m - 1440
    } else {
        m
    }
}

/// Fills a goal operand from the profile.
pub fn bind_condition(condition: &ConditionSpec, profile: &UserProfile) -> ConditionSpec {
    let mut c = *condition;
    if c.aspect == Aspect::GoalRef {
        c.operand = Some(Operand::Quantity(profile.step_goal as f64));
    }
    c
}

/// The compared quantity of each day that has one, in date order.
fn day_values(ds: &Dataset, c: &ConditionSpec, range: DateRange) -> Vec<(LocalDate, f64)> {
    match c.aspect {
        Aspect::Bedtime => ds.sleep_in(range).map(|r| (r.date, r.bedtime as f64)).collect(),
        Aspect::WakeTime => ds.sleep_in(range).map(|r| (r.date, r.waketime as f64)).collect(),
        Aspect::Value | Aspect::GoalRef if c.source.is_numeric() => {
            ds.numeric_in(c.source, range).map(|r| (r.date, r.value)).collect()
        }
        _ => Vec::new(),
    }
}

/// Days in `range` satisfying `condition`. Extremum conditions keep every
/// day that ties for the extreme value. An invalid condition matches nothing.
pub fn run_highlight_query(
    ds: &Dataset,
    condition: &ConditionSpec,
    range: DateRange,
    profile: &UserProfile,
) -> HighlightResult {
    let c = bind_condition(condition, profile);
    let mut dates = BTreeSet::new();
    if c.validate().is_ok() {
        let values = day_values(ds, &c, range);
        match (c.comparator, c.operand) {
            (Comparator::Min | Comparator::Max, _) => {
                let pick = if c.comparator == Comparator::Min {
                    f64::min
                } else {
                    f64::max
                };
                if let Some(best) = values.iter().map(|(_, v)| *v).reduce(pick) {
                    dates.extend(values.iter().filter(|(_, v)| *v == best).map(|(d, _)| *d));
                }
            }
            (cmp, Some(op)) => {
                let threshold = match op {
                    Operand::Quantity(q) => q,
                    Operand::Clock(t) if c.aspect == Aspect::Bedtime => bedtime_minutes(t) as f64,
                    Operand::Clock(t) => t.minutes() as f64,
                };
                dates.extend(values.iter().filter(|(_, v)| cmp.holds(*v, threshold)).map(|(d, _)| *d));
            }
            (_, None) => {}
        }
    }
    HighlightResult {
        condition: c,
        evaluated_range: range,
        count: dates.len(),
        dates,
    }
}
