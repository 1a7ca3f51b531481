//! Brute-force reference implementations. They read the dataset back from
//! its CSV export and rescan every row for every question.

use std::collections::{BTreeSet, HashMap};

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use datahand::datastore::{DataSourceType, Dataset};
use datahand::interpreter::{Aspect, Comparator, ConditionSpec, CycleType, Operand};
use datahand::queryengine::{Aggregate, AggregateStats, ClockStats, SleepAggregate};
use datahand::timeparse::{DateRange, LocalDate};

pub struct Oracle {
    numeric: HashMap<DataSourceType, Vec<(LocalDate, f64)>>,
    /// (wake day, bedtime minutes, waketime minutes)
    sleep: Vec<(LocalDate, i64, i64)>,
    goal: f64,
}

fn date(s: &str) -> LocalDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

fn minutes_from_midnight(day: LocalDate, s: &str) -> i64 {
    let t = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M").unwrap();
    (t - day.and_time(NaiveTime::MIN)).num_minutes()
}

fn in_range(d: LocalDate, r: DateRange) -> bool {
    r.start <= d && d <= r.end
}

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

fn close_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => close(a, b),
        (None, None) => true,
        _ => false,
    }
}

#[derive(Debug)]
pub struct Naive {
    pub n: usize,
    pub mean: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub total: f64,
}

fn naive(values: &[f64]) -> Naive {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let total: f64 = values.iter().sum();
    Naive {
        n: values.len(),
        mean: (!values.is_empty()).then(|| total / values.len() as f64),
        lo: sorted.first().copied(),
        hi: sorted.last().copied(),
        total,
    }
}

/// Days since a known Sunday, mod 7.
pub fn weekday_from_sunday(d: LocalDate) -> u8 {
    (d - date("2016-01-03")).num_days().rem_euclid(7) as u8
}

pub fn month_index(d: LocalDate) -> u8 {
    d.format("%m").to_string().parse::<u8>().unwrap() - 1
}

impl Oracle {
    pub fn new(ds: &Dataset) -> Oracle {
        let mut numeric = HashMap::new();
        for s in DataSourceType::NUMERIC {
            let rows = ds
                .to_csv(s)
                .lines()
                .skip(1)
                .map(|l| {
                    let (d, v) = l.split_once(',').unwrap();
                    (date(d), v.parse::<f64>().unwrap())
                })
                .collect();
            numeric.insert(s, rows);
        }
        let sleep = ds
            .to_csv(DataSourceType::SleepRange)
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                let day = date(f[0]);
                (day, minutes_from_midnight(day, f[1]), minutes_from_midnight(day, f[2]))
            })
            .collect();
        let goal = ds
            .profile_csv()
            .lines()
            .find_map(|l| l.strip_prefix("step_goal,"))
            .unwrap()
            .parse()
            .unwrap();
        Oracle { numeric, sleep, goal }
    }

    fn values(&self, source: DataSourceType, r: DateRange, group: Option<(CycleType, u8)>) -> Vec<f64> {
        self.numeric[&source]
            .iter()
            .filter(|(d, _)| in_range(*d, r) && group.is_none_or(|(c, g)| Self::group(c, *d) == g))
            .map(|(_, v)| *v)
            .collect()
    }

    fn group(c: CycleType, d: LocalDate) -> u8 {
        match c {
            CycleType::DayOfWeek => weekday_from_sunday(d),
            CycleType::MonthOfYear => month_index(d),
        }
    }

    fn sleep_rows(&self, r: DateRange, group: Option<(CycleType, u8)>) -> Vec<(LocalDate, i64, i64)> {
        self.sleep
            .iter()
            .filter(|(d, _, _)| in_range(*d, r) && group.is_none_or(|(c, g)| Self::group(c, *d) == g))
            .copied()
            .collect()
    }

    /// Checks an engine aggregate against a rescan. `group` restricts the
    /// rescan to one cycle group.
    pub fn check_aggregate(
        &self,
        source: DataSourceType,
        r: DateRange,
        group: Option<(CycleType, u8)>,
        got: &Aggregate,
    ) -> Result<(), String> {
        let ok = match (source, got) {
            (DataSourceType::SleepRange, Aggregate::Sleep(s)) => self.sleep_matches(r, group, s),
            (_, Aggregate::Numeric(s)) => self.numeric_matches(source, r, group, s),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{source:?} {r} {group:?}: engine {got:?}"))
        }
    }

    fn numeric_matches(
        &self,
        source: DataSourceType,
        r: DateRange,
        group: Option<(CycleType, u8)>,
        s: &AggregateStats,
    ) -> bool {
        let want = naive(&self.values(source, r, group));
        let sum_ok = match s.sum {
            Some(v) => source == DataSourceType::StepCount && close(v, want.total),
            None => source != DataSourceType::StepCount,
        };
        s.n == want.n && close_opt(s.avg, want.mean) && s.min == want.lo && s.max == want.hi && sum_ok
    }

    fn sleep_matches(&self, r: DateRange, group: Option<(CycleType, u8)>, s: &SleepAggregate) -> bool {
        let rows = self.sleep_rows(r, group);
        let clock = |vals: Vec<f64>, got: Option<ClockStats>| {
            let want = naive(&vals);
            match got {
                None => want.n == 0,
                Some(c) => {
                    close(c.avg, want.mean.unwrap())
                        && Some(c.earliest as f64) == want.lo
                        && Some(c.latest as f64) == want.hi
                }
            }
        };
        s.n == rows.len()
            && clock(rows.iter().map(|r| r.1 as f64).collect(), s.bedtime)
            && clock(rows.iter().map(|r| r.2 as f64).collect(), s.waketime)
    }

    /// Days matching `c` by full scan.
    pub fn highlight(&self, c: &ConditionSpec, r: DateRange) -> BTreeSet<LocalDate> {
        let rows: Vec<(LocalDate, f64)> = match c.aspect {
            Aspect::Bedtime => self.sleep_rows(r, None).iter().map(|x| (x.0, x.1 as f64)).collect(),
            Aspect::WakeTime => self.sleep_rows(r, None).iter().map(|x| (x.0, x.2 as f64)).collect(),
            _ => self.numeric[&c.source]
                .iter()
                .filter(|(d, _)| in_range(*d, r))
                .copied()
                .collect(),
        };
        let threshold = match (c.aspect, c.operand) {
            (Aspect::GoalRef, _) => Some(self.goal),
            (_, Some(Operand::Quantity(q))) => Some(q),
            (Aspect::Bedtime, Some(Operand::Clock(t))) => {
                let m = t.minutes() as f64;
                Some(if m >= 720.0 { m - 1440.0 } else { m })
            }
            (_, Some(Operand::Clock(t))) => Some(t.minutes() as f64),
            (_, None) => None,
        };
        let stats = naive(&rows.iter().map(|x| x.1).collect::<Vec<_>>());
        rows.iter()
            .filter(|(_, v)| match c.comparator {
                Comparator::Min => Some(*v) == stats.lo,
                Comparator::Max => Some(*v) == stats.hi,
                Comparator::Lt => *v < threshold.unwrap(),
                Comparator::Lte => *v <= threshold.unwrap(),
                Comparator::Gt => *v > threshold.unwrap(),
                Comparator::Gte => *v >= threshold.unwrap(),
            })
            .map(|(d, _)| *d)
            .collect()
    }
}
