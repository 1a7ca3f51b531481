//! Calendar arithmetic: months, weeks, meteorological seasons and holidays.

use std::collections::BTreeMap;
use std::io::Read;
use std::str::FromStr;

use chrono::{Datelike, Days, Months, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DateRange, LocalDate};

pub fn date(year: i32, month: u32, day: u32) -> Option<LocalDate> {
    NaiveDate::from_ymd_opt(year, month, day)
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    let first = date(year, month, 1).expect("valid month");
    let next = first.checked_add_months(Months::new(1)).expect("in range");
    (next - first).num_days() as u32
}

pub fn month_range(year: i32, month: u32) -> Option<DateRange> {
    let start = date(year, month, 1)?;
    let end = date(year, month, days_in_month(year, month))?;
    Some(DateRange { start, end })
}

pub fn year_range(year: i32) -> Option<DateRange> {
    Some(DateRange {
        start: date(year, 1, 1)?,
        end: date(year, 12, 31)?,
    })
}

/// Sunday-first week containing `d`.
pub fn week_range(d: LocalDate) -> Option<DateRange> {
    let start = d.checked_sub_days(Days::new(d.weekday().num_days_from_sunday() as u64))?;
    let end = start.checked_add_days(Days::new(6))?;
    Some(DateRange { start, end })
}

/// `n`-th `weekday` of a month, counting from 1; `n = -1` is the last one.
pub fn nth_weekday(year: i32, month: u32, weekday: Weekday, n: i8) -> Option<LocalDate> {
    if n == -1 {
        let last = date(year, month, days_in_month(year, month))?;
        let back = (7 + last.weekday().num_days_from_sunday() - weekday.num_days_from_sunday()) % 7;
        return last.checked_sub_days(Days::new(back as u64));
    }
    if n < 1 {
        return None;
    }
    NaiveDate::from_weekday_of_month_opt(year, month, weekday, n as u8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Season {
    Spring,
    Summer,
    Fall,
    Winter,
}

impl Season {
    pub fn from_name(name: &str) -> Option<Season> {
        match name.trim().to_lowercase().as_str() {
            "spring" => Some(Season::Spring),
            "summer" => Some(Season::Summer),
            "fall" | "autumn" => Some(Season::Fall),
            "winter" => Some(Season::Winter),
            _ => None,
        }
    }
}

/// Meteorological (Northern Hemisphere) season. Winter `Y` runs from
/// December 1 of `Y - 1` through the end of February of `Y`.
pub fn resolve_season(season: Season, year: i32) -> Option<DateRange> {
    let (start, end) = match season {
        Season::Spring => (date(year, 3, 1)?, date(year, 5, 31)?),
        Season::Summer => (date(year, 6, 1)?, date(year, 8, 31)?),
        Season::Fall => (date(year, 9, 1)?, date(year, 11, 30)?),
        Season::Winter => (date(year - 1, 12, 1)?, date(year, 2, days_in_month(year, 2))?),
    };
    Some(DateRange { start, end })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HolidayRule {
    Fixed {
        month: u32,
        day: u32,
    },
    /// `n = -1` selects the last matching weekday of the month.
    NthWeekday {
        month: u32,
        weekday: Weekday,
        n: i8,
    },
    LookupByYear(BTreeMap<i32, LocalDate>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HolidayError {
    #[error("unknown holiday {name:?} for year {year}")]
    HolidayUnknown { name: String, year: i32 },
    #[error("holiday table line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Years for which computed (fixed and nth-weekday) rules are answered.
pub const RULE_YEAR_SPAN: (i32, i32) = (1900, 2100);

const DEFAULT_LOOKUP_CSV: &str = include_str!("../../data/holidays.csv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolidayTable {
    rules: BTreeMap<String, HolidayRule>,
    /// Surface phrase (lowercase words) → canonical name.
    aliases: Vec<(Vec<String>, String)>,
}

impl Default for HolidayTable {
    fn default() -> Self {
        use Weekday::*;
        let mut t = HolidayTable {
            rules: BTreeMap::new(),
            aliases: Vec::new(),
        };
        let fixed = |month, day| HolidayRule::Fixed { month, day };
        let nth = |month, weekday, n| HolidayRule::NthWeekday { month, weekday, n };
        t.add(
            "New Year's Day",
            fixed(1, 1),
            &["new year's day", "new years day", "new year day"],
        );
        t.add(
            "Martin Luther King Day",
            nth(1, Mon, 3),
            &["martin luther king day", "mlk day"],
        );
        t.add(
            "Valentine's Day",
            fixed(2, 14),
            &["valentine's day", "valentines day", "valentine's"],
        );
        t.add(
            "Presidents' Day",
            nth(2, Mon, 3),
            &["presidents day", "president's day"],
        );
        t.add("Mother's Day", nth(5, Sun, 2), &["mother's day", "mothers day"]);
        t.add("Memorial Day", nth(5, Mon, -1), &["memorial day"]);
        t.add("Father's Day", nth(6, Sun, 3), &["father's day", "fathers day"]);
        t.add(
            "Independence Day",
            fixed(7, 4),
            &["independence day", "fourth of july", "4th of july"],
        );
        t.add("Labor Day", nth(9, Mon, 1), &["labor day", "labour day"]);
        t.add("Halloween", fixed(10, 31), &["halloween"]);
        t.add("Thanksgiving", nth(11, Thu, 4), &["thanksgiving", "thanksgiving day"]);
        t.add("Christmas Eve", fixed(12, 24), &["christmas eve"]);
        t.add("Christmas", fixed(12, 25), &["christmas", "christmas day", "xmas"]);
        t.add("New Year's Eve", fixed(12, 31), &["new year's eve", "new years eve"]);
        t.add(
            "Lunar New Year",
            HolidayRule::LookupByYear(BTreeMap::new()),
            &[
                "lunar new year",
                "lunar new year's",
                "lunar new year's day",
                "lunar new years day",
                "chinese new year",
            ],
        );
        t.load_lookup(DEFAULT_LOOKUP_CSV.as_bytes())
            .expect("bundled holiday table is well-formed");
        t
    }
}

impl HolidayTable {
    fn add(&mut self, name: &str, rule: HolidayRule, aliases: &[&str]) {
        self.rules.insert(name.to_string(), rule);
        for a in aliases {
            let words = crate::lex::tokenize(a).into_iter().map(|t| t.text).collect();
            self.aliases.push((words, name.to_string()));
        }
    }

    /// Merges `name,year,date` records into lookup-by-year rules. A header
    /// row starting with `name` is skipped. Records for names that already
    /// carry a computed rule are rejected.
    pub fn load_lookup<R: Read>(&mut self, reader: R) -> Result<usize, HolidayError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut n = 0;
        for (idx, rec) in rdr.records().enumerate() {
            let line = idx + 1;
            let bad = |reason: String| HolidayError::Malformed { line, reason };
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if rec.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", rec.len())));
            }
            if line == 1 && rec[0].eq_ignore_ascii_case("name") {
                continue;
            }
            let year: i32 = rec[1].parse().map_err(|_| bad(format!("bad year {:?}", &rec[1])))?;
            let day = NaiveDate::from_str(&rec[2]).map_err(|e| bad(e.to_string()))?;
            if day.year() != year {
                return Err(bad(format!("date {day} is not in year {year}")));
            }
            let rule = self
                .rules
                .entry(rec[0].to_string())
                .or_insert_with(|| HolidayRule::LookupByYear(BTreeMap::new()));
            match rule {
                HolidayRule::LookupByYear(map) => {
                    map.insert(year, day);
                }
                _ => return Err(bad(format!("{:?} has a computed rule", &rec[0]))),
            }
            n += 1;
        }
        Ok(n)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    /// Canonical name for a holiday name or alias, case-insensitive.
    pub fn canonical(&self, name: &str) -> Option<&str> {
        let words: Vec<String> = crate::lex::tokenize(name).into_iter().map(|t| t.text).collect();
        if let Some((k, _)) = self.rules.get_key_value(name) {
            return Some(k);
        }
        if let Some(k) = self.rules.keys().find(|k| k.eq_ignore_ascii_case(name.trim())) {
            return Some(k);
        }
        self.aliases.iter().find(|(a, _)| *a == words).map(|(_, c)| c.as_str())
    }

    pub fn aliases(&self) -> &[(Vec<String>, String)] {
        &self.aliases
    }

    pub fn resolve(&self, name: &str, year: i32) -> Result<LocalDate, HolidayError> {
        let unknown = || HolidayError::HolidayUnknown {
            name: name.to_string(),
            year,
        };
        let canonical = self.canonical(name).ok_or_else(unknown)?;
        let in_span = (RULE_YEAR_SPAN.0..=RULE_YEAR_SPAN.1).contains(&year);
        match &self.rules[canonical] {
            HolidayRule::Fixed { month, day } if in_span => date(year, *month, *day).ok_or_else(unknown),
            HolidayRule::NthWeekday { month, weekday, n } if in_span => {
                nth_weekday(year, *month, *weekday, *n).ok_or_else(unknown)
            }
            HolidayRule::LookupByYear(map) => map.get(&year).copied().ok_or_else(unknown),
            _ => Err(unknown()),
        }
    }

    /// Emits every resolvable (name, year, date) in `years`, sorted by name
    /// then year, in the on-disk record format.
    pub fn to_csv(&self, years: std::ops::RangeInclusive<i32>) -> String {
        let mut out = String::from("name,year,date\n");
        for name in self.rules.keys() {
            for y in years.clone() {
                if let Ok(d) = self.resolve(name, y) {
                    out.push_str(&format!("{name},{y},{d}\n"));
                }
            }
        }
        out
    }
}
