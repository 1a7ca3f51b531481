//! Natural-language time expressions resolved against a reference date.
//!
//! ```
//! use datahand::timeparse::{parse_time_expressions, ReferenceFrame, TimeValue, DateRange};
//! use chrono::NaiveDate;
//!
//! let frame = ReferenceFrame::new(NaiveDate::from_ymd_opt(2020, 8, 27).unwrap());
//! let found = parse_time_expressions("steps for the last 30 days", &frame);
//! assert_eq!(
//!     found[0].value,
//!     TimeValue::Range(DateRange::new(
//!         NaiveDate::from_ymd_opt(2020, 7, 29).unwrap(),
//!         NaiveDate::from_ymd_opt(2020, 8, 27).unwrap(),
//!     ).unwrap())
//! );
//! ```

mod calendar;
mod grammar;

use std::fmt;
use std::ops::Range;
use std::sync::{Arc, LazyLock};

use chrono::{Datelike, Days, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

pub use calendar::{
    days_in_month, month_range, nth_weekday, resolve_season, week_range, year_range, HolidayError, HolidayRule,
    HolidayTable, Season, RULE_YEAR_SPAN,
};

use crate::lex::{self, Token};

pub type LocalDate = NaiveDate;

/// Inclusive date interval with `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawRange")]
pub struct DateRange {
    pub start: LocalDate,
    pub end: LocalDate,
}

#[derive(Deserialize)]
struct RawRange {
    start: LocalDate,
    end: LocalDate,
}

impl TryFrom<RawRange> for DateRange {
    type Error = String;

    fn try_from(raw: RawRange) -> Result<Self, Self::Error> {
        DateRange::new(raw.start, raw.end).ok_or_else(|| format!("range start {} is after end {}", raw.start, raw.end))
    }
}

impl DateRange {
    pub fn new(start: LocalDate, end: LocalDate) -> Option<DateRange> {
        (start <= end).then_some(DateRange { start, end })
    }

    pub fn day(d: LocalDate) -> DateRange {
        DateRange { start: d, end: d }
    }

    pub fn month(year: i32, month: u32) -> Option<DateRange> {
        month_range(year, month)
    }

    pub fn year(year: i32) -> Option<DateRange> {
        year_range(year)
    }

    pub fn contains(&self, d: LocalDate) -> bool {
        self.start <= d && d <= self.end
    }

    pub fn num_days(&self) -> i64 {
        (self.end - self.start).num_days() + 1
    }

    pub fn days(&self) -> impl Iterator<Item = LocalDate> + '_ {
        self.start.iter_days().take_while(move |d| *d <= self.end)
    }

    /// Number of whole calendar months the range covers exactly, if it starts
    /// on the first of a month and ends on the last day of a month.
    pub fn whole_months(&self) -> Option<u32> {
        let ends_month = self.end.day() == days_in_month(self.end.year(), self.end.month());
        if self.start.day() != 1 || !ends_month {
            return None;
        }
        let months =
            (self.end.year() - self.start.year()) * 12 + self.end.month() as i32 - self.start.month() as i32 + 1;
        Some(months as u32)
    }

    /// The last `n` days ending at `end`, inclusive.
    pub fn trailing_days(end: LocalDate, n: u64) -> Option<DateRange> {
        let start = end.checked_sub_days(Days::new(n.checked_sub(1)?))?;
        Some(DateRange { start, end })
    }
}

impl fmt::Display for DateRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} to {}", self.start, self.end)
    }
}

/// Clock time as minutes since midnight, `0..=1439`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u16", into = "u16")]
pub struct TimeOfDay(u16);

impl TimeOfDay {
    pub fn from_minutes(minutes: u16) -> Option<TimeOfDay> {
        (minutes < 1440).then_some(TimeOfDay(minutes))
    }

    pub fn from_hm(hour: u32, minute: u32) -> Option<TimeOfDay> {
        (hour < 24 && minute < 60).then(|| TimeOfDay((hour * 60 + minute) as u16))
    }

    pub fn minutes(self) -> u16 {
        self.0
    }
}

impl TryFrom<u16> for TimeOfDay {
    type Error = String;

    fn try_from(v: u16) -> Result<Self, Self::Error> {
        TimeOfDay::from_minutes(v).ok_or_else(|| format!("{v} is not a minute of the day"))
    }
}

impl From<TimeOfDay> for u16 {
    fn from(t: TimeOfDay) -> u16 {
        t.0
    }
}

impl fmt::Display for TimeOfDay {
    /// `07:30 AM`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (h, m) = (self.0 / 60, self.0 % 60);
        let meridiem = if h < 12 { "AM" } else { "PM" };
        let h12 = match h % 12 {
            0 => 12,
            h => h,
        };
        write!(f, "{h12:02}:{m:02} {meridiem}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeKind {
    Date,
    Range,
    Clock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TimeValue {
    Date(LocalDate),
    Range(DateRange),
    Clock(TimeOfDay),
}

impl TimeValue {
    pub fn kind(&self) -> TimeKind {
        match self {
            TimeValue::Date(_) => TimeKind::Date,
            TimeValue::Range(_) => TimeKind::Range,
            TimeValue::Clock(_) => TimeKind::Clock,
        }
    }

    /// The period this value denotes; a date is a one-day period.
    pub fn as_period(&self) -> Option<DateRange> {
        match *self {
            TimeValue::Date(d) => Some(DateRange::day(d)),
            TimeValue::Range(r) => Some(r),
            TimeValue::Clock(_) => None,
        }
    }
}

/// A resolved expression and the byte span of the text it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeEntity {
    pub value: TimeValue,
    pub span: Range<usize>,
}

impl TimeEntity {
    pub fn kind(&self) -> TimeKind {
        self.value.kind()
    }
}

static DEFAULT_HOLIDAYS: LazyLock<Arc<HolidayTable>> = LazyLock::new(|| Arc::new(HolidayTable::default()));

/// Anchor for relative expressions. Weeks start on Sunday and seasons are
/// meteorological; both are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceFrame {
    pub reference_date: LocalDate,
    pub holidays: Arc<HolidayTable>,
}

impl ReferenceFrame {
    pub fn new(reference_date: LocalDate) -> ReferenceFrame {
        ReferenceFrame {
            reference_date,
            holidays: DEFAULT_HOLIDAYS.clone(),
        }
    }

    pub fn with_holidays(reference_date: LocalDate, holidays: Arc<HolidayTable>) -> ReferenceFrame {
        ReferenceFrame {
            reference_date,
            holidays,
        }
    }

    /// Frame anchored at today's date in the local timezone.
    pub fn today() -> ReferenceFrame {
        ReferenceFrame::new(chrono::Local::now().date_naive())
    }

    pub fn week_start(&self) -> Weekday {
        Weekday::Sun
    }

    pub fn reference_year(&self) -> i32 {
        self.reference_date.year()
    }
}

/// All maximal, non-overlapping time expressions in `text`, left to right.
pub fn parse_time_expressions(text: &str, frame: &ReferenceFrame) -> Vec<TimeEntity> {
    parse_tokens(&lex::tokenize(text), frame)
}

/// Same as [`parse_time_expressions`] over an already tokenized utterance.
pub fn parse_tokens(tokens: &[Token], frame: &ReferenceFrame) -> Vec<TimeEntity> {
    grammar::Matcher::new(tokens, frame).run()
}

pub fn resolve_holiday(name: &str, year: i32, frame: &ReferenceFrame) -> Result<LocalDate, HolidayError> {
    frame.holidays.resolve(name, year)
}
