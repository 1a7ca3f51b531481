//! Token-level matcher for time expressions.
//!
//! At each position every rule is tried and the longest match wins; the scan
//! then resumes after it, so entities never overlap. Range connectors
//! ("from X to Y", "between X and Y", "since X", "X to Y" for two dates) are
//! tried before single expressions.

use chrono::{Datelike, Days, Months, Weekday};

use super::calendar::{date, month_range, resolve_season, week_range, year_range, Season};
use super::{DateRange, LocalDate, ReferenceFrame, TimeEntity, TimeOfDay, TimeValue};
use crate::lex::{Token, TokenKind};

const MONTHS: &[(&str, u32)] = &[
    ("january", 1),
    ("jan", 1),
    ("february", 2),
    ("feb", 2),
    ("march", 3),
    ("mar", 3),
    ("april", 4),
    ("apr", 4),
    ("may", 5),
    ("june", 6),
    ("jun", 6),
    ("july", 7),
    ("jul", 7),
    ("august", 8),
    ("aug", 8),
    ("september", 9),
    ("sept", 9),
    ("sep", 9),
    ("october", 10),
    ("oct", 10),
    ("november", 11),
    ("nov", 11),
    ("december", 12),
    ("dec", 12),
];

const WEEKDAYS: &[(&str, Weekday)] = &[
    ("sunday", Weekday::Sun),
    ("monday", Weekday::Mon),
    ("tuesday", Weekday::Tue),
    ("wednesday", Weekday::Wed),
    ("thursday", Weekday::Thu),
    ("friday", Weekday::Fri),
    ("saturday", Weekday::Sat),
];

/// Words after which a four-digit number is a quantity, not a year.
const UNIT_WORDS: &[&str] = &[
    "steps",
    "step",
    "bpm",
    "beats",
    "hours",
    "hour",
    "hrs",
    "hr",
    "minutes",
    "minute",
    "mins",
    "min",
    "kg",
    "kgs",
    "kilograms",
    "kilogram",
    "kilos",
    "lb",
    "lbs",
    "pound",
    "pounds",
    "calories",
    "cal",
    "times",
    "percent",
    "miles",
    "km",
    "meters",
];

const COMPARATOR_WORDS: &[&str] = &[
    "than",
    "over",
    "under",
    "above",
    "below",
    "least",
    "most",
    "exceeding",
    "exactly",
    "about",
];

/// Left neighbours that make "may" a month.
const MAY_CONTEXT: &[&str] = &[
    "in", "of", "during", "since", "from", "until", "till", "to", "through", "last", "this", "next", "early", "late",
    "mid", "and", "with", "versus", "vs", "between", "for", "before", "after", "compare", "and", "or", "previous",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Last,
    This,
    Next,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Day,
    Week,
    Month,
    Year,
}

struct Hit {
    value: TimeValue,
    end: usize,
}

fn hit(value: TimeValue, end: usize) -> Option<Hit> {
    Some(Hit { value, end })
}

pub(super) struct Matcher<'a> {
    toks: &'a [Token],
    frame: &'a ReferenceFrame,
}

impl<'a> Matcher<'a> {
    pub(super) fn new(toks: &'a [Token], frame: &'a ReferenceFrame) -> Self {
        Matcher { toks, frame }
    }

    pub(super) fn run(&self) -> Vec<TimeEntity> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.toks.len() {
            match self.compound(i).or_else(|| self.primary(i)) {
                Some(h) if h.end > i => {
                    out.push(TimeEntity {
                        value: h.value,
                        span: self.toks[i].span.start..self.toks[h.end - 1].span.end,
                    });
                    i = h.end;
                }
                _ => i += 1,
            }
        }
        out
    }

    fn refdate(&self) -> LocalDate {
        self.frame.reference_date
    }

    fn word(&self, i: usize) -> Option<&str> {
        self.toks.get(i).and_then(Token::word)
    }

    fn is(&self, i: usize, w: &str) -> bool {
        self.toks.get(i).is_some_and(|t| t.text == w)
    }

    fn is_punct(&self, i: usize, c: char) -> bool {
        self.toks.get(i).is_some_and(|t| t.kind == TokenKind::Punct(c))
    }

    fn rel_at(&self, i: usize) -> Option<Rel> {
        match self.word(i)? {
            "last" | "previous" => Some(Rel::Last),
            "this" | "current" => Some(Rel::This),
            "next" | "coming" => Some(Rel::Next),
            _ => None,
        }
    }

    fn unit_at(&self, i: usize) -> Option<Unit> {
        match self.word(i)? {
            "day" | "days" => Some(Unit::Day),
            "week" | "weeks" => Some(Unit::Week),
            "month" | "months" => Some(Unit::Month),
            "year" | "years" => Some(Unit::Year),
            _ => None,
        }
    }

    fn day_at(&self, i: usize) -> Option<u32> {
        match self.toks.get(i)?.kind {
            TokenKind::Ordinal(d) if (1..=31).contains(&d) => Some(d),
            TokenKind::Number { value, digits }
                if digits <= 2 && value.fract() == 0.0 && (1.0..=31.0).contains(&value) =>
            {
                Some(value as u32)
            }
            _ => None,
        }
    }

    fn year_at(&self, i: usize) -> Option<i32> {
        let TokenKind::Number { value, digits: 4 } = self.toks.get(i)?.kind else {
            return None;
        };
        let y = value as i32;
        if !(1900..=2100).contains(&y) {
            return None;
        }
        if self.word(i + 1).is_some_and(|w| UNIT_WORDS.contains(&w)) {
            return None;
        }
        if i > 0 && self.word(i - 1).is_some_and(|w| COMPARATOR_WORDS.contains(&w)) {
            return None;
        }
        Some(y)
    }

    fn month_at(&self, i: usize) -> Option<u32> {
        let w = self.word(i)?;
        let (_, m) = MONTHS.iter().find(|(k, _)| *k == w)?;
        if w == "may" && !self.may_is_month(i) {
            return None;
        }
        Some(*m)
    }

    fn may_is_month(&self, i: usize) -> bool {
        if self.toks.len() == 1 {
            return true;
        }
        if self.day_at(i + 1).is_some() || self.year_at(i + 1).is_some() {
            return true;
        }
        if i == 0 {
            return false;
        }
        self.day_at(i - 1).is_some() || self.word(i - 1).is_some_and(|w| MAY_CONTEXT.contains(&w))
    }

    fn season_at(&self, i: usize) -> Option<Season> {
        let s = Season::from_name(self.word(i)?)?;
        if s == Season::Fall && self.is(i + 1, "asleep") {
            return None;
        }
        Some(s)
    }

    fn weekday_at(&self, i: usize) -> Option<Weekday> {
        let w = self.word(i)?;
        WEEKDAYS.iter().find(|(k, _)| *k == w).map(|(_, d)| *d)
    }

    fn primary(&self, i: usize) -> Option<Hit> {
        let rules: [fn(&Self, usize) -> Option<Hit>; 12] = [
            Self::iso,
            Self::slash,
            Self::deictic,
            Self::relative_unit,
            Self::ago,
            Self::month_expr,
            Self::day_of_month,
            Self::season_expr,
            Self::year_expr,
            Self::weekday_expr,
            Self::holiday_expr,
            Self::clock,
        ];
        let mut best: Option<Hit> = None;
        for rule in rules {
            if let Some(h) = rule(self, i) {
                if best.as_ref().is_none_or(|b| h.end > b.end) {
                    best = Some(h);
                }
            }
        }
        best
    }

    fn period_at(&self, i: usize) -> Option<(DateRange, Hit)> {
        let h = self.primary(i).or_else(|| {
            // "now" only closes an explicit range
            matches!(self.word(i), Some("now" | "present")).then(|| Hit {
                value: TimeValue::Date(self.refdate()),
                end: i + 1,
            })
        })?;
        Some((h.value.as_period()?, h))
    }

    fn compound(&self, i: usize) -> Option<Hit> {
        let to_connector = |j: usize| {
            matches!(self.word(j), Some("to" | "until" | "till" | "through" | "thru")) || self.is_punct(j, '-')
        };
        match self.word(i) {
            Some("from") => {
                let (a, x) = self.period_at(i + 1)?;
                if !to_connector(x.end) {
                    return None;
                }
                let (b, y) = self.period_at(x.end + 1)?;
                hit(TimeValue::Range(DateRange::new(a.start, b.end)?), y.end)
            }
            Some("between") => {
                let (a, x) = self.period_at(i + 1)?;
                if !self.is(x.end, "and") {
                    return None;
                }
                let (b, y) = self.period_at(x.end + 1)?;
                hit(TimeValue::Range(DateRange::new(a.start, b.end)?), y.end)
            }
            Some("since") => {
                let (a, x) = self.period_at(i + 1)?;
                hit(TimeValue::Range(DateRange::new(a.start, self.refdate())?), x.end)
            }
            _ => {
                let x = self.primary(i)?;
                let TimeValue::Date(a) = x.value else { return None };
                if !to_connector(x.end) {
                    return None;
                }
                let (b, y) = self.period_at(x.end + 1)?;
                if !matches!(y.value, TimeValue::Date(_)) {
                    return None;
                }
                hit(TimeValue::Range(DateRange::new(a, b.end)?), y.end)
            }
        }
    }

    fn iso(&self, i: usize) -> Option<Hit> {
        let TokenKind::IsoDate(y, m, d) = self.toks.get(i)?.kind else {
            return None;
        };
        hit(TimeValue::Date(date(y, m, d)?), i + 1)
    }

    fn slash(&self, i: usize) -> Option<Hit> {
        let TokenKind::SlashDate(m, d, y) = self.toks.get(i)?.kind else {
            return None;
        };
        let day = match y {
            Some(y) => date(y, m, d)?,
            None => self.yearless_date(m, d)?,
        };
        hit(TimeValue::Date(day), i + 1)
    }

    fn deictic(&self, i: usize) -> Option<Hit> {
        let r = self.refdate();
        let d = match self.word(i)? {
            "today" => r,
            "yesterday" => r.pred_opt()?,
            "tomorrow" => r.succ_opt()?,
            _ => return None,
        };
        hit(TimeValue::Date(d), i + 1)
    }

    /// "last 30 days", "past week", "last month", "this year", "next week".
    fn relative_unit(&self, i: usize) -> Option<Hit> {
        let mut j = i;
        if self.is(j, "the") {
            j += 1;
        }
        let lead = self.word(j)?;
        if !matches!(
            lead,
            "last" | "previous" | "past" | "this" | "current" | "next" | "coming"
        ) {
            return None;
        }
        j += 1;
        let count = self
            .toks
            .get(j)
            .and_then(Token::integer)
            .filter(|n| (1..=10_000).contains(n));
        if count.is_some() {
            j += 1;
        }
        let unit = self.unit_at(j)?;
        let end = j + 1;
        let r = self.refdate();
        let value = match (lead, count) {
            ("last" | "previous" | "past", Some(n)) => TimeValue::Range(self.window(unit, n as u32)?),
            ("past", None) => TimeValue::Range(self.window(unit, 1)?),
            ("this" | "current", None) => self.calendar_unit(unit, r)?,
            ("last" | "previous", None) => self.calendar_unit(unit, shift(unit, r, -1)?)?,
            ("next" | "coming", None) => self.calendar_unit(unit, shift(unit, r, 1)?)?,
            ("next" | "coming", Some(n)) => {
                let start = r.succ_opt()?;
                let last = shift(unit, r, n as i32)?;
                TimeValue::Range(DateRange::new(start, last)?)
            }
            _ => return None,
        };
        hit(value, end)
    }

    /// Inclusive window of `n` units ending at the reference date.
    fn window(&self, unit: Unit, n: u32) -> Option<DateRange> {
        let r = self.refdate();
        let start = match unit {
            Unit::Day => return DateRange::trailing_days(r, n as u64),
            Unit::Week => return DateRange::trailing_days(r, n as u64 * 7),
            Unit::Month => r.checked_sub_months(Months::new(n))?.succ_opt()?,
            Unit::Year => r.checked_sub_months(Months::new(n.checked_mul(12)?))?.succ_opt()?,
        };
        DateRange::new(start, r)
    }

    fn calendar_unit(&self, unit: Unit, d: LocalDate) -> Option<TimeValue> {
        Some(match unit {
            Unit::Day => TimeValue::Date(d),
            Unit::Week => TimeValue::Range(week_range(d)?),
            Unit::Month => TimeValue::Range(month_range(d.year(), d.month())?),
            Unit::Year => TimeValue::Range(year_range(d.year())?),
        })
    }

    /// "3 days ago", "a week ago".
    fn ago(&self, i: usize) -> Option<Hit> {
        let n = if self.is(i, "a") || self.is(i, "one") {
            1
        } else {
            self.toks.get(i)?.integer().filter(|n| (1..=10_000).contains(n))?
        };
        let unit = self.unit_at(i + 1)?;
        if !self.is(i + 2, "ago") {
            return None;
        }
        hit(TimeValue::Date(shift(unit, self.refdate(), -(n as i32))?), i + 3)
    }

    /// "January", "last August", "January 1", "January 1, 2019", "March 2020",
    /// "January of 2018".
    fn month_expr(&self, i: usize) -> Option<Hit> {
        let rel = self.rel_at(i);
        let j = if rel.is_some() { i + 1 } else { i };
        let m = self.month_at(j)?;

        if let Some(d) = self.day_at(j + 1) {
            let mut k = j + 2;
            if self.is_punct(k, ',') && self.year_at(k + 1).is_some() {
                k += 1;
            }
            if let Some(y) = self.year_at(k) {
                if let Some(day) = date(y, m, d) {
                    return hit(TimeValue::Date(day), k + 1);
                }
            }
            let day = match rel {
                Some(rel) => date(self.month_year(rel, m), m, d),
                None => self.yearless_date(m, d),
            };
            if let Some(day) = day {
                return hit(TimeValue::Date(day), j + 2);
            }
        }

        let k = j + 1;
        let explicit = if self.is(k, "of") || self.is_punct(k, ',') {
            self.year_at(k + 1).map(|y| (y, k + 2))
        } else {
            self.year_at(k).map(|y| (y, k + 1))
        };
        if let Some((y, end)) = explicit {
            return hit(TimeValue::Range(month_range(y, m)?), end);
        }
        let y = match rel {
            Some(rel) => self.month_year(rel, m),
            None if m <= self.refdate().month() => self.frame.reference_year(),
            None => self.frame.reference_year() - 1,
        };
        hit(TimeValue::Range(month_range(y, m)?), j + 1)
    }

    /// "1st of January", "the 4th of July 2019", "1 January 2019".
    fn day_of_month(&self, i: usize) -> Option<Hit> {
        let mut j = i;
        if self.is(j, "the") {
            j += 1;
        }
        let d = self.day_at(j)?;
        let ordinal = matches!(self.toks[j].kind, TokenKind::Ordinal(_));
        j += 1;
        if ordinal && self.is(j, "of") {
            j += 1;
        }
        let m = self.month_at(j)?;
        j += 1;
        let mut k = j;
        if self.is_punct(k, ',') && self.year_at(k + 1).is_some() {
            k += 1;
        }
        if let Some(y) = self.year_at(k) {
            if let Some(day) = date(y, m, d) {
                return hit(TimeValue::Date(day), k + 1);
            }
        }
        hit(TimeValue::Date(self.yearless_date(m, d)?), j)
    }

    /// "summer", "this summer", "last winter", "summer 2019", "summer of 2019",
    /// "summer this year".
    fn season_expr(&self, i: usize) -> Option<Hit> {
        let rel = self.rel_at(i);
        let j = if rel.is_some() { i + 1 } else { i };
        let s = self.season_at(j)?;
        let mut k = j + 1;
        if self.is(k, "of") {
            k += 1;
        }
        if let Some(y) = self.year_at(k) {
            return hit(TimeValue::Range(resolve_season(s, y)?), k + 1);
        }
        if self.is(k + 1, "year") {
            let y = self.frame.reference_year();
            match self.word(k) {
                Some("this") => return hit(TimeValue::Range(resolve_season(s, y)?), k + 2),
                Some("last") => return hit(TimeValue::Range(resolve_season(s, y - 1)?), k + 2),
                _ => {}
            }
        }
        hit(TimeValue::Range(self.season_occurrence(s, rel)?), j + 1)
    }

    fn year_expr(&self, i: usize) -> Option<Hit> {
        let mut j = i;
        if self.is(j, "the") && self.is(j + 1, "year") {
            j += 1;
        }
        if self.is(j, "year") && self.year_at(j + 1).is_some() {
            j += 1;
        }
        let y = self.year_at(j)?;
        hit(TimeValue::Range(year_range(y)?), j + 1)
    }

    fn weekday_expr(&self, i: usize) -> Option<Hit> {
        let rel = self.rel_at(i);
        let j = if rel.is_some() { i + 1 } else { i };
        let wd = self.weekday_at(j)?;
        let r = self.refdate();
        let (today, target) = (
            r.weekday().num_days_from_sunday() as i64,
            wd.num_days_from_sunday() as i64,
        );
        let offset = match rel {
            None => -(today - target).rem_euclid(7),
            Some(Rel::Last) => -((today - target - 1).rem_euclid(7) + 1),
            Some(Rel::This) => target - today,
            Some(Rel::Next) => (target - today - 1).rem_euclid(7) + 1,
        };
        let d = if offset >= 0 {
            r.checked_add_days(Days::new(offset as u64))?
        } else {
            r.checked_sub_days(Days::new((-offset) as u64))?
        };
        hit(TimeValue::Date(d), j + 1)
    }

    fn holiday_expr(&self, i: usize) -> Option<Hit> {
        let rel = self.rel_at(i);
        let j = if rel.is_some() { i + 1 } else { i };
        let (name, len) = self
            .frame
            .holidays
            .aliases()
            .iter()
            .filter(|(words, _)| {
                words.len() <= self.toks.len().saturating_sub(j)
                    && words.iter().enumerate().all(|(o, w)| self.toks[j + o].text == *w)
            })
            .max_by_key(|(words, _)| words.len())
            .map(|(words, name)| (name.as_str(), words.len()))?;
        let k = j + len;
        let holidays = &self.frame.holidays;
        if let Some(y) = self.year_at(k) {
            if let Ok(d) = holidays.resolve(name, y) {
                return hit(TimeValue::Date(d), k + 1);
            }
        }
        let r = self.refdate();
        let y0 = self.frame.reference_year();
        let resolve = |y: i32| holidays.resolve(name, y).ok();
        let d = match rel {
            None => (y0 - 2..=y0).rev().filter_map(resolve).find(|d| *d <= r),
            Some(Rel::Last) => (y0 - 2..=y0).rev().filter_map(resolve).find(|d| *d < r),
            Some(Rel::This) => resolve(y0),
            Some(Rel::Next) => (y0..=y0 + 2).filter_map(resolve).find(|d| *d > r),
        }?;
        hit(TimeValue::Date(d), k)
    }

    /// "7:30 AM", "7:30", "7 pm", "7 o'clock", "noon", "midnight".
    fn clock(&self, i: usize) -> Option<Hit> {
        let t = self.toks.get(i)?;
        match t.kind {
            TokenKind::Clock(h, m) => {
                if let Some((pm, end)) = self.meridiem(i + 1) {
                    let t = twelve_hour(h, m, pm)?;
                    return hit(TimeValue::Clock(t), end);
                }
                hit(TimeValue::Clock(TimeOfDay::from_hm(h, m)?), i + 1)
            }
            TokenKind::Number { value, digits } if digits <= 2 && value.fract() == 0.0 => {
                let h = value as u32;
                if let Some((pm, end)) = self.meridiem(i + 1) {
                    return hit(TimeValue::Clock(twelve_hour(h, 0, pm)?), end);
                }
                if self.is(i + 1, "o'clock") {
                    return hit(TimeValue::Clock(TimeOfDay::from_hm(h, 0)?), i + 2);
                }
                None
            }
            TokenKind::Word => match t.text.as_str() {
                "noon" | "midday" => hit(TimeValue::Clock(TimeOfDay::from_hm(12, 0)?), i + 1),
                "midnight" => hit(TimeValue::Clock(TimeOfDay::from_hm(0, 0)?), i + 1),
                _ => None,
            },
            _ => None,
        }
    }

    /// `am`/`pm`/`a.m.`/`p.m.` → (is_pm, end).
    fn meridiem(&self, i: usize) -> Option<(bool, usize)> {
        match self.word(i)? {
            "am" => return Some((false, i + 1)),
            "pm" => return Some((true, i + 1)),
            _ => {}
        }
        let pm = match self.word(i)? {
            "a" => false,
            "p" => true,
            _ => return None,
        };
        if !(self.is_punct(i + 1, '.') && self.is(i + 2, "m")) {
            return None;
        }
        let end = if self.is_punct(i + 3, '.') { i + 4 } else { i + 3 };
        Some((pm, end))
    }

    fn month_year(&self, rel: Rel, m: u32) -> i32 {
        let (y, cur) = (self.frame.reference_year(), self.refdate().month());
        match rel {
            Rel::Last if m < cur => y,
            Rel::Last => y - 1,
            Rel::This => y,
            Rel::Next if m > cur => y,
            Rel::Next => y + 1,
        }
    }

    /// Most recent occurrence of month/day on or before the reference date.
    fn yearless_date(&self, m: u32, d: u32) -> Option<LocalDate> {
        let r = self.refdate();
        (0..8)
            .filter_map(|back| date(r.year() - back, m, d))
            .find(|day| *day <= r)
    }

    fn season_occurrence(&self, s: Season, rel: Option<Rel>) -> Option<DateRange> {
        let r = self.refdate();
        let y0 = self.frame.reference_year();
        let recent = || (y0 - 2..=y0 + 1).rev().filter_map(|y| resolve_season(s, y));
        match rel {
            None => recent().find(|x| x.start <= r),
            Some(Rel::Last) => recent().find(|x| x.end < r),
            Some(Rel::This) => resolve_season(s, y0),
            Some(Rel::Next) => (y0 - 1..=y0 + 2)
                .filter_map(|y| resolve_season(s, y))
                .find(|x| x.start > r),
        }
    }
}

fn twelve_hour(h: u32, m: u32, pm: bool) -> Option<TimeOfDay> {
    if !(1..=12).contains(&h) {
        return None;
    }
    let h24 = match (h, pm) {
        (12, false) => 0,
        (12, true) => 12,
        (h, false) => h,
        (h, true) => h + 12,
    };
    TimeOfDay::from_hm(h24, m)
}

fn shift(unit: Unit, d: LocalDate, n: i32) -> Option<LocalDate> {
    let mag = n.unsigned_abs();
    match (unit, n >= 0) {
        (Unit::Day, true) => d.checked_add_days(Days::new(mag as u64)),
        (Unit::Day, false) => d.checked_sub_days(Days::new(mag as u64)),
        (Unit::Week, true) => d.checked_add_days(Days::new(mag as u64 * 7)),
        (Unit::Week, false) => d.checked_sub_days(Days::new(mag as u64 * 7)),
        (Unit::Month, true) => d.checked_add_months(Months::new(mag)),
        (Unit::Month, false) => d.checked_sub_months(Months::new(mag)),
        (Unit::Year, true) => d.checked_add_months(Months::new(mag.checked_mul(12)?)),
        (Unit::Year, false) => d.checked_sub_months(Months::new(mag.checked_mul(12)?)),
    }
}
