//! Front ends: the serialized state view, the REPL and the HTTP service.

mod http;
mod repl;

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datastore::{generate_fixture, DataError, DataSourceType, Dataset, Record};
use crate::interpreter::{format_number, ConditionSpec, CycleType, Page};
use crate::queryengine::{
    aggregate, compare_cyclical, compare_two_ranges, Aggregate, ClockStats, CyclicalComparisonResult,
    TwoRangeComparisonResult,
};
use crate::session::{describe_range, Feedback, Session};
use crate::timeparse::{DateRange, LocalDate, TimeOfDay};

pub use http::{router, serve, AppState, CommandEnvelope, SESSION_IDLE_LIMIT};
pub use repl::{run_repl, Repl, ReplOutput};

/// One chart: the daily records of a source over the visible range plus
/// their aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartView {
    pub source: DataSourceType,
    pub records: Vec<Record>,
    pub stats: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryBarView {
    pub condition: ConditionSpec,
    pub aspect: String,
    pub comparator: String,
    pub operand: Option<String>,
    pub count: usize,
}

/// Everything a front end needs to draw the current page.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub page: Page,
    pub reference_date: LocalDate,
    pub range: DateRange,
    pub source: Option<DataSourceType>,
    pub comparison: Option<(DateRange, DateRange)>,
    pub cycle: Option<CycleType>,
    /// Home: all five sources. Detail: the selected one. Comparison pages: none.
    pub charts: Vec<ChartView>,
    pub two_range: Option<TwoRangeComparisonResult>,
    pub cyclical: Option<CyclicalComparisonResult>,
    pub highlight: Vec<LocalDate>,
    pub query_bar: Option<QueryBarView>,
    pub can_undo: bool,
}

impl StateView {
    pub fn of(session: &Session) -> StateView {
        let s = session.state();
        let ds = session.dataset();
        let chart = |source| ChartView {
            source,
            records: ds.get_range(source, s.range),
            stats: aggregate(ds, source, s.range),
        };
        let charts = match (s.page, s.source) {
            (Page::Home, _) => DataSourceType::ALL.iter().map(|&src| chart(src)).collect(),
            (Page::Detail, Some(src)) => vec![chart(src)],
            _ => Vec::new(),
        };
        let two_range = match (s.page, s.source, s.comparison) {
            (Page::TwoRange, Some(src), Some((a, b))) => Some(compare_two_ranges(ds, src, a, b)),
            _ => None,
        };
        let cyclical = match (s.page, s.source, s.cycle) {
            (Page::Cyclical, Some(src), Some(c)) => Some(compare_cyclical(ds, src, s.range, c)),
            _ => None,
        };
        StateView {
            page: s.page,
            reference_date: s.frame.reference_date,
            range: s.range,
            source: s.source,
            comparison: s.comparison,
            cycle: s.cycle,
            charts,
            two_range,
            cyclical,
            highlight: s.active_query.iter().flat_map(|q| q.dates.iter().copied()).collect(),
            query_bar: s.active_query.as_ref().map(|q| QueryBarView {
                condition: q.condition,
                aspect: q.condition.aspect_label().to_string(),
                comparator: q.condition.comparator_label().to_string(),
                operand: q.condition.operand_label(),
                count: q.count,
            }),
            can_undo: session.undo_depth() > 0,
        }
    }

    /// Plain-text rendering used by the REPL.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let page = match self.page {
            Page::Home => "Home".to_string(),
            Page::Detail => format!("Detail: {}", self.source.map_or("?", |s| s.label())),
            Page::TwoRange => format!("Two-range comparison: {}", self.source.map_or("?", |s| s.label())),
            Page::Cyclical => format!(
                "Cyclical comparison: {} by {}",
                self.source.map_or("?", |s| s.label()),
                self.cycle.map_or("?", |c| c.label())
            ),
        };
        let _ = writeln!(out, "[{page}]");
        if self.page != Page::TwoRange {
            let _ = writeln!(out, "  range: {}", self.range);
        }
        for c in &self.charts {
            let days = c
                .records
                .iter()
                .map(|r| r.date())
                .filter(|d| self.highlight.contains(d))
                .count();
            let marks = if days > 0 {
                format!("  ({days} highlighted)")
            } else {
                String::new()
            };
            let _ = writeln!(out, "  {:<19} {}{marks}", c.source.label(), stats_line(&c.stats));
        }
        if let Some(t) = &self.two_range {
            let _ = writeln!(out, "  A {:<24} {}", describe_range(t.range_a), stats_line(&t.stats_a));
            let _ = writeln!(out, "  B {:<24} {}", describe_range(t.range_b), stats_line(&t.stats_b));
        }
        if let Some(c) = &self.cyclical {
            for g in &c.groups {
                let _ = writeln!(out, "  {:<4} {}", g.label, stats_line(&g.stats));
            }
        }
        if let Some(q) = &self.query_bar {
            let mut chips = vec![q.aspect.clone(), q.comparator.clone()];
            chips.extend(q.operand.clone());
            chips.push(format!("{} days", q.count));
            let _ = writeln!(out, "  query: {}", chips.join(" | "));
        }
        out
    }
}

fn clock(m: f64) -> String {
    let wrapped = (m.round() as i64).rem_euclid(1440) as u16;
    TimeOfDay::from_minutes(wrapped).map_or_else(String::new, |t| t.to_string())
}

fn clock_stats(c: &Option<ClockStats>) -> String {
    c.as_ref().map_or_else(
        || "-".to_string(),
        |c| {
            format!(
                "avg {} ({} to {})",
                clock(c.avg),
                clock(c.earliest as f64),
                clock(c.latest as f64)
            )
        },
    )
}

fn stats_line(a: &Aggregate) -> String {
    match a {
        Aggregate::Numeric(s) => match (s.avg, s.min, s.max) {
            (Some(avg), Some(min), Some(max)) => {
                let mut line = format!(
                    "n={} avg={} min={} max={}",
                    s.n,
                    format_number(avg),
                    format_number(min),
                    format_number(max)
                );
                if let Some(sum) = s.sum {
                    let _ = write!(line, " total={}", format_number(sum));
                }
                line
            }
            _ => "n=0".to_string(),
        },
        Aggregate::Sleep(s) if s.n == 0 => "n=0".to_string(),
        Aggregate::Sleep(s) => format!(
            "n={} bed {} wake {}",
            s.n,
            clock_stats(&s.bedtime),
            clock_stats(&s.waketime)
        ),
    }
}

/// One line per feedback kind, as the REPL prints it.
pub fn render_feedback(fb: &Feedback) -> String {
    match fb {
        Feedback::Executed { summary, undoable } => {
            if *undoable {
                format!("OK: {summary} (:undo to revert)")
            } else {
                format!("OK: {summary}")
            }
        }
        Feedback::InvalidDialog {
            message, suggestion, ..
        } => match suggestion {
            Some(s) => format!("INVALID: {message} Try: {s}"),
            None => format!("INVALID: {message}"),
        },
        Feedback::UnrecognizedNotice { text } => format!("UNRECOGNIZED: could not understand {text:?}"),
    }
}

/// Parses `2016-01-01..2020-08-27`.
pub fn parse_span(s: &str) -> Result<DateRange, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected START..END, got {s:?}"))?;
    let date = |t: &str| LocalDate::parse_from_str(t.trim(), "%Y-%m-%d").map_err(|_| format!("bad date {t:?}"));
    let (a, b) = (date(a)?, date(b)?);
    DateRange::new(a, b).ok_or_else(|| format!("span start {a} is after end {b}"))
}

/// Loads `dir` if given, otherwise generates the seeded fixture over `span`.
pub fn load_dataset(dir: Option<&Path>, seed: u64, span: DateRange) -> Result<Dataset, DataError> {
    match dir {
        Some(dir) => Dataset::load_dir(dir),
        None => Ok(generate_fixture(seed, span)),
    }
}
