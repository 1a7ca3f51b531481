//! Utterance plus interaction context to a single intent.
//!
//! The pipeline is [`normalize`] (tokens, time expressions, lexicon tags),
//! [`extract_parameters`] (sources, periods, cycle, condition, verbs) and
//! [`infer_intent`] (a fixed precedence over the parameters and the context).
//! [`interpret`] runs all three.

mod infer;
mod lexicon;
mod params;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datastore::DataSourceType;
use crate::timeparse::{DateRange, LocalDate, ReferenceFrame, TimeOfDay};

pub use infer::infer_intent;
pub use lexicon::{
    normalize, normalize_with, ComparatorWord, Keyword, Lexicon, LexiconError, Nav, SleepPoint, Tag, Tagged, Unit,
};
pub use params::{extract_parameters, ConditionDraft, DraftOperand, ParameterSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Page {
    Home,
    Detail,
    TwoRange,
    Cyclical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleType {
    DayOfWeek,
    MonthOfYear,
}

impl CycleType {
    pub fn group_count(self) -> usize {
        match self {
            CycleType::DayOfWeek => 7,
            CycleType::MonthOfYear => 12,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CycleType::DayOfWeek => "day of the week",
            CycleType::MonthOfYear => "month",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verb {
    Compare,
    Show,
    Highlight,
    Go,
}

/// One side of a two-range comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonSlot {
    A,
    B,
}

/// Which aggregation plot is pressed: a comparison side or a cycle group
/// (0-based weekday from Sunday, or month index). Written as `"a"`, `"b"`
/// or `"group:N"` on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PlotSlot {
    A,
    B,
    Group(u8),
}

impl From<PlotSlot> for String {
    fn from(s: PlotSlot) -> String {
        match s {
            PlotSlot::A => "a".into(),
            PlotSlot::B => "b".into(),
            PlotSlot::Group(i) => format!("group:{i}"),
        }
    }
}

impl TryFrom<String> for PlotSlot {
    type Error = String;

    fn try_from(s: String) -> Result<PlotSlot, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(PlotSlot::A),
            "b" => Ok(PlotSlot::B),
            other => other
                .strip_prefix("group:")
                .and_then(|n| n.parse().ok())
                .map(PlotSlot::Group)
                .ok_or_else(|| format!("unknown plot slot {s:?}")),
        }
    }
}

/// The element held while speaking, with the value it currently shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PressedElement {
    #[default]
    None,
    StartDateLabel {
        date: LocalDate,
    },
    EndDateLabel {
        date: LocalDate,
    },
    AggregationPlot {
        slot: PlotSlot,
        range: DateRange,
    },
    DataSourceLabel {
        source: DataSourceType,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionContext {
    pub page: Page,
    pub current_range: DateRange,
    pub current_source: Option<DataSourceType>,
    pub comparison_ranges: Option<(DateRange, DateRange)>,
    pub cycle: Option<CycleType>,
    pub pressed: PressedElement,
    pub frame: ReferenceFrame,
}

impl InteractionContext {
    /// Home page showing `range`, nothing pressed.
    pub fn home(range: DateRange, frame: ReferenceFrame) -> InteractionContext {
        InteractionContext {
            page: Page::Home,
            current_range: range,
            current_source: None,
            comparison_ranges: None,
            cycle: None,
            pressed: PressedElement::None,
            frame,
        }
    }

    pub fn detail(source: DataSourceType, range: DateRange, frame: ReferenceFrame) -> InteractionContext {
        InteractionContext {
            page: Page::Detail,
            current_source: Some(source),
            ..InteractionContext::home(range, frame)
        }
    }

    pub fn two_range(source: DataSourceType, a: DateRange, b: DateRange, frame: ReferenceFrame) -> InteractionContext {
        InteractionContext {
            page: Page::TwoRange,
            current_source: Some(source),
            comparison_ranges: Some((a, b)),
            ..InteractionContext::home(b, frame)
        }
    }

    pub fn cyclical(
        source: DataSourceType,
        range: DateRange,
        cycle: CycleType,
        frame: ReferenceFrame,
    ) -> InteractionContext {
        InteractionContext {
            page: Page::Cyclical,
            current_source: Some(source),
            cycle: Some(cycle),
            ..InteractionContext::home(range, frame)
        }
    }

    pub fn pressing(mut self, pressed: PressedElement) -> InteractionContext {
        self.pressed = pressed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aspect {
    Value,
    Bedtime,
    WakeTime,
    GoalRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Lt,
    Lte,
    Gt,
    Gte,
    Min,
    Max,
}

impl Comparator {
    pub fn is_extremum(self) -> bool {
        matches!(self, Comparator::Min | Comparator::Max)
    }

    /// Threshold test; extremum comparators never hold here.
    pub fn holds<T: PartialOrd>(self, lhs: T, rhs: T) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Lte => lhs <= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Gte => lhs >= rhs,
            Comparator::Min | Comparator::Max => false,
        }
    }
}

/// Quantities are in the source's canonical unit: steps, bpm, hours, kg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Operand {
    Quantity(f64),
    Clock(TimeOfDay),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionSpec {
    pub aspect: Aspect,
    pub source: DataSourceType,
    pub comparator: Comparator,
    pub operand: Option<Operand>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("{aspect} applies to {expected}, not {got}")]
    AspectSource {
        aspect: &'static str,
        expected: &'static str,
        got: DataSourceType,
    },
    #[error("a time of day only works with bedtime or wake time")]
    ClockOperand,
    #[error("{0} needs a number")]
    QuantityOperand(&'static str),
    #[error("minimum and maximum take no value")]
    ExtremumOperand,
    #[error("this comparison needs a value")]
    MissingOperand,
    #[error("the step goal is compared with at least")]
    GoalComparator,
}

impl ConditionSpec {
    pub fn validate(&self) -> Result<(), ConditionError> {
        use ConditionError::*;
        match self.aspect {
            Aspect::Bedtime | Aspect::WakeTime if self.source != DataSourceType::SleepRange => {
                return Err(AspectSource {
                    aspect: self.aspect_label(),
                    expected: DataSourceType::SleepRange.label(),
                    got: self.source,
                })
            }
            Aspect::Value if !self.source.is_numeric() => {
                return Err(AspectSource {
                    aspect: "a daily value",
                    expected: "a numeric data source",
                    got: self.source,
                })
            }
            Aspect::GoalRef if self.source != DataSourceType::StepCount => {
                return Err(AspectSource {
                    aspect: "the step goal",
                    expected: DataSourceType::StepCount.label(),
                    got: self.source,
                })
            }
            Aspect::GoalRef if self.comparator != Comparator::Gte => return Err(GoalComparator),
            _ => {}
        }
        let clock_aspect = matches!(self.aspect, Aspect::Bedtime | Aspect::WakeTime);
        match self.operand {
            Some(_) if self.comparator.is_extremum() => Err(ExtremumOperand),
            None if !self.comparator.is_extremum() && self.aspect != Aspect::GoalRef => Err(MissingOperand),
            Some(Operand::Clock(_)) if !clock_aspect => Err(ClockOperand),
            Some(Operand::Quantity(_)) if clock_aspect => Err(QuantityOperand("a time of day")),
            Some(Operand::Quantity(q)) if !q.is_finite() => Err(QuantityOperand(self.source.label())),
            _ => Ok(()),
        }
    }

    /// Query-bar chip for the aspect.
    pub fn aspect_label(&self) -> &'static str {
        match self.aspect {
            Aspect::Bedtime => "bedtime",
            Aspect::WakeTime => "wake time",
            Aspect::GoalRef => "step goal",
            Aspect::Value => match self.source {
                DataSourceType::StepCount => "steps",
                DataSourceType::RestingHeartRate => "resting heart rate",
                DataSourceType::HoursSlept => "hours slept",
                DataSourceType::Weight => "weight",
                DataSourceType::SleepRange => "sleep range",
            },
        }
    }

    /// Query-bar chip for the comparator.
    pub fn comparator_label(&self) -> &'static str {
        let clock = matches!(self.aspect, Aspect::Bedtime | Aspect::WakeTime);
        match (self.comparator, clock) {
            (Comparator::Lt, false) => "less than",
            (Comparator::Lte, false) => "at most",
            (Comparator::Gt, false) => "more than",
            (Comparator::Gte, false) => "at least",
            (Comparator::Lt, true) => "earlier than",
            (Comparator::Lte, true) => "no later than",
            (Comparator::Gt, true) => "later than",
            (Comparator::Gte, true) => "no earlier than",
            (Comparator::Min, false) => "minimum",
            (Comparator::Max, false) => "maximum",
            (Comparator::Min, true) => "earliest",
            (Comparator::Max, true) => "latest",
        }
    }

    /// Query-bar chip for the operand, if any.
    pub fn operand_label(&self) -> Option<String> {
        Some(match self.operand? {
            Operand::Clock(t) => t.to_string(),
            Operand::Quantity(q) => {
                let n = format_number(q);
                match self.source {
                    DataSourceType::StepCount => n,
                    DataSourceType::RestingHeartRate => format!("{n} bpm"),
                    DataSourceType::HoursSlept => format!("{n} hours"),
                    DataSourceType::Weight => format!("{n} kg"),
                    DataSourceType::SleepRange => n,
                }
            }
        })
    }
}

impl fmt::Display for ConditionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.aspect_label(), self.comparator_label())?;
        match self.operand_label() {
            Some(op) => write!(f, " {op}"),
            None => Ok(()),
        }
    }
}

/// Shortest decimal form, at most two places.
pub fn format_number(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        format!("{r}")
    }
}

/// A replacement for one query-bar chip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "param", rename_all = "snake_case")]
pub enum QueryParamEdit {
    Aspect { aspect: Aspect, source: DataSourceType },
    Comparator { comparator: Comparator },
    Operand { operand: Option<Operand> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Intent {
    SetRange {
        range: DateRange,
    },
    SetStartDate {
        date: LocalDate,
    },
    SetEndDate {
        date: LocalDate,
    },
    SetDataSource {
        source: DataSourceType,
    },
    NavigateDetail {
        source: DataSourceType,
        range: DateRange,
    },
    CompareTwoRanges {
        source: DataSourceType,
        range_a: DateRange,
        range_b: DateRange,
    },
    ReplaceComparisonRange {
        slot: ComparisonSlot,
        range: DateRange,
    },
    CompareCyclical {
        source: DataSourceType,
        range: DateRange,
        cycle: CycleType,
    },
    RunQuery {
        condition: ConditionSpec,
        range: Option<DateRange>,
    },
    EditQueryParam {
        edit: QueryParamEdit,
    },
    DismissQuery,
    GoHome,
    Undo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidReason {
    MissingPeriods,
    AmbiguousSlot,
    UnsupportedOnPage,
    IncompatibleParameter,
    UnknownDataSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum InterpretOutcome {
    Ok {
        intent: Intent,
        /// Set when no data source was named or shown and Step Count was assumed.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        assumed_source: bool,
    },
    Invalid {
        reason: InvalidReason,
        message: String,
        suggestion: Option<String>,
    },
    Unrecognized {
        text: String,
    },
}

impl InterpretOutcome {
    pub fn intent(&self) -> Option<&Intent> {
        match self {
            InterpretOutcome::Ok { intent, .. } => Some(intent),
            _ => None,
        }
    }

    pub fn invalid_reason(&self) -> Option<InvalidReason> {
        match self {
            InterpretOutcome::Invalid { reason, .. } => Some(*reason),
            _ => None,
        }
    }
}

/// Full pipeline over the built-in lexicon. Pure in `(text, ctx)`.
pub fn interpret(text: &str, ctx: &InteractionContext) -> InterpretOutcome {
    interpret_with(text, ctx, Lexicon::builtin())
}

pub fn interpret_with(text: &str, ctx: &InteractionContext, lexicon: &Lexicon) -> InterpretOutcome {
    if text.trim().is_empty() {
        return InterpretOutcome::Unrecognized { text: text.to_string() };
    }
    match infer_intent(&extract_parameters(&normalize_with(text, &ctx.frame, lexicon)), ctx) {
        InterpretOutcome::Unrecognized { .. } => InterpretOutcome::Unrecognized { text: text.to_string() },
        other => other,
    }
}
