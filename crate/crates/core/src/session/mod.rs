//! Exploration state, intent dispatch, feedback and undo.
//!
//! A [`Session`] owns one [`ExplorationState`] and its undo stack. Every
//! front end goes through [`Session::dispatch`] (typed intents),
//! [`Session::handle_utterance`] (text plus pressed element) or
//! [`Session::swipe`]. Failed commands leave the state untouched.

use std::collections::VecDeque;
use std::sync::Arc;

use chrono::{Datelike, Duration, Months};
use serde::{Deserialize, Serialize};

use crate::datastore::{DataSourceType, Dataset};
use crate::interpreter::{
    self, Aspect, ComparisonSlot, ConditionSpec, CycleType, Intent, InteractionContext, InterpretOutcome,
    InvalidReason, Page, PlotSlot, PressedElement, QueryParamEdit,
};
use crate::queryengine::{run_highlight_query, HighlightResult};
use crate::timeparse::{DateRange, ReferenceFrame};

pub const UNDO_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationState {
    pub page: Page,
    /// The range widget's period. Kept while a two-range comparison is shown
    /// so that leaving the comparison returns to it.
    pub range: DateRange,
    pub source: Option<DataSourceType>,
    pub comparison: Option<(DateRange, DateRange)>,
    pub cycle: Option<CycleType>,
    /// Only ever present on Home and Detail pages.
    pub active_query: Option<HighlightResult>,
    /// Step fixed by the first of a run of swipes. A day-length shift can
    /// land on a month-aligned range; reusing the step keeps back and
    /// forward exact inverses.
    pub swipe_step: Option<SwipeStep>,
    pub frame: ReferenceFrame,
}

impl ExplorationState {
    /// Home page over the 7 days ending at the reference date.
    pub fn initial(frame: ReferenceFrame) -> ExplorationState {
        let range =
            DateRange::trailing_days(frame.reference_date, 7).expect("reference date is far from the calendar start");
        ExplorationState {
            page: Page::Home,
            range,
            source: None,
            comparison: None,
            cycle: None,
            active_query: None,
            swipe_step: None,
            frame,
        }
    }

    pub fn context(&self, pressed: PressedElement) -> InteractionContext {
        InteractionContext {
            page: self.page,
            current_range: self.range,
            current_source: self.source,
            comparison_ranges: self.comparison,
            cycle: self.cycle,
            pressed,
            frame: self.frame.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Feedback {
    Executed {
        summary: String,
        undoable: bool,
    },
    InvalidDialog {
        /// Absent for session-level refusals such as an empty undo stack.
        reason: Option<InvalidReason>,
        message: String,
        suggestion: Option<String>,
    },
    UnrecognizedNotice {
        text: String,
    },
}

impl Feedback {
    fn invalid(reason: InvalidReason, message: impl Into<String>, suggestion: Option<&str>) -> Feedback {
        Feedback::InvalidDialog {
            reason: Some(reason),
            message: message.into(),
            suggestion: suggestion.map(str::to_string),
        }
    }

    fn refused(message: &str) -> Feedback {
        Feedback::InvalidDialog {
            reason: None,
            message: message.to_string(),
            suggestion: None,
        }
    }

    pub fn is_executed(&self) -> bool {
        matches!(self, Feedback::Executed { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UndoEntry {
    pub prior: ExplorationState,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwipeDirection {
    Back,
    Forward,
}

/// How far one swipe moves the range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "unit", content = "count", rename_all = "snake_case")]
pub enum SwipeStep {
    Months(u32),
    Days(i64),
}

impl SwipeStep {
    /// Whole-month ranges (including whole years) move by their month count
    /// so they stay calendar aligned; anything else moves by its day count.
    pub fn of(range: DateRange) -> SwipeStep {
        match range.whole_months() {
            Some(k) => SwipeStep::Months(k),
            None => SwipeStep::Days(range.num_days()),
        }
    }

    pub fn apply(self, range: DateRange, dir: SwipeDirection) -> Option<DateRange> {
        match self {
            SwipeStep::Months(k) => {
                let months = Months::new(k);
                let start = match dir {
                    SwipeDirection::Back => range.start.checked_sub_months(months)?,
                    SwipeDirection::Forward => range.start.checked_add_months(months)?,
                };
                DateRange::new(start, start.checked_add_months(months)?.pred_opt()?)
            }
            SwipeStep::Days(n) => {
                let shift = Duration::days(if dir == SwipeDirection::Back { -n } else { n });
                DateRange::new(
                    range.start.checked_add_signed(shift)?,
                    range.end.checked_add_signed(shift)?,
                )
            }
        }
    }
}

/// Shifts `range` by its own length, see [`SwipeStep::of`].
pub fn swipe_range(range: DateRange, dir: SwipeDirection) -> Option<DateRange> {
    SwipeStep::of(range).apply(range, dir)
}

/// Human form of a period used in confirmations: "August 2020", "2020",
/// "2020-08-27" or "2020-08-21 to 2020-08-27".
pub fn describe_range(r: DateRange) -> String {
    match r.whole_months() {
        Some(1) => r.start.format("%B %Y").to_string(),
        Some(12) if r.start.month() == 1 => r.start.year().to_string(),
        _ if r.start == r.end => r.start.to_string(),
        _ => r.to_string(),
    }
}

type Step = Result<(ExplorationState, String), Feedback>;

fn unsupported(message: &str) -> Feedback {
    Feedback::invalid(InvalidReason::UnsupportedOnPage, message, None)
}

/// Pure transition: the state after `intent`, with its confirmation text.
/// `Undo` is not a transition and is rejected here.
pub fn transition(state: &ExplorationState, intent: &Intent, dataset: &Dataset) -> Step {
    let mut s = state.clone();
    let summary = match *intent {
        Intent::SetRange { range } => {
            if s.page == Page::TwoRange {
                leave_comparison(&mut s);
            }
            s.range = range;
            format!("Showing {}.", describe_range(range))
        }
        Intent::SetStartDate { date } | Intent::SetEndDate { date } => {
            if s.page == Page::TwoRange {
                return Err(unsupported("The comparison page has no date labels."));
            }
            let start = matches!(intent, Intent::SetStartDate { .. });
            let (a, b) = if start {
                (date, s.range.end)
            } else {
                (s.range.start, date)
            };
            s.range = DateRange::new(a, b).ok_or_else(|| {
                Feedback::invalid(
                    InvalidReason::IncompatibleParameter,
                    "The start date would come after the end date.",
                    Some("Pick a start date on or before the end date."),
                )
            })?;
            format!("{} date set to {date}.", if start { "Start" } else { "End" })
        }
        Intent::SetDataSource { source } => {
            if s.page == Page::Home {
                s.page = Page::Detail;
            }
            s.source = Some(source);
            format!("Showing {source}.")
        }
        Intent::NavigateDetail { source, range } => {
            leave_comparison(&mut s);
            s.page = Page::Detail;
            s.source = Some(source);
            s.range = range;
            format!("Showing {source} for {}.", describe_range(range))
        }
        Intent::CompareTwoRanges {
            source,
            range_a,
            range_b,
        } => {
            s.page = Page::TwoRange;
            s.source = Some(source);
            s.comparison = Some((range_a, range_b));
            s.cycle = None;
            s.active_query = None;
            format!(
                "Comparing {source}: {} vs {}.",
                describe_range(range_a),
                describe_range(range_b)
            )
        }
        Intent::ReplaceComparisonRange { slot, range } => {
            let Some((a, b)) = s.comparison.filter(|_| s.page == Page::TwoRange) else {
                return Err(unsupported("There is no comparison to change."));
            };
            let (old, new) = match slot {
                ComparisonSlot::A => (a, (range, b)),
                ComparisonSlot::B => (b, (a, range)),
            };
            s.comparison = Some(new);
            format!("Replaced {} with {}.", describe_range(old), describe_range(range))
        }
        Intent::CompareCyclical { source, range, cycle } => {
            s.page = Page::Cyclical;
            s.source = Some(source);
            s.range = range;
            s.cycle = Some(cycle);
            s.comparison = None;
            s.active_query = None;
            format!("Showing {source} for {} by {}.", describe_range(range), cycle.label())
        }
        Intent::RunQuery { condition, range } => {
            if !matches!(s.page, Page::Home | Page::Detail) {
                return Err(Feedback::invalid(
                    InvalidReason::UnsupportedOnPage,
                    "Highlighting days is not available on comparison pages.",
                    Some("Go to a data source page or Home first, then ask again."),
                ));
            }
            check_condition(&condition)?;
            if let Some(r) = range {
                s.range = r;
            }
            if s.page == Page::Detail && s.source != Some(condition.source) {
                s.source = Some(condition.source);
            }
            let q = run_highlight_query(dataset, &condition, s.range, dataset.profile());
            let summary = query_summary(&q);
            s.active_query = Some(q);
            summary
        }
        Intent::EditQueryParam { edit } => {
            let Some(q) = &s.active_query else {
                return Err(Feedback::refused("There is no query to edit."));
            };
            let condition = apply_edit(q.condition, edit)?;
            let q = run_highlight_query(dataset, &condition, s.range, dataset.profile());
            let summary = query_summary(&q);
            s.active_query = Some(q);
            summary
        }
        Intent::DismissQuery => {
            s.active_query = None;
            "Query dismissed.".to_string()
        }
        Intent::GoHome => {
            s.page = Page::Home;
            s.source = None;
            s.comparison = None;
            s.cycle = None;
            "Home.".to_string()
        }
        Intent::Undo => return Err(Feedback::refused("Undo is not a state transition.")),
    };
    s.swipe_step = None;
    refresh_query(&mut s, dataset);
    Ok((s, summary))
}

fn leave_comparison(s: &mut ExplorationState) {
    s.page = if s.source.is_some() { Page::Detail } else { Page::Home };
    s.comparison = None;
    s.cycle = None;
}

/// Re-runs the active query when the visible range moved.
fn refresh_query(s: &mut ExplorationState, dataset: &Dataset) {
    if let Some(q) = &s.active_query {
        if q.evaluated_range != s.range {
            s.active_query = Some(run_highlight_query(dataset, &q.condition, s.range, dataset.profile()));
        }
    }
}

fn check_condition(c: &ConditionSpec) -> Result<(), Feedback> {
    c.validate().map_err(|e| {
        Feedback::invalid(
            InvalidReason::IncompatibleParameter,
            format!("That query does not work: {e}."),
            None,
        )
    })
}

fn apply_edit(mut c: ConditionSpec, edit: QueryParamEdit) -> Result<ConditionSpec, Feedback> {
    match edit {
        QueryParamEdit::Aspect { aspect, source } => {
            if aspect == Aspect::GoalRef {
                c.comparator = interpreter::Comparator::Gte;
                c.operand = None;
            }
            c.aspect = aspect;
            c.source = source;
        }
        QueryParamEdit::Comparator { comparator } => {
            c.comparator = comparator;
            if comparator.is_extremum() {
                c.operand = None;
            }
        }
        QueryParamEdit::Operand { operand } => c.operand = operand,
    }
    check_condition(&c)?;
    Ok(c)
}

/// "5 days: wake time earlier than 07:30 AM."
pub fn query_summary(q: &HighlightResult) -> String {
    let unit = if q.count == 1 { "day" } else { "days" };
    format!("{} {unit}: {}.", q.count, q.condition)
}

/// One user's exploration over a shared dataset.
#[derive(Debug, Clone)]
pub struct Session {
    state: ExplorationState,
    undo: VecDeque<UndoEntry>,
    dataset: Arc<Dataset>,
}

impl Session {
    pub fn new(dataset: Arc<Dataset>, frame: ReferenceFrame) -> Session {
        Session {
            state: ExplorationState::initial(frame),
            undo: VecDeque::new(),
            dataset,
        }
    }

    pub fn state(&self) -> &ExplorationState {
        &self.state
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    pub fn undo_depth(&self) -> usize {
        self.undo.len()
    }

    pub fn dispatch(&mut self, intent: Intent) -> Feedback {
        self.apply(intent, false)
    }

    fn apply(&mut self, intent: Intent, assumed_source: bool) -> Feedback {
        match intent {
            Intent::Undo => return self.undo(),
            Intent::DismissQuery if self.state.active_query.is_none() => {
                return Feedback::Executed {
                    summary: "No query to dismiss.".to_string(),
                    undoable: false,
                }
            }
            _ => {}
        }
        match transition(&self.state, &intent, &self.dataset) {
            Ok((next, mut summary)) => {
                if assumed_source {
                    summary.push_str(" Step Count was assumed; name a data source to change it.");
                }
                self.commit(next, summary)
            }
            Err(fb) => fb,
        }
    }

    fn commit(&mut self, next: ExplorationState, summary: String) -> Feedback {
        let prior = std::mem::replace(&mut self.state, next);
        self.undo.push_back(UndoEntry {
            prior,
            label: summary.clone(),
        });
        if self.undo.len() > UNDO_DEPTH {
            self.undo.pop_front();
        }
        Feedback::Executed {
            summary,
            undoable: true,
        }
    }

    pub fn undo(&mut self) -> Feedback {
        match self.undo.pop_back() {
            Some(entry) => {
                self.state = entry.prior;
                Feedback::Executed {
                    summary: format!("Undid: {}", entry.label),
                    undoable: false,
                }
            }
            None => Feedback::refused("Nothing to undo."),
        }
    }

    pub fn swipe(&mut self, dir: SwipeDirection) -> Feedback {
        if self.state.page == Page::TwoRange {
            return unsupported("The comparison page has no range widget to swipe.");
        }
        let step = self.state.swipe_step.unwrap_or(SwipeStep::of(self.state.range));
        let Some(range) = step.apply(self.state.range, dir) else {
            return Feedback::refused("That is past the end of the calendar.");
        };
        let mut next = self.state.clone();
        next.range = range;
        next.swipe_step = Some(step);
        refresh_query(&mut next, &self.dataset);
        self.commit(next, format!("Showing {}.", describe_range(range)))
    }

    /// Interprets `text` in the current context and dispatches the result.
    pub fn handle_utterance(&mut self, text: &str, pressed: PressedElement) -> Feedback {
        match interpreter::interpret(text, &self.state.context(pressed)) {
            InterpretOutcome::Ok { intent, assumed_source } => self.apply(intent, assumed_source),
            InterpretOutcome::Invalid {
                reason,
                message,
                suggestion,
            } => Feedback::InvalidDialog {
                reason: Some(reason),
                message,
                suggestion,
            },
            InterpretOutcome::Unrecognized { text } => Feedback::UnrecognizedNotice { text },
        }
    }

    /// Binds `target` and handles `text` in one step, as a front end does.
    pub fn command(&mut self, text: &str, target: PressedTarget) -> Feedback {
        match self.bind_pressed(target) {
            Ok(pressed) => self.handle_utterance(text, pressed),
            Err(fb) => fb,
        }
    }

    /// Resolves a wire-level pressed target against what the page shows.
    pub fn bind_pressed(&self, target: PressedTarget) -> Result<PressedElement, Feedback> {
        let s = &self.state;
        let missing = |what: &str| unsupported(&format!("There is no {what} on this page."));
        Ok(match target.kind {
            PressedKind::None => PressedElement::None,
            PressedKind::StartDateLabel | PressedKind::EndDateLabel => {
                if s.page == Page::TwoRange {
                    return Err(missing("date label"));
                }
                if target.kind == PressedKind::StartDateLabel {
                    PressedElement::StartDateLabel { date: s.range.start }
                } else {
                    PressedElement::EndDateLabel { date: s.range.end }
                }
            }
            PressedKind::AggregationPlot => {
                let slot = target
                    .slot
                    .ok_or_else(|| Feedback::invalid(InvalidReason::AmbiguousSlot, "Which plot is pressed?", None))?;
                let range = match (slot, s.comparison, s.cycle) {
                    (PlotSlot::A, Some((a, _)), _) => a,
                    (PlotSlot::B, Some((_, b)), _) => b,
                    (PlotSlot::Group(i), _, Some(c)) if (i as usize) < c.group_count() => s.range,
                    _ => return Err(missing("such plot")),
                };
                PressedElement::AggregationPlot { slot, range }
            }
            PressedKind::DataSourceLabel => {
                let source = target.source.or(s.source).ok_or_else(|| missing("data source label"))?;
                PressedElement::DataSourceLabel { source }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressedKind {
    #[default]
    None,
    StartDateLabel,
    EndDateLabel,
    AggregationPlot,
    DataSourceLabel,
}

/// What a front end reports as held: the element kind, the plot slot for
/// aggregation plots, and the source for a data source label on Home.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PressedTarget {
    #[serde(default)]
    pub kind: PressedKind,
    #[serde(default)]
    pub slot: Option<PlotSlot>,
    #[serde(default)]
    pub source: Option<DataSourceType>,
}

impl PressedTarget {
    pub fn plot(slot: PlotSlot) -> PressedTarget {
        PressedTarget {
            kind: PressedKind::AggregationPlot,
            slot: Some(slot),
            source: None,
        }
    }

    pub fn of(kind: PressedKind) -> PressedTarget {
        PressedTarget {
            kind,
            ..PressedTarget::default()
        }
    }
}
