#![allow(dead_code)]

pub mod oracle;

use chrono::NaiveDate;
use datahand::datastore::DataSourceType::{self, *};
use datahand::interpreter::*;
use datahand::timeparse::{DateRange, LocalDate, ReferenceFrame, TimeOfDay};

pub fn d(y: i32, m: u32, day: u32) -> LocalDate {
    NaiveDate::from_ymd_opt(y, m, day).unwrap()
}

pub fn r(a: LocalDate, b: LocalDate) -> DateRange {
    DateRange::new(a, b).unwrap()
}

pub fn month(y: i32, m: u32) -> DateRange {
    DateRange::month(y, m).unwrap()
}

pub fn year(y: i32) -> DateRange {
    DateRange::year(y).unwrap()
}

pub fn frame() -> ReferenceFrame {
    ReferenceFrame::new(d(2020, 8, 27))
}

pub fn home() -> InteractionContext {
    InteractionContext::home(r(d(2020, 8, 21), d(2020, 8, 27)), frame())
}

pub fn detail(source: DataSourceType, range: DateRange) -> InteractionContext {
    InteractionContext::detail(source, range, frame())
}

pub fn two_range(source: DataSourceType, a: DateRange, b: DateRange) -> InteractionContext {
    InteractionContext::two_range(source, a, b, frame())
}

pub fn plot(ctx: InteractionContext, slot: PlotSlot) -> InteractionContext {
    let (a, b) = ctx.comparison_ranges.unwrap();
    let range = if slot == PlotSlot::A { a } else { b };
    ctx.pressing(PressedElement::AggregationPlot { slot, range })
}

pub fn start_label(ctx: InteractionContext) -> InteractionContext {
    let date = ctx.current_range.start;
    ctx.pressing(PressedElement::StartDateLabel { date })
}

pub fn cond(aspect: Aspect, source: DataSourceType, comparator: Comparator, operand: Option<Operand>) -> ConditionSpec {
    ConditionSpec {
        aspect,
        source,
        comparator,
        operand,
    }
}

pub enum Expect {
    Intent(Intent),
    Invalid(InvalidReason),
    Unrecognized,
}

pub struct Golden {
    pub text: &'static str,
    pub ctx: InteractionContext,
    pub expect: Expect,
}

impl Golden {
    pub fn check(&self) -> Result<(), String> {
        let got = interpret(self.text, &self.ctx);
        let pass = match (&self.expect, &got) {
            (Expect::Intent(want), InterpretOutcome::Ok { intent, .. }) => want == intent,
            (Expect::Invalid(want), InterpretOutcome::Invalid { reason, .. }) => want == reason,
            (Expect::Unrecognized, InterpretOutcome::Unrecognized { .. }) => true,
            _ => false,
        };
        if pass {
            Ok(())
        } else {
            Err(format!("{:?}: got {got:?}", self.text))
        }
    }
}

/// Reference utterances for every operation pattern, the walkthrough and
/// the feedback cases, each with the context it is spoken in.
pub fn golden_corpus() -> Vec<Golden> {
    use Expect::Intent as I;
    let aug20 = month(2020, 8);
    let aug19 = month(2019, 8);
    let summer20 = r(d(2020, 6, 1), d(2020, 8, 31));
    let winter20 = r(d(2019, 12, 1), d(2020, 2, 29));
    let steps_over_10k = cond(
        Aspect::Value,
        StepCount,
        Comparator::Gt,
        Some(Operand::Quantity(10_000.0)),
    );
    let g = |text, ctx, expect| Golden { text, ctx, expect };
    vec![
        g(
            "Go to March 2020",
            home(),
            I(Intent::SetRange { range: month(2020, 3) }),
        ),
        g(
            "Compare sleep ranges of winter and summer this year,",
            home(),
            I(Intent::CompareTwoRanges {
                source: SleepRange,
                range_a: winter20,
                range_b: summer20,
            }),
        ),
        g(
            "Days I walked more than 10,000 steps last month",
            home(),
            I(Intent::RunQuery {
                condition: steps_over_10k,
                range: Some(month(2020, 7)),
            }),
        ),
        g(
            "Show me the step counts from this summer,",
            home(),
            I(Intent::NavigateDetail {
                source: StepCount,
                range: summer20,
            }),
        ),
        g(
            "Highlight the days I walked more than 10,000 steps.",
            home(),
            I(Intent::RunQuery {
                condition: steps_over_10k,
                range: None,
            }),
        ),
        g(
            "January 1",
            start_label(home()),
            I(Intent::SetStartDate { date: d(2020, 1, 1) }),
        ),
        g(
            "Summer 2019",
            plot(two_range(SleepRange, winter20, summer20), PlotSlot::A),
            I(Intent::ReplaceComparisonRange {
                slot: ComparisonSlot::A,
                range: r(d(2019, 6, 1), d(2019, 8, 31)),
            }),
        ),
        g(
            "Days I met my step goal.",
            home(),
            I(Intent::RunQuery {
                condition: cond(Aspect::GoalRef, StepCount, Comparator::Gte, None),
                range: None,
            }),
        ),
        g(
            "Sleep range of this month.",
            home(),
            I(Intent::NavigateDetail {
                source: SleepRange,
                range: aug20,
            }),
        ),
        g(
            "Days I woke up earlier than 7:30 AM",
            detail(SleepRange, aug20),
            I(Intent::RunQuery {
                condition: cond(
                    Aspect::WakeTime,
                    SleepRange,
                    Comparator::Lt,
                    Some(Operand::Clock(TimeOfDay::from_hm(7, 30).unwrap())),
                ),
                range: None,
            }),
        ),
        g(
            "Compare with last August",
            detail(SleepRange, aug20),
            I(Intent::CompareTwoRanges {
                source: SleepRange,
                range_a: aug19,
                range_b: aug20,
            }),
        ),
        g(
            "February 2020",
            plot(two_range(SleepRange, aug19, aug20), PlotSlot::A),
            I(Intent::ReplaceComparisonRange {
                slot: ComparisonSlot::A,
                range: month(2020, 2),
            }),
        ),
        g(
            "Show 2020 by month",
            detail(SleepRange, aug20),
            I(Intent::CompareCyclical {
                source: SleepRange,
                range: year(2020),
                cycle: CycleType::MonthOfYear,
            }),
        ),
        g(
            "Compare January 2018 with January 2019",
            home(),
            I(Intent::CompareTwoRanges {
                source: StepCount,
                range_a: month(2018, 1),
                range_b: month(2019, 1),
            }),
        ),
        g(
            "Show me sleep by month for 2020",
            home(),
            I(Intent::CompareCyclical {
                source: SleepRange,
                range: year(2020),
                cycle: CycleType::MonthOfYear,
            }),
        ),
        g(
            "Maximum step count last month",
            home(),
            I(Intent::RunQuery {
                condition: cond(Aspect::Value, StepCount, Comparator::Max, None),
                range: Some(month(2020, 7)),
            }),
        ),
        g(
            "Step count in 2019",
            home(),
            I(Intent::NavigateDetail {
                source: StepCount,
                range: year(2019),
            }),
        ),
        g(
            "Last 30 days",
            home(),
            I(Intent::SetRange {
                range: r(d(2020, 7, 29), d(2020, 8, 27)),
            }),
        ),
        g(
            "January 1, 2019",
            start_label(home()),
            I(Intent::SetStartDate { date: d(2019, 1, 1) }),
        ),
        g(
            "January 2020",
            plot(two_range(StepCount, month(2019, 1), month(2019, 2)), PlotSlot::A),
            I(Intent::ReplaceComparisonRange {
                slot: ComparisonSlot::A,
                range: month(2020, 1),
            }),
        ),
        g(
            "Days I slept more than six hours",
            detail(HoursSlept, aug20),
            I(Intent::RunQuery {
                condition: cond(Aspect::Value, HoursSlept, Comparator::Gt, Some(Operand::Quantity(6.0))),
                range: None,
            }),
        ),
        g(
            "Hours slept",
            detail(StepCount, aug20),
            I(Intent::SetDataSource { source: HoursSlept }),
        ),
        g(
            "Compare step counts of this month and last month,",
            home(),
            I(Intent::CompareTwoRanges {
                source: StepCount,
                range_a: aug20,
                range_b: month(2020, 7),
            }),
        ),
        g(
            "lower than 56",
            detail(RestingHeartRate, aug20),
            I(Intent::RunQuery {
                condition: cond(
                    Aspect::Value,
                    RestingHeartRate,
                    Comparator::Lt,
                    Some(Operand::Quantity(56.0)),
                ),
                range: None,
            }),
        ),
        g(
            "Last 90 days",
            home(),
            I(Intent::SetRange {
                range: r(d(2020, 5, 30), d(2020, 8, 27)),
            }),
        ),
        g("This March", home(), I(Intent::SetRange { range: month(2020, 3) })),
        g("This month", home(), I(Intent::SetRange { range: aug20 })),
        g(
            "Compare hours slept",
            home(),
            Expect::Invalid(InvalidReason::MissingPeriods),
        ),
    ]
}

pub fn fixture_span() -> DateRange {
    r(d(2016, 1, 1), d(2020, 8, 27))
}

/// Random range inside `span` of 1 to 400 days, sometimes reaching past
/// either end.
pub fn random_range(rng: &mut impl rand::Rng, span: DateRange) -> DateRange {
    let days = span.num_days();
    let start = span.start + chrono::Duration::days(rng.random_range(-30..days));
    let len = rng.random_range(0..400);
    r(start, start + chrono::Duration::days(len))
}

/// Random valid condition over any source and aspect.
pub fn random_condition(rng: &mut impl rand::Rng) -> ConditionSpec {
    let comparators = [
        Comparator::Lt,
        Comparator::Lte,
        Comparator::Gt,
        Comparator::Gte,
        Comparator::Min,
        Comparator::Max,
    ];
    let comparator = comparators[rng.random_range(0..comparators.len())];
    let extremum = comparator.is_extremum();
    let c = match rng.random_range(0..7) {
        0 => cond(Aspect::GoalRef, StepCount, Comparator::Gte, None),
        k @ (1 | 2) => {
            let aspect = if k == 1 { Aspect::Bedtime } else { Aspect::WakeTime };
            let t = TimeOfDay::from_minutes(rng.random_range(0..1440)).unwrap();
            cond(aspect, SleepRange, comparator, (!extremum).then_some(Operand::Clock(t)))
        }
        _ => {
            let source = DataSourceType::NUMERIC[rng.random_range(0..4)];
            let q = match source {
                StepCount => rng.random_range(0..20_000) as f64,
                RestingHeartRate => rng.random_range(45..80) as f64,
                HoursSlept => rng.random_range(300..900) as f64 / 100.0,
                _ => rng.random_range(600..800) as f64 / 10.0,
            };
            cond(
                Aspect::Value,
                source,
                comparator,
                (!extremum).then_some(Operand::Quantity(q)),
            )
        }
    };
    assert!(c.validate().is_ok(), "{c:?}");
    c
}

/// Seed-42 fixture whose August 2020 sleep is rebuilt so that exactly five
/// nights end before 7:30 AM.
pub fn scenario_dataset() -> datahand::datastore::Dataset {
    use datahand::datastore::{generate_fixture, DatasetBuilder, SleepRecord};
    let base = generate_fixture(42, fixture_span());
    let mut b = DatasetBuilder::new();
    for s in DataSourceType::NUMERIC {
        for (date, v) in base.numeric(s) {
            b.insert_value(s, *date, *v);
        }
    }
    for rec in base.sleep().values().filter(|r| r.date < d(2020, 8, 1)) {
        b.insert_sleep(*rec);
    }
    let early = [2, 7, 11, 19, 25];
    for day in 1..=27 {
        let wake = if early.contains(&day) {
            425
        } else {
            480 + (day as u16 * 7) % 90
        };
        let bed = -60 + (day as i16 * 13) % 150;
        b.insert_sleep(SleepRecord::new(d(2020, 8, day), bed, wake).unwrap());
    }
    b.set_profile(base.profile().clone());
    b.seal()
}

#[derive(Debug, Clone)]
pub enum Action {
    Do(Intent),
    Swipe(datahand::session::SwipeDirection),
    Say(String, datahand::session::PressedTarget),
}

/// A random action, biased toward ones that make sense on the current page.
pub fn random_action(rng: &mut impl rand::Rng, state: &datahand::session::ExplorationState) -> Action {
    use datahand::session::{PressedKind, PressedTarget, SwipeDirection};
    let span = r(d(2019, 1, 1), d(2020, 8, 27));
    let source = DataSourceType::ALL[rng.random_range(0..5)];
    let cycle = if rng.random_bool(0.5) {
        CycleType::DayOfWeek
    } else {
        CycleType::MonthOfYear
    };
    let some_day = span.start + chrono::Duration::days(rng.random_range(0..span.num_days()));
    let whole_month = month(rng.random_range(2019..=2020), rng.random_range(1..=12));
    let range = if rng.random_bool(0.3) {
        whole_month
    } else {
        random_range(rng, span)
    };
    let intent = match rng.random_range(0..19) {
        0 => Intent::SetRange { range },
        1 => Intent::SetStartDate { date: some_day },
        2 => Intent::SetEndDate { date: some_day },
        3 => Intent::SetDataSource { source },
        4 => Intent::NavigateDetail { source, range },
        5 => Intent::CompareTwoRanges {
            source,
            range_a: range,
            range_b: random_range(rng, span),
        },
        6 => Intent::ReplaceComparisonRange {
            slot: if rng.random_bool(0.5) {
                ComparisonSlot::A
            } else {
                ComparisonSlot::B
            },
            range,
        },
        7 => Intent::CompareCyclical { source, range, cycle },
        8 | 9 => Intent::RunQuery {
            condition: random_condition(rng),
            range: rng.random_bool(0.4).then_some(range),
        },
        10 => {
            let edit = match rng.random_range(0..3) {
                0 => {
                    let c = random_condition(rng);
                    QueryParamEdit::Aspect {
                        aspect: c.aspect,
                        source: c.source,
                    }
                }
                1 => QueryParamEdit::Comparator {
                    comparator: random_condition(rng).comparator,
                },
                _ => QueryParamEdit::Operand {
                    operand: random_condition(rng).operand,
                },
            };
            Intent::EditQueryParam { edit }
        }
        11 => Intent::DismissQuery,
        12 => Intent::GoHome,
        13 | 14 => {
            return Action::Swipe(if rng.random_bool(0.5) {
                SwipeDirection::Back
            } else {
                SwipeDirection::Forward
            })
        }
        _ => {
            let phrases = [
                "Go to March 2020",
                "last 30 days",
                "Compare with last August",
                "February 2020",
                "Days I walked more than 10,000 steps",
                "Days I woke up earlier than 7:30 AM",
                "Show 2020 by month",
                "hours slept",
                "Step count in 2019",
                "January 1",
                "summer 2019",
                "compare hours slept",
                "florb the wugs",
                "maximum weight",
            ];
            let text = phrases[rng.random_range(0..phrases.len())].to_string();
            let target = match (rng.random_range(0..4), state.page) {
                (0, _) => PressedTarget::of(PressedKind::StartDateLabel),
                (1, Page::TwoRange) => PressedTarget::plot(PlotSlot::A),
                (1, Page::Cyclical) => PressedTarget::plot(PlotSlot::Group(3)),
                _ => PressedTarget::default(),
            };
            return Action::Say(text, target);
        }
    };
    Action::Do(intent)
}

pub fn perform(session: &mut datahand::session::Session, action: &Action) -> datahand::session::Feedback {
    match action {
        Action::Do(intent) => session.dispatch(*intent),
        Action::Swipe(dir) => session.swipe(*dir),
        Action::Say(text, target) => match session.bind_pressed(*target) {
            Ok(pressed) => session.handle_utterance(text, pressed),
            Err(fb) => fb,
        },
    }
}

/// Checks the per-step session invariants; returns a description on failure.
pub fn check_step(
    before: &datahand::session::ExplorationState,
    session: &datahand::session::Session,
    fb: &datahand::session::Feedback,
) -> Result<(), String> {
    use datahand::queryengine::run_highlight_query;
    use datahand::session::{Feedback, SwipeDirection};
    let s = session.state();
    if matches!(fb, Feedback::InvalidDialog { .. } | Feedback::UnrecognizedNotice { .. }) && s != before {
        return Err(format!("state changed on {fb:?}"));
    }
    if let Some(q) = &s.active_query {
        if !matches!(s.page, Page::Home | Page::Detail) {
            return Err(format!("query alive on {:?}", s.page));
        }
        if q.evaluated_range != s.range {
            return Err("query range is stale".into());
        }
        let ds = session.dataset();
        if *q != run_highlight_query(ds, &q.condition, s.range, ds.profile()) {
            return Err("query result is stale".into());
        }
    }
    if s.comparison.is_some() != (s.page == Page::TwoRange) || s.cycle.is_some() != (s.page == Page::Cyclical) {
        return Err(format!("page fields inconsistent: {s:?}"));
    }
    if s.page != Page::TwoRange {
        let mut probe = session.clone();
        if probe.swipe(SwipeDirection::Back).is_executed() {
            probe.swipe(SwipeDirection::Forward);
            if probe.state().range != s.range {
                return Err(format!("swipe is not invertible at {}", s.range));
            }
        }
    }
    Ok(())
}
