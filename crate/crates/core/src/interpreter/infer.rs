//! Operation inference from parameters and the interaction context.

use super::lexicon::{Nav, Unit};
use super::params::{ConditionDraft, DraftOperand, ParameterSet};
use super::{
    ComparisonSlot, ConditionSpec, Intent, InteractionContext, InterpretOutcome, InvalidReason, Operand, Page,
    PlotSlot, PressedElement, Verb,
};
use crate::datastore::DataSourceType;
use crate::timeparse::TimeValue;

const LB_TO_KG: f64 = 0.453_592_37;

fn ok(intent: Intent) -> InterpretOutcome {
    InterpretOutcome::Ok {
        intent,
        assumed_source: false,
    }
}

fn invalid(reason: InvalidReason, message: &str, suggestion: Option<&str>) -> InterpretOutcome {
    InterpretOutcome::Invalid {
        reason,
        message: message.to_string(),
        suggestion: suggestion.map(str::to_string),
    }
}

fn too_many_periods() -> InterpretOutcome {
    invalid(
        InvalidReason::AmbiguousSlot,
        "I found more periods than I can use here.",
        Some("Name one period, or two when comparing."),
    )
}

fn pick_slot_suggestion() -> Option<&'static str> {
    Some("Press and hold the plot you want to change while saying the new period.")
}

/// Decides the operation. Rules are tried in a fixed order and the first
/// that applies wins.
pub fn infer_intent(p: &ParameterSet, ctx: &InteractionContext) -> InterpretOutcome {
    let periods = p.periods();
    let pressed_source = match ctx.pressed {
        PressedElement::DataSourceLabel { source } => Some(source),
        _ => None,
    };
    let named_source = p.sources.first().copied().or(pressed_source);

    if let Some(nav) = p.nav {
        if periods.is_empty() && p.sources.is_empty() && p.condition.is_none() && p.cycle.is_none() {
            return ok(match nav {
                Nav::Home => Intent::GoHome,
                Nav::Undo => Intent::Undo,
                Nav::Dismiss => Intent::DismissQuery,
            });
        }
    }

    // date label held
    if let PressedElement::StartDateLabel { .. } | PressedElement::EndDateLabel { .. } = ctx.pressed {
        if periods.len() == 1 {
            let start = matches!(ctx.pressed, PressedElement::StartDateLabel { .. });
            return match p
                .entities
                .iter()
                .find(|e| e.value.as_period().is_some())
                .map(|e| e.value)
            {
                Some(TimeValue::Date(date)) if start => ok(Intent::SetStartDate { date }),
                Some(TimeValue::Date(date)) => ok(Intent::SetEndDate { date }),
                _ => invalid(
                    InvalidReason::IncompatibleParameter,
                    "A date label takes a single date, not a period.",
                    Some("Say a date like \"January 1\", or use the global microphone for a period."),
                ),
            };
        }
    }

    // aggregation plot held
    if let PressedElement::AggregationPlot { slot, .. } = ctx.pressed {
        if periods.len() == 1 && p.condition.is_none() {
            let Some(TimeValue::Range(range)) = p
                .entities
                .iter()
                .find(|e| e.value.as_period().is_some())
                .map(|e| e.value)
            else {
                return invalid(
                    InvalidReason::IncompatibleParameter,
                    "A plot covers a period, not a single day.",
                    Some("Say a period like \"February 2020\" or \"summer 2019\"."),
                );
            };
            return match slot {
                PlotSlot::A => ok(Intent::ReplaceComparisonRange {
                    slot: ComparisonSlot::A,
                    range,
                }),
                PlotSlot::B => ok(Intent::ReplaceComparisonRange {
                    slot: ComparisonSlot::B,
                    range,
                }),
                PlotSlot::Group(_) => match (ctx.current_source, ctx.cycle) {
                    (Some(source), Some(cycle)) => ok(Intent::CompareCyclical { source, range, cycle }),
                    _ => invalid(
                        InvalidReason::UnsupportedOnPage,
                        "This plot has no cycle to regroup.",
                        None,
                    ),
                },
            };
        }
    }

    if let Some(draft) = p.condition {
        if matches!(ctx.page, Page::TwoRange | Page::Cyclical) {
            return invalid(
                InvalidReason::UnsupportedOnPage,
                "Highlighting days is not available on comparison pages.",
                Some("Go to a data source page or Home first, then ask again."),
            );
        }
        if periods.len() > 1 {
            return too_many_periods();
        }
        return match resolve_condition(draft, ctx, pressed_source) {
            Ok(condition) => ok(Intent::RunQuery {
                condition,
                range: periods.first().copied(),
            }),
            Err(outcome) => outcome,
        };
    }

    // A cycle keyword groups one period, even when "compare" is said.
    if let Some(cycle) = p.cycle {
        if periods.len() > 1 {
            return too_many_periods();
        }
        let (source, assumed) = source_or_fallback(named_source, ctx);
        let range = periods.first().copied().unwrap_or(ctx.current_range);
        return InterpretOutcome::Ok {
            intent: Intent::CompareCyclical { source, range, cycle },
            assumed_source: assumed,
        };
    }

    if p.has_verb(Verb::Compare) || periods.len() >= 2 {
        let (range_a, range_b) = match periods.as_slice() {
            [] => {
                return invalid(
                    InvalidReason::MissingPeriods,
                    "Which periods should I compare?",
                    Some("Name two periods, like \"Compare January 2018 with January 2019\"."),
                )
            }
            [one] => match ctx.page {
                Page::TwoRange => {
                    return invalid(
                        InvalidReason::AmbiguousSlot,
                        "I'm not sure which period to replace.",
                        pick_slot_suggestion(),
                    )
                }
                _ if one.start <= ctx.current_range.start => (*one, ctx.current_range),
                _ => (ctx.current_range, *one),
            },
            [a, b] => (*a, *b),
            _ => return too_many_periods(),
        };
        let (source, assumed) = source_or_fallback(named_source, ctx);
        return InterpretOutcome::Ok {
            intent: Intent::CompareTwoRanges {
                source,
                range_a,
                range_b,
            },
            assumed_source: assumed,
        };
    }

    if let Some(source) = p.sources.first().copied() {
        return match periods.first() {
            Some(&range) => ok(Intent::NavigateDetail { source, range }),
            None => ok(Intent::SetDataSource { source }),
        };
    }

    if let [range] = periods.as_slice() {
        let explicit = p.has_verb(Verb::Go) || p.has_verb(Verb::Show);
        if ctx.page == Page::TwoRange && !explicit {
            return invalid(
                InvalidReason::AmbiguousSlot,
                "I'm not sure which period to replace.",
                pick_slot_suggestion(),
            );
        }
        return ok(Intent::SetRange { range: *range });
    }

    InterpretOutcome::Unrecognized { text: p.text.clone() }
}

fn source_or_fallback(named: Option<DataSourceType>, ctx: &InteractionContext) -> (DataSourceType, bool) {
    match named.or(ctx.current_source) {
        Some(s) => (s, false),
        None => (DataSourceType::StepCount, true),
    }
}

fn resolve_condition(
    draft: ConditionDraft,
    ctx: &InteractionContext,
    pressed_source: Option<DataSourceType>,
) -> Result<ConditionSpec, InterpretOutcome> {
    let source = draft
        .source
        .or(pressed_source)
        .or(if ctx.page == Page::Detail {
            ctx.current_source
        } else {
            None
        })
        .ok_or_else(|| {
            invalid(
                InvalidReason::UnknownDataSource,
                "Which data source should I check?",
                Some("Name one, like \"Days my resting heart rate was lower than 56\"."),
            )
        })?;
    let operand = match draft.operand {
        None => None,
        Some(DraftOperand::Clock { time }) => Some(Operand::Clock(time)),
        Some(DraftOperand::Number { value, unit }) => {
            let factor = match (source, unit) {
                (_, None) => Some(1.0),
                (DataSourceType::StepCount, Some(Unit::Steps))
                | (DataSourceType::RestingHeartRate, Some(Unit::Bpm))
                | (DataSourceType::HoursSlept, Some(Unit::Hours))
                | (DataSourceType::Weight, Some(Unit::Kg)) => Some(1.0),
                (DataSourceType::HoursSlept, Some(Unit::Minutes)) => Some(1.0 / 60.0),
                (DataSourceType::Weight, Some(Unit::Lb)) => Some(LB_TO_KG),
                _ => None,
            };
            let Some(factor) = factor else {
                return Err(invalid(
                    InvalidReason::IncompatibleParameter,
                    &format!("That unit does not fit {}.", source.label()),
                    None,
                ));
            };
            Some(Operand::Quantity(value * factor))
        }
    };
    let spec = ConditionSpec {
        aspect: draft.aspect,
        source,
        comparator: draft.comparator,
        operand,
    };
    spec.validate().map_err(|e| {
        let mut msg = e.to_string();
        if let Some(first) = msg.get(..1) {
            msg = first.to_uppercase() + &msg[1..] + ".";
        }
        invalid(InvalidReason::IncompatibleParameter, &msg, None)
    })?;
    Ok(spec)
}
