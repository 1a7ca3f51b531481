//! Parameter identification over a normalized utterance.

use serde::Serialize;

use super::lexicon::{ComparatorWord, Keyword, Nav, SleepPoint, Tag, Tagged, Unit};
use super::{Aspect, Comparator, CycleType, Verb};
use crate::datastore::DataSourceType;
use crate::timeparse::{DateRange, TimeEntity, TimeOfDay, TimeValue};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DraftOperand {
    Number { value: f64, unit: Option<Unit> },
    Clock { time: TimeOfDay },
}

/// A condition before the context has supplied a missing source and before
/// units are converted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionDraft {
    pub aspect: Aspect,
    pub source: Option<DataSourceType>,
    pub comparator: Comparator,
    pub operand: Option<DraftOperand>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ParameterSet {
    /// Named data sources in order of first mention.
    pub sources: Vec<DataSourceType>,
    /// Time expressions not consumed as a query operand.
    pub entities: Vec<TimeEntity>,
    pub cycle: Option<CycleType>,
    pub condition: Option<ConditionDraft>,
    pub verbs: Vec<Verb>,
    pub nav: Option<Nav>,
    /// True when any lexicon keyword matched.
    pub keywords: bool,
    /// The normalized surface, for diagnostics.
    pub text: String,
}

impl ParameterSet {
    /// Dates and ranges, each as a period.
    pub fn periods(&self) -> Vec<DateRange> {
        self.entities.iter().filter_map(|e| e.value.as_period()).collect()
    }

    pub fn has_verb(&self, v: Verb) -> bool {
        self.verbs.contains(&v)
    }
}

pub fn extract_parameters(tokens: &[Tagged]) -> ParameterSet {
    let mut p = ParameterSet {
        text: tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" "),
        ..ParameterSet::default()
    };
    let mut sleep_point = None;
    let mut unit_source = None;
    for (i, t) in tokens.iter().enumerate() {
        let Tag::Keyword(kw) = t.tag else { continue };
        p.keywords = true;
        match kw {
            Keyword::Source(s) | Keyword::Activity(s) => {
                if !p.sources.contains(&s) {
                    p.sources.push(s);
                }
            }
            Keyword::Aspect(a) => {
                sleep_point.get_or_insert(a);
            }
            Keyword::Verb(v) => {
                if !p.verbs.contains(&v) {
                    p.verbs.push(v);
                }
            }
            Keyword::Cycle(c) => {
                p.cycle.get_or_insert(c);
            }
            Keyword::Nav(n) => {
                p.nav.get_or_insert(n);
            }
            Keyword::Unit(u) if i > 0 && matches!(tokens[i - 1].tag, Tag::Num(_)) => {
                unit_source.get_or_insert(match u {
                    Unit::Steps => DataSourceType::StepCount,
                    Unit::Hours | Unit::Minutes => DataSourceType::HoursSlept,
                    Unit::Kg | Unit::Lb => DataSourceType::Weight,
                    Unit::Bpm => DataSourceType::RestingHeartRate,
                });
            }
            _ => {}
        }
    }

    let mut operand_at = None;
    p.condition = condition(tokens, &mut operand_at).map(|mut c| {
        match sleep_point {
            Some(point) if c.aspect == Aspect::Value => {
                c.aspect = match point {
                    SleepPoint::Wake => Aspect::WakeTime,
                    SleepPoint::Bed => Aspect::Bedtime,
                };
                c.source = Some(DataSourceType::SleepRange);
            }
            _ => {}
        }
        if c.source.is_none() {
            c.source = p.sources.first().copied().or(unit_source);
        }
        // "sleep more than seven hours" means duration, not the sleep range
        if c.aspect == Aspect::Value
            && c.source == Some(DataSourceType::SleepRange)
            && matches!(c.operand, Some(DraftOperand::Number { .. }))
        {
            c.source = Some(DataSourceType::HoursSlept);
        }
        c
    });

    p.entities = tokens
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != operand_at)
        .filter_map(|(_, t)| match t.tag {
            Tag::Time(value) => Some(TimeEntity {
                value,
                span: t.span.clone(),
            }),
            _ => None,
        })
        .collect();
    p
}

fn condition(tokens: &[Tagged], operand_at: &mut Option<usize>) -> Option<ConditionDraft> {
    let keyword = |t: &Tagged| match t.tag {
        Tag::Keyword(k) => Some(k),
        _ => None,
    };
    if tokens.iter().any(|t| keyword(t) == Some(Keyword::Goal)) {
        return Some(ConditionDraft {
            aspect: Aspect::GoalRef,
            source: Some(DataSourceType::StepCount),
            comparator: Comparator::Gte,
            operand: None,
        });
    }
    for (i, t) in tokens.iter().enumerate() {
        let Some(Keyword::Comparator(word)) = keyword(t) else {
            continue;
        };
        let draft = |comparator, operand| ConditionDraft {
            aspect: Aspect::Value,
            source: None,
            comparator,
            operand,
        };
        let comparator = match word {
            ComparatorWord::Min => return Some(draft(Comparator::Min, None)),
            ComparatorWord::Max => return Some(draft(Comparator::Max, None)),
            ComparatorWord::Lt | ComparatorWord::Earlier => Comparator::Lt,
            ComparatorWord::Lte => Comparator::Lte,
            ComparatorWord::Gt | ComparatorWord::Later => Comparator::Gt,
            ComparatorWord::Gte => Comparator::Gte,
        };
        let clock_only = matches!(word, ComparatorWord::Earlier | ComparatorWord::Later);
        // A threshold word without a value right after it ("over the last
        // month") is not a condition.
        let operand = match tokens.get(i + 1).map(|t| &t.tag) {
            Some(Tag::Time(TimeValue::Clock(time))) => {
                *operand_at = Some(i + 1);
                DraftOperand::Clock { time: *time }
            }
            Some(Tag::Num(value)) if !clock_only => {
                let unit = tokens.get(i + 2).and_then(keyword).and_then(|k| match k {
                    Keyword::Unit(u) => Some(u),
                    Keyword::Source(DataSourceType::StepCount) => Some(Unit::Steps),
                    _ => None,
                });
                DraftOperand::Number { value: *value, unit }
            }
            _ => continue,
        };
        return Some(draft(comparator, Some(operand)));
    }
    None
}
