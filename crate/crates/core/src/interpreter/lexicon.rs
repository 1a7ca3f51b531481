//! Keyword lexicon and utterance tagging.

use std::collections::HashMap;
use std::ops::Range;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::Serialize;
use thiserror::Error;

use super::{CycleType, Verb};
use crate::datastore::DataSourceType;
use crate::lex::{self, Token, TokenKind};
use crate::timeparse::{self, ReferenceFrame, TimeValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparatorWord {
    Lt,
    Lte,
    Gt,
    Gte,
    Min,
    Max,
    /// "earlier than", "before": only meaningful against a clock time.
    Earlier,
    Later,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    /// Only ever inferred from a step source word after a number.
    Steps,
    Hours,
    Minutes,
    Kg,
    Lb,
    Bpm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SleepPoint {
    Wake,
    Bed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nav {
    Home,
    Undo,
    Dismiss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", content = "value", rename_all = "snake_case")]
pub enum Keyword {
    Source(DataSourceType),
    /// A verb that names a metric, like "walked".
    Activity(DataSourceType),
    Aspect(SleepPoint),
    Verb(Verb),
    Comparator(ComparatorWord),
    Goal,
    Cycle(CycleType),
    Unit(Unit),
    DaysTrigger,
    Nav(Nav),
}

#[derive(Debug, Error, PartialEq)]
#[error("lexicon line {line}: {reason}")]
pub struct LexiconError {
    pub line: usize,
    pub reason: String,
}

impl FromStr for Keyword {
    type Err = String;

    fn from_str(tag: &str) -> Result<Self, Self::Err> {
        let (family, arg) = tag.split_once(':').unwrap_or((tag, ""));
        let source = || arg.parse::<DataSourceType>();
        Ok(match family {
            "source" => Keyword::Source(source()?),
            "activity" => Keyword::Activity(source()?),
            "aspect" => Keyword::Aspect(match arg {
                "wake" => SleepPoint::Wake,
                "bed" => SleepPoint::Bed,
                _ => return Err(format!("unknown aspect {arg:?}")),
            }),
            "verb" => Keyword::Verb(match arg {
                "compare" => Verb::Compare,
                "show" => Verb::Show,
                "highlight" => Verb::Highlight,
                "go" => Verb::Go,
                _ => return Err(format!("unknown verb {arg:?}")),
            }),
            "cmp" => Keyword::Comparator(match arg {
                "lt" => ComparatorWord::Lt,
                "lte" => ComparatorWord::Lte,
                "gt" => ComparatorWord::Gt,
                "gte" => ComparatorWord::Gte,
                "min" => ComparatorWord::Min,
                "max" => ComparatorWord::Max,
                "earlier" => ComparatorWord::Earlier,
                "later" => ComparatorWord::Later,
                _ => return Err(format!("unknown comparator {arg:?}")),
            }),
            "goal" => Keyword::Goal,
            "cycle" => Keyword::Cycle(match arg {
                "day_of_week" => CycleType::DayOfWeek,
                "month_of_year" => CycleType::MonthOfYear,
                _ => return Err(format!("unknown cycle {arg:?}")),
            }),
            "unit" => Keyword::Unit(match arg {
                "hours" => Unit::Hours,
                "minutes" => Unit::Minutes,
                "kg" => Unit::Kg,
                "lb" => Unit::Lb,
                "bpm" => Unit::Bpm,
                _ => return Err(format!("unknown unit {arg:?}")),
            }),
            "trigger" if arg == "days" => Keyword::DaysTrigger,
            "nav" => Keyword::Nav(match arg {
                "home" => Nav::Home,
                "undo" => Nav::Undo,
                "dismiss" => Nav::Dismiss,
                _ => return Err(format!("unknown nav {arg:?}")),
            }),
            _ => return Err(format!("unknown tag {tag:?}")),
        })
    }
}

/// Surface phrases mapped to keywords. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<Vec<String>, Keyword>,
    longest: usize,
}

static DEFAULT_LEXICON: LazyLock<Lexicon> =
    LazyLock::new(|| Lexicon::parse(include_str!("../../data/lexicon.tsv")).expect("bundled lexicon is well formed"));

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn builtin() -> &'static Lexicon {
        &DEFAULT_LEXICON
    }

    /// Reads "surface TAB tag" lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lexicon = Lexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| LexiconError { line: line_no, reason };
            let (surface, tag) = line.split_once('\t').ok_or_else(|| err("missing tab".into()))?;
            let keyword = tag.trim().parse::<Keyword>().map_err(err)?;
            let words: Vec<String> = surface.split_whitespace().map(str::to_lowercase).collect();
            if words.is_empty() {
                return Err(err("empty surface".into()));
            }
            lexicon.longest = lexicon.longest.max(words.len());
            if lexicon.entries.insert(words, keyword).is_some() {
                return Err(err(format!("duplicate surface {surface:?}")));
            }
        }
        Ok(lexicon)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, words: &[&str]) -> Option<Keyword> {
        let key: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        self.entries.get(&key).copied()
    }

    /// Longest entry starting at `toks[0]`, as (keyword, token count).
    fn longest_match(&self, toks: &[Token]) -> Option<(Keyword, usize)> {
        let words: Vec<&str> = toks.iter().take(self.longest).map_while(|t| t.word()).collect();
        (1..=words.len())
            .rev()
            .find_map(|n| self.lookup(&words[..n]).map(|k| (k, n)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Tag {
    Word,
    Num(f64),
    Time(TimeValue),
    Keyword(Keyword),
    Punct,
}

/// One unit of a normalized utterance. Multi-word keywords and time
/// expressions occupy a single entry whose span covers all their words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tagged {
    pub text: String,
    pub span: Range<usize>,
    pub tag: Tag,
}

/// Tokenizes `text`, resolves time expressions against `frame` and attaches
/// lexicon tags to what remains.
pub fn normalize(text: &str, frame: &ReferenceFrame) -> Vec<Tagged> {
    normalize_with(text, frame, Lexicon::builtin())
}

pub fn normalize_with(text: &str, frame: &ReferenceFrame, lexicon: &Lexicon) -> Vec<Tagged> {
    let toks = lex::tokenize(text);
    let entities = timeparse::parse_tokens(&toks, frame);
    let mut out = Vec::with_capacity(toks.len());
    let mut ents = entities.into_iter().peekable();
    let mut i = 0;
    while i < toks.len() {
        let tok = &toks[i];
        if let Some(ent) = ents.next_if(|e| e.span.start <= tok.span.start) {
            let n = toks[i..]
                .iter()
                .take_while(|t| t.span.end <= ent.span.end)
                .count()
                .max(1);
            out.push(Tagged {
                text: text[ent.span.clone()].to_lowercase(),
                span: ent.span,
                tag: Tag::Time(ent.value),
            });
            i += n;
            continue;
        }
        // keywords may not run into the next time expression
        let limit = ents.peek().map_or(toks.len(), |e| {
            i + toks[i..].iter().take_while(|t| t.span.end <= e.span.start).count()
        });
        if let Some((kw, n)) = lexicon.longest_match(&toks[i..limit]) {
            let last = &toks[i + n - 1];
            out.push(Tagged {
                text: toks[i..i + n]
                    .iter()
                    .map(|t| t.text.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
                span: tok.span.start..last.span.end,
                tag: Tag::Keyword(kw),
            });
            i += n;
            continue;
        }
        let tag = match tok.kind {
            TokenKind::Number { value, .. } => Tag::Num(value),
            TokenKind::Punct(_) => Tag::Punct,
            _ => Tag::Word,
        };
        out.push(Tagged {
            text: tok.text.clone(),
            span: tok.span.clone(),
            tag,
        });
        i += 1;
    }
    out
}
