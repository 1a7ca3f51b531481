//! Shared word-level tokenizer.
//!
//! Both the time-expression grammar and the command interpreter work on the
//! same token stream. Tokens keep byte spans into the original text and a
//! lowercased surface form. Digit groups ("10,000") and English number words
//! ("ten thousand", "twenty-five") are folded into a single numeric token
//! before any matching happens.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Word,
    /// A plain number. `digits` is the length of the digit run for integer
    /// literals written with digits (0 for number words and decimals), which
    /// lets the grammar tell "2017" apart from "2,017" or "two thousand".
    Number {
        value: f64,
        digits: usize,
    },
    /// `1st`, `22nd`, `first`, `thirty-first`.
    Ordinal(u32),
    /// `7:30` (hour, minute) with no meridiem attached yet.
    Clock(u32, u32),
    /// `2020-08-27`
    IsoDate(i32, u32, u32),
    /// `8/27` or `8/27/2020`
    SlashDate(u32, u32, Option<i32>),
    Punct(char),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub text: String,
    pub span: Range<usize>,
    pub kind: TokenKind,
}

impl Token {
    pub fn is_word(&self, w: &str) -> bool {
        matches!(self.kind, TokenKind::Word) && self.text == w
    }

    pub fn word(&self) -> Option<&str> {
        match self.kind {
            TokenKind::Word => Some(&self.text),
            _ => None,
        }
    }

    pub fn number(&self) -> Option<f64> {
        match self.kind {
            TokenKind::Number { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Integer value if the token is a whole number.
    pub fn integer(&self) -> Option<i64> {
        self.number()
            .filter(|v| v.fract() == 0.0 && v.abs() < 1e15)
            .map(|v| v as i64)
    }
}

static TOKEN_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)
        (?P<iso>\d{4}-\d{1,2}-\d{1,2})
      | (?P<slash>\d{1,2}/\d{1,2}(?:/\d{2,4})?)
      | (?P<clock>\d{1,2}:\d{2})
      | (?P<ord>\d{1,2}(?:st|nd|rd|th))\b
      | (?P<grouped>\d{1,3}(?:,\d{3})+)
      | (?P<num>\d+(?:\.\d+)?)
      | (?P<word>[\p{Alphabetic}&&[^\d]]+(?:['’][\p{Alphabetic}&&[^\d]]+)*)
      | (?P<punct>[^\s])
    ",
    )
    .expect("token regex")
});

const UNITS: &[(&str, u32)] = &[
    ("zero", 0),
    ("one", 1),
    ("two", 2),
    ("three", 3),
    ("four", 4),
    ("five", 5),
    ("six", 6),
    ("seven", 7),
    ("eight", 8),
    ("nine", 9),
    ("ten", 10),
    ("eleven", 11),
    ("twelve", 12),
    ("thirteen", 13),
    ("fourteen", 14),
    ("fifteen", 15),
    ("sixteen", 16),
    ("seventeen", 17),
    ("eighteen", 18),
    ("nineteen", 19),
];

const TENS: &[(&str, u32)] = &[
    ("twenty", 20),
    ("thirty", 30),
    ("forty", 40),
    ("fifty", 50),
    ("sixty", 60),
    ("seventy", 70),
    ("eighty", 80),
    ("ninety", 90),
];

const SCALES: &[(&str, u64)] = &[("thousand", 1_000), ("million", 1_000_000)];

const ORDINAL_WORDS: &[(&str, u32)] = &[
    ("first", 1),
    ("second", 2),
    ("third", 3),
    ("fourth", 4),
    ("fifth", 5),
    ("sixth", 6),
    ("seventh", 7),
    ("eighth", 8),
    ("ninth", 9),
    ("tenth", 10),
    ("eleventh", 11),
    ("twelfth", 12),
    ("thirteenth", 13),
    ("fourteenth", 14),
    ("fifteenth", 15),
    ("sixteenth", 16),
    ("seventeenth", 17),
    ("eighteenth", 18),
    ("nineteenth", 19),
    ("twentieth", 20),
    ("thirtieth", 30),
];

fn lookup<T: Copy>(table: &[(&str, T)], w: &str) -> Option<T> {
    table.iter().find(|(k, _)| *k == w).map(|&(_, v)| v)
}

pub fn ordinal_word(w: &str) -> Option<u32> {
    lookup(ORDINAL_WORDS, w)
}

/// Splits `text` into tokens, then folds number words.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut raw = Vec::new();
    for caps in TOKEN_RE.captures_iter(text) {
        let (m, kind) = if let Some(m) = caps.name("iso") {
            let mut parts = m.as_str().split('-').map(|p| p.parse::<u32>().unwrap_or(0));
            let y = parts.next().unwrap_or(0) as i32;
            let mo = parts.next().unwrap_or(0);
            let d = parts.next().unwrap_or(0);
            (m, TokenKind::IsoDate(y, mo, d))
        } else if let Some(m) = caps.name("slash") {
            let parts: Vec<&str> = m.as_str().split('/').collect();
            let mo = parts[0].parse().unwrap_or(0);
            let d = parts[1].parse().unwrap_or(0);
            let y = parts.get(2).and_then(|y| {
                let v = y.parse::<i32>().ok()?;
                Some(if y.len() == 2 { 2000 + v } else { v })
            });
            (m, TokenKind::SlashDate(mo, d, y))
        } else if let Some(m) = caps.name("clock") {
            let (h, mi) = m.as_str().split_once(':').unwrap_or(("99", "99"));
            (m, TokenKind::Clock(h.parse().unwrap_or(99), mi.parse().unwrap_or(99)))
        } else if let Some(m) = caps.name("ord") {
            let digits: String = m.as_str().chars().take_while(char::is_ascii_digit).collect();
            (m, TokenKind::Ordinal(digits.parse().unwrap_or(0)))
        } else if let Some(m) = caps.name("grouped") {
            let value = m.as_str().replace(',', "").parse().unwrap_or(0.0);
            (m, TokenKind::Number { value, digits: 0 })
        } else if let Some(m) = caps.name("num") {
            let s = m.as_str();
            let value = s.parse().unwrap_or(0.0);
            let digits = if s.contains('.') { 0 } else { s.len() };
            (m, TokenKind::Number { value, digits })
        } else if let Some(m) = caps.name("word") {
            (m, TokenKind::Word)
        } else {
            let m = caps.name("punct").expect("alternation is exhaustive");
            (m, TokenKind::Punct(m.as_str().chars().next().unwrap_or(' ')))
        };
        raw.push(Token {
            text: m.as_str().to_lowercase().replace('’', "'"),
            span: m.range(),
            kind,
        });
    }
    fold_number_words(raw)
}

#[derive(Debug, Clone, Copy)]
enum NumberPart {
    Unit(u64),
    Tens(u64),
    Hundred,
    Scale(u64),
}

fn word_value(t: &Token) -> Option<NumberPart> {
    let w = t.word()?;
    if let Some(v) = lookup(UNITS, w) {
        return Some(NumberPart::Unit(v as u64));
    }
    if let Some(v) = lookup(TENS, w) {
        return Some(NumberPart::Tens(v as u64));
    }
    if w == "hundred" {
        return Some(NumberPart::Hundred);
    }
    lookup(SCALES, w).map(NumberPart::Scale)
}

fn fold_number_words(tokens: Vec<Token>) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        // "twenty-first" / "twenty first"
        if let Some(NumberPart::Tens(tens)) = word_value(&tokens[i]) {
            let mut j = i + 1;
            if tokens.get(j).is_some_and(|t| t.kind == TokenKind::Punct('-')) {
                j += 1;
            }
            if let Some(o) = tokens.get(j).and_then(Token::word).and_then(ordinal_word) {
                if o < 10 {
                    let value = tens as u32 + o;
                    out.push(Token {
                        text: value.to_string(),
                        span: tokens[i].span.start..tokens[j].span.end,
                        kind: TokenKind::Ordinal(value),
                    });
                    i = j + 1;
                    continue;
                }
            }
        }
        if let Some((value, end)) = parse_number_phrase(&tokens, i) {
            out.push(Token {
                text: value.to_string(),
                span: tokens[i].span.start..tokens[end - 1].span.end,
                kind: TokenKind::Number {
                    value: value as f64,
                    digits: 0,
                },
            });
            i = end;
            continue;
        }
        let mut t = tokens[i].clone();
        if let Some(o) = t.word().and_then(ordinal_word) {
            t.kind = TokenKind::Ordinal(o);
        }
        out.push(t);
        i += 1;
    }
    out
}

/// Longest number-word phrase starting at `start`, returned as
/// `(value, end)` with `end` exclusive. "10 thousand" is accepted too.
fn parse_number_phrase(tokens: &[Token], start: usize) -> Option<(u64, usize)> {
    if let TokenKind::Number { value, digits } = tokens[start].kind {
        return match tokens.get(start + 1).and_then(word_value) {
            Some(NumberPart::Scale(s)) if digits > 0 => Some(((value as u64).saturating_mul(s), start + 2)),
            _ => None,
        };
    }
    if !matches!(
        word_value(&tokens[start]),
        Some(NumberPart::Unit(_) | NumberPart::Tens(_))
    ) {
        return None;
    }

    let (mut total, mut current) = (0u64, 0u64);
    let mut last: Option<NumberPart> = None;
    let mut end = start;
    let mut i = start;
    while i < tokens.len() {
        let Some(part) = word_value(&tokens[i]) else {
            let next = tokens.get(i + 1).and_then(word_value);
            let hyphen_bridge = tokens[i].kind == TokenKind::Punct('-')
                && matches!(last, Some(NumberPart::Tens(_)))
                && matches!(next, Some(NumberPart::Unit(u)) if (1..10).contains(&u));
            let and_bridge = tokens[i].is_word("and")
                && matches!(last, Some(NumberPart::Hundred))
                && matches!(next, Some(NumberPart::Unit(_) | NumberPart::Tens(_)));
            if hyphen_bridge || and_bridge {
                i += 1;
                continue;
            }
            break;
        };
        let compatible = match (last, part) {
            (Some(NumberPart::Unit(_)), NumberPart::Unit(_) | NumberPart::Tens(_)) => false,
            (Some(NumberPart::Tens(_)), NumberPart::Tens(_)) => false,
            (Some(NumberPart::Tens(_)), NumberPart::Unit(u)) => (1..10).contains(&u),
            (Some(NumberPart::Hundred), NumberPart::Hundred) => false,
            _ => true,
        };
        if !compatible {
            break;
        }
        match part {
            NumberPart::Unit(v) | NumberPart::Tens(v) => current += v,
            NumberPart::Hundred => current = current.max(1) * 100,
            NumberPart::Scale(s) => {
                total += current.max(1) * s;
                current = 0;
            }
        }
        last = Some(part);
        i += 1;
        end = i;
    }
    Some((total + current, end))
}
