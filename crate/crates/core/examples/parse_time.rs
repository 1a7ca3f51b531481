//! Resolve time expressions against a reference date.
//!
//!     cargo run --example parse_time -- "last Thanksgiving" "from May 3 to June 1"

use chrono::NaiveDate;
use datahand::timeparse::{parse_time_expressions, ReferenceFrame, TimeValue};

fn main() {
    let frame = ReferenceFrame::new(NaiveDate::from_ymd_opt(2020, 8, 27).unwrap());
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "2017",
            "January 1",
            "last month",
            "last 30 days",
            "this summer",
            "last Thanksgiving",
            "Lunar New Year 2019",
            "from May 3 to June 1",
            "two weeks ago",
            "woke up earlier than 7:30 AM",
        ]
        .map(String::from)
        .to_vec();
    }
    println!("reference date {}", frame.reference_date);
    for text in &inputs {
        let found = parse_time_expressions(text, &frame);
        if found.is_empty() {
            println!("{text:<32} (no time expression)");
        }
        for e in found {
            let shown = match e.value {
                TimeValue::Date(d) => format!("date  {d}"),
                TimeValue::Range(r) => format!("range {r}"),
                TimeValue::Clock(t) => format!("clock {t}"),
            };
            println!("{:<32} {shown}", &text[e.span]);
        }
    }
}
