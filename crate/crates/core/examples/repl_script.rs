//! Feeds REPL lines to a session, the same way `datahand repl` reads stdin.

use std::sync::Arc;

use chrono::NaiveDate;
use datahand::datastore::generate_fixture;
use datahand::interface::Repl;
use datahand::session::Session;
use datahand::timeparse::{DateRange, ReferenceFrame};

fn main() {
    let today = NaiveDate::from_ymd_opt(2020, 8, 27).unwrap();
    let span = DateRange::new(NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(), today).unwrap();
    let session = Session::new(Arc::new(generate_fixture(42, span)), ReferenceFrame::new(today));
    let mut repl = Repl::new(session);
    let lines = [
        "@start January 1",
        "Days I walked more than 10,000 steps last month",
        "weight",
        ":swipe back",
        ":undo",
        ":dismiss",
        "Show hours slept by day of the week",
        "@group1 2019",
        ":home",
        "what's the weather",
    ];
    for line in lines {
        println!("> {line}");
        println!("{}\n", repl.process_line(line).text);
    }
}
