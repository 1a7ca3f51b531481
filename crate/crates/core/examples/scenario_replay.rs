//! Replays a full exploration: a start-date edit, two queries, a sleep
//! comparison with one side replaced, and a by-month view.

use std::sync::Arc;

use chrono::NaiveDate;
use datahand::datastore::generate_fixture;
use datahand::interface::{render_feedback, StateView};
use datahand::interpreter::PlotSlot;
use datahand::session::{PressedKind, PressedTarget, Session};
use datahand::timeparse::{DateRange, ReferenceFrame};

fn main() {
    let today = NaiveDate::from_ymd_opt(2020, 8, 27).unwrap();
    let span = DateRange::new(NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(), today).unwrap();
    let mut session = Session::new(Arc::new(generate_fixture(42, span)), ReferenceFrame::new(today));

    let script = [
        ("January 1", PressedTarget::of(PressedKind::StartDateLabel)),
        ("Days I met my step goal", PressedTarget::default()),
        ("Sleep range of this month", PressedTarget::default()),
        ("Days I woke up earlier than 7:30 AM", PressedTarget::default()),
        ("Compare with last August", PressedTarget::default()),
        ("February 2020", PressedTarget::plot(PlotSlot::A)),
        ("Show 2020 by month", PressedTarget::default()),
    ];
    print!("{}", StateView::of(&session).render_text());
    for (text, target) in script {
        let held = match target.kind {
            PressedKind::None => String::new(),
            kind => format!(" (holding {kind:?})"),
        };
        println!("\n> {text}{held}");
        let fb = session.command(text, target);
        println!("{}", render_feedback(&fb));
        print!("{}", StateView::of(&session).render_text());
    }
}
