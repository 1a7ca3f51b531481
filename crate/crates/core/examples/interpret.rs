//! Interpret utterances in different screen contexts and print the outcome
//! as JSON.

use chrono::NaiveDate;
use datahand::datastore::DataSourceType;
use datahand::interpreter::{interpret, CycleType, InteractionContext, PlotSlot, PressedElement};
use datahand::timeparse::{DateRange, ReferenceFrame};

fn main() {
    let frame = ReferenceFrame::new(NaiveDate::from_ymd_opt(2020, 8, 27).unwrap());
    let aug = |y| DateRange::month(y, 8).unwrap();
    let week = DateRange::trailing_days(frame.reference_date, 7).unwrap();

    let home = InteractionContext::home(week, frame.clone());
    let sleep = InteractionContext::detail(DataSourceType::SleepRange, aug(2020), frame.clone());
    let compare = InteractionContext::two_range(DataSourceType::SleepRange, aug(2019), aug(2020), frame.clone());
    let holding_a = compare.clone().pressing(PressedElement::AggregationPlot {
        slot: PlotSlot::A,
        range: aug(2019),
    });
    let holding_start = home
        .clone()
        .pressing(PressedElement::StartDateLabel { date: week.start });
    let by_month = InteractionContext::cyclical(
        DataSourceType::StepCount,
        DateRange::year(2020).unwrap(),
        CycleType::MonthOfYear,
        frame.clone(),
    );

    let cases = [
        ("Home", &home, "Show hours slept for the last 90 days"),
        ("Home, holding the start date", &holding_start, "January 1"),
        ("Home", &home, "Days I walked more than 10,000 steps last month"),
        ("Sleep detail", &sleep, "Days I woke up earlier than 7:30 AM"),
        ("Sleep detail", &sleep, "Compare with last August"),
        ("Comparison", &compare, "February 2020"),
        ("Comparison, holding plot A", &holding_a, "February 2020"),
        ("Steps by month", &by_month, "Show 2019 by month"),
        ("Home", &home, "Compare hours slept"),
        ("Home", &home, "how are you"),
    ];
    for (page, ctx, text) in cases {
        let out = interpret(text, ctx);
        println!("[{page}] {text:?}");
        println!("  {}", serde_json::to_string(&out).unwrap());
    }
}
