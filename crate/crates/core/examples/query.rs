//! Aggregates, comparisons and highlight queries over the synthetic fixture.

use chrono::NaiveDate;
use datahand::datastore::{generate_fixture, DataSourceType};
use datahand::interpreter::{Aspect, Comparator, ConditionSpec, CycleType, Operand};
use datahand::queryengine::{aggregate, compare_cyclical, compare_two_ranges, run_highlight_query, Aggregate};
use datahand::timeparse::{DateRange, TimeOfDay};

fn show(a: &Aggregate) -> String {
    serde_json::to_string(a).unwrap()
}

fn main() {
    let span = DateRange::new(
        NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(),
        NaiveDate::from_ymd_opt(2020, 8, 27).unwrap(),
    )
    .unwrap();
    let ds = generate_fixture(42, span);
    let july = DateRange::month(2020, 7).unwrap();

    for source in DataSourceType::ALL {
        println!(
            "{:<19} July 2020  {}",
            source.label(),
            show(&aggregate(&ds, source, july))
        );
    }

    let jan = |y| DateRange::month(y, 1).unwrap();
    let two = compare_two_ranges(&ds, DataSourceType::StepCount, jan(2018), jan(2019));
    println!("\nsteps, January 2018 vs 2019");
    println!("  A {}", show(&two.stats_a));
    println!("  B {}", show(&two.stats_b));

    let res = compare_cyclical(
        &ds,
        DataSourceType::HoursSlept,
        DateRange::year(2019).unwrap(),
        CycleType::DayOfWeek,
    );
    println!("\nhours slept in 2019 by day of the week");
    for g in &res.groups {
        if let Aggregate::Numeric(s) = &g.stats {
            println!("  {} avg {:.2} over {} nights", g.label, s.avg.unwrap_or(f64::NAN), s.n);
        }
    }

    let conditions = [
        ConditionSpec {
            aspect: Aspect::Value,
            source: DataSourceType::StepCount,
            comparator: Comparator::Gt,
            operand: Some(Operand::Quantity(10_000.0)),
        },
        ConditionSpec {
            aspect: Aspect::WakeTime,
            source: DataSourceType::SleepRange,
            comparator: Comparator::Lt,
            operand: Some(Operand::Clock(TimeOfDay::from_hm(7, 0).unwrap())),
        },
        ConditionSpec {
            aspect: Aspect::GoalRef,
            source: DataSourceType::StepCount,
            comparator: Comparator::Gte,
            operand: None,
        },
        ConditionSpec {
            aspect: Aspect::Value,
            source: DataSourceType::Weight,
            comparator: Comparator::Max,
            operand: None,
        },
    ];
    println!();
    for c in conditions {
        let hits = run_highlight_query(&ds, &c, july, ds.profile());
        let first: Vec<String> = hits.dates.iter().take(5).map(|d| d.to_string()).collect();
        println!("{c}: {} days in July 2020, first {}", hits.count, first.join(", "));
    }
}
