use chrono::{Duration, NaiveDate, NaiveTime};
use datahand::datastore::{decode_sleep, encode_sleep, generate_fixture, DataSourceType, Dataset, DatasetBuilder};
use datahand::timeparse::{DateRange, LocalDate};
use proptest::prelude::*;

fn d(y: i32, m: u32, day: u32) -> LocalDate {
    NaiveDate::from_ymd_opt(y, m, day).unwrap()
}

fn span() -> DateRange {
    DateRange::new(d(2016, 1, 1), d(2020, 8, 27)).unwrap()
}

fn all_csv(ds: &Dataset) -> String {
    DataSourceType::ALL
        .iter()
        .map(|s| ds.to_csv(*s))
        .collect::<Vec<_>>()
        .join("")
        + &ds.profile_csv()
}

#[test]
fn fixture_is_deterministic() {
    let a = generate_fixture(42, span());
    let b = generate_fixture(42, span());
    assert_eq!(a, b);
    assert_eq!(all_csv(&a), all_csv(&b));
}

#[test]
fn fixture_depends_on_seed() {
    let a = generate_fixture(42, span());
    let b = generate_fixture(43, span());
    assert_ne!(a.to_csv(DataSourceType::StepCount), b.to_csv(DataSourceType::StepCount));
}

#[test]
fn fixture_records_satisfy_invariants() {
    let ds = generate_fixture(42, span());
    let days = span().num_days() as f64;
    for s in DataSourceType::NUMERIC {
        for v in ds.numeric(s).values() {
            assert!(s.accepts(*v), "{s} {v}");
        }
        let cov = ds.coverage(s).unwrap();
        assert!(span().contains(cov.start) && span().contains(cov.end));
        let missing = 1.0 - ds.len(s) as f64 / days;
        assert!((0.03..0.07).contains(&missing), "{s}: {missing}");
    }
    for rec in ds.sleep().values() {
        assert!((-720..720).contains(&rec.bedtime));
        assert!(rec.waketime < 1440);
        assert!((rec.bedtime as i32) < rec.waketime as i32);
    }
    assert_eq!(ds.profile().step_goal, 10_000);
}

#[test]
fn snapshot_round_trips_through_disk() {
    let ds = generate_fixture(7, DateRange::new(d(2020, 1, 1), d(2020, 3, 31)).unwrap());
    let dir = tempfile::tempdir().unwrap();
    ds.write_dir(dir.path()).unwrap();
    let back = Dataset::load_dir(dir.path()).unwrap();
    assert_eq!(ds, back);
}

#[test]
fn seven_day_range_with_one_gap() {
    let ds = generate_fixture(42, span());
    // scan for a week with exactly one missing step day
    let series = ds.numeric(DataSourceType::StepCount);
    let week = span()
        .days()
        .filter_map(|start| DateRange::new(start, start + Duration::days(6)))
        .filter(|w| span().contains(w.end))
        .find(|w| w.days().filter(|x| !series.contains_key(x)).count() == 1)
        .expect("fixture has such a week");
    assert_eq!(ds.get_range(DataSourceType::StepCount, week).len(), 6);
}

proptest! {
    #[test]
    fn ingest_is_idempotent(seed in 0u64..1000, source_idx in 0usize..5) {
        let source = DataSourceType::ALL[source_idx];
        let ds = generate_fixture(seed, DateRange::new(d(2020, 1, 1), d(2020, 2, 15)).unwrap());
        let csv = ds.to_csv(source);
        let mut once = DatasetBuilder::new();
        once.ingest(csv.as_bytes(), source).unwrap();
        let mut twice = once.clone();
        twice.ingest(csv.as_bytes(), source).unwrap();
        prop_assert_eq!(once.seal(), twice.seal());
    }

    #[test]
    fn sleep_encoding_round_trips(day in 0i64..3000, bed in -720i64..700, len in 1i64..700) {
        let date = d(2015, 1, 1) + Duration::days(day);
        let midnight = date.and_time(NaiveTime::MIN);
        let bed_at = midnight + Duration::minutes(bed);
        let wake_at = midnight + Duration::minutes((bed + len).clamp(0, 1439));
        prop_assume!(bed_at < wake_at);
        let rec = encode_sleep(date, bed_at, wake_at).unwrap();
        prop_assert_eq!(decode_sleep(&rec), (bed_at, wake_at));
    }

    #[test]
    fn get_range_is_an_ordered_contiguous_slice(start in 0i64..1700, len in 0i64..120) {
        let ds = generate_fixture(42, span());
        let a = d(2016, 1, 1) + Duration::days(start);
        let r = DateRange::new(a, a + Duration::days(len)).unwrap();
        for s in DataSourceType::ALL {
            let got = ds.get_range(s, r);
            prop_assert!(got.windows(2).all(|w| w[0].date() < w[1].date()));
            let expected = r.days().filter(|x| ds.has_data(s, *x)).count();
            prop_assert_eq!(got.len(), expected);
        }
    }
}
