//! Writes the synthetic dataset as CSV files and loads it back.
//!
//!     cargo run --example generate_fixture -- /tmp/fixture 7

use std::path::PathBuf;

use chrono::NaiveDate;
use datahand::datastore::{generate_fixture, DataSourceType, Dataset};
use datahand::timeparse::DateRange;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("datahand-fixture"));
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);
    let span = DateRange::new(
        NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
        NaiveDate::from_ymd_opt(2020, 8, 27).unwrap(),
    )
    .unwrap();

    let ds = generate_fixture(seed, span);
    ds.write_dir(&dir)?;
    let back = Dataset::load_dir(&dir)?;
    println!("seed {seed}, {span}, written to {}", dir.display());
    for s in DataSourceType::ALL {
        println!("  {:<16} {:>4} records", s.file_name(), back.len(s));
    }
    println!("  profile: step goal {}", back.profile().step_goal);
    assert_eq!(back, ds, "round trip changed the data");
    println!("reloaded dataset is identical");
    Ok(())
}
