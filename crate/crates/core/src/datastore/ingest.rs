//! CSV ingestion and re-emission.
//!
//! Formats (UTF-8, header row required):
//!
//! | file | header |
//! |------|--------|
//! | `steps.csv`, `rhr.csv`, `hours_slept.csv`, `weight.csv` | `date,value` |
//! | `sleep.csv` | `date,bedtime,waketime` (local ISO datetimes, `date` = wake day) |
//! | `profile.csv` | `key,value`, required key `step_goal` |

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};

use super::{DataError, DataSourceType, Dataset, DatasetBuilder, SleepRecord, UserProfile, WeightUnit};
use crate::timeparse::LocalDate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestReport {
    pub loaded: usize,
    /// Rows whose date was already present; the later row wins.
    pub duplicates: usize,
}

const DATETIME_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M",
    "%Y-%m-%d %H:%M:%S",
];

fn parse_datetime(s: &str) -> Option<NaiveDateTime> {
    DATETIME_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

fn parse_date(s: &str, line: u64) -> Result<LocalDate, DataError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| DataError::Row {
        line,
        reason: format!("bad date {s:?}"),
    })
}

fn reader<R: Read>(r: R, expected: &[&str]) -> Result<csv::Reader<R>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers().map_err(|e| DataError::Row {
        line: 1,
        reason: e.to_string(),
    })?;
    let got: Vec<String> = headers.iter().map(|h| h.to_lowercase()).collect();
    if got != expected {
        return Err(DataError::Row {
            line: 1,
            reason: format!("expected header {:?}, found {:?}", expected.join(","), got.join(",")),
        });
    }
    Ok(rdr)
}

/// Converts a (bedtime, waketime) instant pair into the wake-day encoding.
pub fn encode_sleep(date: LocalDate, bed: NaiveDateTime, wake: NaiveDateTime) -> Option<SleepRecord> {
    let midnight = date.and_time(NaiveTime::MIN);
    let bedtime = (bed - midnight).num_minutes();
    let waketime = (wake - midnight).num_minutes();
    SleepRecord::new(date, i16::try_from(bedtime).ok()?, u16::try_from(waketime).ok()?)
}

pub fn decode_sleep(rec: &SleepRecord) -> (NaiveDateTime, NaiveDateTime) {
    let midnight = rec.date.and_time(NaiveTime::MIN);
    (
        midnight + chrono::Duration::minutes(rec.bedtime as i64),
        midnight + chrono::Duration::minutes(rec.waketime as i64),
    )
}

impl DatasetBuilder {
    /// Parses and validates a whole stream before merging any of it, so a
    /// failed ingest leaves the builder untouched.
    pub fn ingest<R: Read>(&mut self, stream: R, source: DataSourceType) -> Result<IngestReport, DataError> {
        let mut report = IngestReport::default();
        if source == DataSourceType::SleepRange {
            let mut staged = Vec::new();
            let mut rdr = reader(stream, &["date", "bedtime", "waketime"])?;
            for rec in rdr.records() {
                let rec = rec.map_err(|e| DataError::Row {
                    line: e.position().map_or(0, |p| p.line()),
                    reason: e.to_string(),
                })?;
                let line = rec.position().map_or(0, |p| p.line());
                let date = parse_date(&rec[0], line)?;
                let instant = |i: usize| {
                    parse_datetime(&rec[i]).ok_or_else(|| DataError::Row {
                        line,
                        reason: format!("bad datetime {:?}", &rec[i]),
                    })
                };
                let (bed, wake) = (instant(1)?, instant(2)?);
                let sleep = encode_sleep(date, bed, wake).ok_or_else(|| DataError::Validation {
                    line,
                    reason: format!("sleep {bed} → {wake} does not fit wake day {date}"),
                })?;
                staged.push(sleep);
            }
            for s in staged {
                if self.sleep.insert(s.date, s).is_some() {
                    report.duplicates += 1;
                }
                report.loaded += 1;
            }
            return Ok(report);
        }

        let mut staged = Vec::new();
        let mut rdr = reader(stream, &["date", "value"])?;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| DataError::Row {
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let date = parse_date(&rec[0], line)?;
            let value: f64 = rec[1].parse().map_err(|_| DataError::Row {
                line,
                reason: format!("bad number {:?}", &rec[1]),
            })?;
            if !source.accepts(value) {
                return Err(DataError::Validation {
                    line,
                    reason: format!("{value} is out of range for {source}"),
                });
            }
            staged.push((date, value));
        }
        let series = self.numeric.entry(source).or_default();
        for (date, value) in staged {
            if series.insert(date, value).is_some() {
                report.duplicates += 1;
            }
            report.loaded += 1;
        }
        Ok(report)
    }

    pub fn ingest_profile<R: Read>(&mut self, stream: R) -> Result<(), DataError> {
        let mut rdr = reader(stream, &["key", "value"])?;
        let mut step_goal = None;
        let mut unit = WeightUnit::Kg;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| DataError::Row {
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            match &rec[0] {
                "step_goal" => {
                    let g: u32 = rec[1].parse().map_err(|_| DataError::Row {
                        line,
                        reason: format!("bad step goal {:?}", &rec[1]),
                    })?;
                    if g == 0 {
                        return Err(DataError::Validation {
                            line,
                            reason: "step_goal must be positive".into(),
                        });
                    }
                    step_goal = Some(g);
                }
                "weight_unit_display" => {
                    unit = match &rec[1] {
                        "kg" => WeightUnit::Kg,
                        "lb" => WeightUnit::Lb,
                        other => {
                            return Err(DataError::Row {
                                line,
                                reason: format!("unknown weight unit {other:?}"),
                            })
                        }
                    }
                }
                _ => {}
            }
        }
        let step_goal = step_goal.ok_or(DataError::Validation {
            line: 1,
            reason: "profile is missing required key step_goal".into(),
        })?;
        self.profile = Some(UserProfile {
            step_goal,
            weight_unit_display: unit,
        });
        Ok(())
    }

    /// Loads every CSV present in `dir`. Metric files are optional;
    /// `profile.csv` is required.
    pub fn load_dir(dir: &Path) -> Result<(DatasetBuilder, Vec<(DataSourceType, IngestReport)>), DataError> {
        let mut b = DatasetBuilder::new();
        let mut reports = Vec::new();
        let wrap = |path: &Path, e: DataError| DataError::File {
            path: path.display().to_string(),
            source: Box::new(e),
        };
        for source in DataSourceType::ALL {
            let path = dir.join(source.file_name());
            if !path.exists() {
                continue;
            }
            let f = fs::File::open(&path)?;
            let r = b.ingest(f, source).map_err(|e| wrap(&path, e))?;
            reports.push((source, r));
        }
        let path = dir.join("profile.csv");
        let f = fs::File::open(&path).map_err(|e| wrap(&path, e.into()))?;
        b.ingest_profile(f).map_err(|e| wrap(&path, e))?;
        Ok((b, reports))
    }
}

impl Dataset {
    pub fn load_dir(dir: &Path) -> Result<Dataset, DataError> {
        Ok(DatasetBuilder::load_dir(dir)?.0.seal())
    }

    /// The CSV text for one source, in the ingestion format.
    pub fn to_csv(&self, source: DataSourceType) -> String {
        let mut out = String::new();
        if source == DataSourceType::SleepRange {
            out.push_str("date,bedtime,waketime\n");
            for rec in self.sleep.values() {
                let (bed, wake) = decode_sleep(rec);
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    rec.date,
                    bed.format("%Y-%m-%dT%H:%M"),
                    wake.format("%Y-%m-%dT%H:%M")
                );
            }
        } else {
            out.push_str("date,value\n");
            for (date, value) in self.numeric(source) {
                let _ = writeln!(out, "{date},{value}");
            }
        }
        out
    }

    pub fn profile_csv(&self) -> String {
        let unit = match self.profile.weight_unit_display {
            WeightUnit::Kg => "kg",
            WeightUnit::Lb => "lb",
        };
        format!(
            "key,value\nstep_goal,{}\nweight_unit_display,{unit}\n",
            self.profile.step_goal
        )
    }

    /// Writes all five series plus `profile.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for source in DataSourceType::ALL {
            fs::write(dir.join(source.file_name()), self.to_csv(source))?;
        }
        fs::write(dir.join("profile.csv"), self.profile_csv())
    }
}
