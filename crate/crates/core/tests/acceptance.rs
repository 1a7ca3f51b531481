//! One PASS/FAIL line per primary acceptance criterion. Exits nonzero if
//! any fails.

mod common;

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::sync::{mpsc, Arc};
use std::time::{Duration, Instant};

use common::oracle::Oracle;
use common::*;
use datahand::datastore::{generate_fixture, DataSourceType};
use datahand::interpreter::*;
use datahand::queryengine::{aggregate, compare_cyclical, compare_two_ranges, run_highlight_query};
use datahand::session::{Feedback, PressedKind, PressedTarget, Session};
use datahand::timeparse::{parse_time_expressions, TimeValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const GOLDEN_BUDGET: Duration = Duration::from_secs(5);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const ORACLE_PAIRS: usize = 1000;
const ORACLE_CONDITIONS: usize = 1000;
const SESSION_SEQUENCES: usize = 10_000;
const FUZZ_STRINGS: usize = 100_000;
const FUZZ_BUDGET: Duration = Duration::from_millis(50);
const SCRIPT_STEPS: usize = 50;
const SPAN_FLAG: &str = "2016-01-01..2020-08-27";
const REF_FLAG: &str = "2020-08-27";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn golden_corpus_criterion() -> Outcome {
    let start = Instant::now();
    let corpus = golden_corpus();
    let failures: Vec<String> = corpus.iter().filter_map(|g| g.check().err()).collect();
    let took = start.elapsed();
    if !failures.is_empty() {
        return Err(format!(
            "{} of {} mismatched: {}",
            failures.len(),
            corpus.len(),
            failures.join("; ")
        ));
    }
    if corpus.len() < 20 {
        return Err(format!("only {} utterances", corpus.len()));
    }
    if took >= GOLDEN_BUDGET {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("{}/{} exact, {took:.1?}", corpus.len(), corpus.len()))
}

fn time_table_criterion() -> Outcome {
    let table = [
        ("2017", TimeValue::Range(year(2017))),
        ("January 1", TimeValue::Date(d(2020, 1, 1))),
        ("last month", TimeValue::Range(month(2020, 7))),
        ("last 30 days", TimeValue::Range(r(d(2020, 7, 29), d(2020, 8, 27)))),
        ("this summer", TimeValue::Range(r(d(2020, 6, 1), d(2020, 8, 31)))),
        ("last Thanksgiving", TimeValue::Date(d(2019, 11, 28))),
    ];
    let frame = frame();
    for (text, want) in table {
        let got = parse_time_expressions(text, &frame);
        if got.len() != 1 || got[0].value != want || got[0].span != (0..text.len()) {
            return Err(format!("{text:?} gave {got:?}"));
        }
    }
    Ok(format!("{}/{} exact", table.len(), table.len()))
}

fn page_label(s: &Session) -> String {
    let st = s.state();
    let src = st.source.map(|s| s.label()).unwrap_or("-");
    match st.page {
        Page::Home => "Home".into(),
        Page::Detail => format!("Detail({src}, {})", datahand::session::describe_range(st.range)),
        Page::TwoRange => {
            let (a, b) = st.comparison.unwrap();
            format!(
                "TwoRange({} | {})",
                datahand::session::describe_range(a),
                datahand::session::describe_range(b)
            )
        }
        Page::Cyclical => format!(
            "Cyclical({}, {:?})",
            datahand::session::describe_range(st.range),
            st.cycle.unwrap()
        ),
    }
}

fn scenario_criterion() -> Outcome {
    let mut s = Session::new(Arc::new(scenario_dataset()), frame());
    let steps: [(&str, PressedTarget); 7] = [
        ("January 1", PressedTarget::of(PressedKind::StartDateLabel)),
        ("Days I met my step goal", PressedTarget::default()),
        ("Sleep range of this month", PressedTarget::default()),
        ("Days I woke up earlier than 7:30 AM", PressedTarget::default()),
        ("Compare with last August", PressedTarget::default()),
        ("February 2020", PressedTarget::plot(PlotSlot::A)),
        ("Show 2020 by month", PressedTarget::default()),
    ];
    let mut pages = vec![page_label(&s)];
    let mut woke_early = None;
    for (text, target) in steps {
        let fb = s.command(text, target);
        if !fb.is_executed() {
            return Err(format!("{text:?} gave {fb:?}"));
        }
        if text.starts_with("Days I woke") {
            woke_early = s.state().active_query.as_ref().map(|q| q.count);
        }
        let label = page_label(&s);
        if pages.last() != Some(&label) {
            pages.push(label);
        }
    }
    let want = [
        "Home",
        "Detail(Sleep Range, August 2020)",
        "TwoRange(August 2019 | August 2020)",
        "TwoRange(February 2020 | August 2020)",
        "Cyclical(2020, MonthOfYear)",
    ];
    if pages != want {
        return Err(format!("visited {}", pages.join(" -> ")));
    }
    if woke_early != Some(5) {
        return Err(format!("woke-early count {woke_early:?}, expected 5"));
    }
    Ok(format!("{}; woke-early count 5", pages.join(" -> ")))
}

fn oracle_criterion() -> Outcome {
    let ds = generate_fixture(42, fixture_span());
    let start = Instant::now();
    let oracle = Oracle::new(&ds);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..ORACLE_PAIRS {
        let source = DataSourceType::ALL[rng.random_range(0..5)];
        let range = random_range(&mut rng, fixture_span());
        let other = random_range(&mut rng, fixture_span());
        let ctx = |e: String| format!("pair {i} ({source:?}, {range}): {e}");
        oracle
            .check_aggregate(source, range, None, &aggregate(&ds, source, range))
            .map_err(ctx)?;
        let two = compare_two_ranges(&ds, source, range, other);
        oracle.check_aggregate(source, range, None, &two.stats_a).map_err(ctx)?;
        oracle.check_aggregate(source, other, None, &two.stats_b).map_err(ctx)?;
        for cycle in [CycleType::DayOfWeek, CycleType::MonthOfYear] {
            let res = compare_cyclical(&ds, source, range, cycle);
            if res.groups.len() != cycle.group_count() {
                return Err(ctx(format!("{} groups for {cycle:?}", res.groups.len())));
            }
            for g in &res.groups {
                oracle
                    .check_aggregate(source, range, Some((cycle, g.id)), &g.stats)
                    .map_err(ctx)?;
            }
        }
    }
    for i in 0..ORACLE_CONDITIONS {
        let c = random_condition(&mut rng);
        let range = random_range(&mut rng, fixture_span());
        let got = run_highlight_query(&ds, &c, range, ds.profile());
        let want = oracle.highlight(&c, range);
        if got.dates != want || got.count != want.len() {
            return Err(format!(
                "condition {i} {c} over {range}: {} days vs oracle {}",
                got.count,
                want.len()
            ));
        }
    }
    let took = start.elapsed();
    if took >= ORACLE_BUDGET {
        return Err(format!("took {took:?}"));
    }
    Ok(format!(
        "{ORACLE_PAIRS} pairs, {ORACLE_CONDITIONS} conditions, rel tol 1e-9, {took:.1?}"
    ))
}

fn feedback_criterion() -> Outcome {
    let detail_aug = detail(DataSourceType::StepCount, month(2020, 8));
    let tr = two_range(DataSourceType::StepCount, month(2019, 8), month(2020, 8));
    let cyc = InteractionContext::cyclical(DataSourceType::StepCount, year(2020), CycleType::MonthOfYear, frame());
    let cases: [(&str, InteractionContext, Option<InvalidReason>); 5] = [
        ("Compare hours slept", home(), Some(InvalidReason::MissingPeriods)),
        ("Summer 2019", tr.clone(), Some(InvalidReason::AmbiguousSlot)),
        (
            "Days I walked more than 10,000 steps",
            tr,
            Some(InvalidReason::UnsupportedOnPage),
        ),
        (
            "Days I walked more than 10,000 steps",
            cyc,
            Some(InvalidReason::UnsupportedOnPage),
        ),
        ("purple monkey dishwasher", detail_aug, None),
    ];
    for (text, ctx, want) in cases {
        let got = interpret(text, &ctx);
        let ok = match (&got, want) {
            (InterpretOutcome::Invalid { reason, suggestion, .. }, Some(w)) => {
                *reason == w
                    && (w != InvalidReason::AmbiguousSlot
                        || suggestion.as_deref().is_some_and(|s| s.contains("Press and hold")))
            }
            (InterpretOutcome::Unrecognized { text: t }, None) => t == text,
            _ => false,
        };
        if !ok {
            return Err(format!("{text:?} on {:?} gave {got:?}", ctx.page));
        }
    }
    // Executed commands confirm and are undoable.
    let mut s = Session::new(Arc::new(generate_fixture(42, fixture_span())), frame());
    match s.command("Show 2019", PressedTarget::default()) {
        Feedback::Executed { undoable: true, .. } => {}
        other => return Err(format!("confirmation missing: {other:?}")),
    }
    Ok("missing periods, ambiguous slot with suggestion, unsupported on page, unrecognized, confirmation".into())
}

fn session_criterion() -> Outcome {
    let ds = Arc::new(generate_fixture(42, fixture_span()));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut steps = 0usize;
    for seq in 0..SESSION_SEQUENCES {
        let mut s = Session::new(ds.clone(), frame());
        let initial = s.state().clone();
        let len = rng.random_range(1..30);
        for _ in 0..len {
            let before = s.state().clone();
            let action = random_action(&mut rng, &before);
            let fb = perform(&mut s, &action);
            check_step(&before, &s, &fb).map_err(|e| format!("sequence {seq}, {action:?}: {e}"))?;
            if let Feedback::Executed { undoable: true, .. } = fb {
                let mut probe = s.clone();
                probe.undo();
                if probe.state() != &before {
                    return Err(format!(
                        "sequence {seq}: undo of {action:?} did not restore the snapshot"
                    ));
                }
            }
            steps += 1;
        }
        while s.undo_depth() > 0 {
            s.undo();
        }
        if s.state() != &initial {
            return Err(format!("sequence {seq}: full unwind did not reach the initial state"));
        }
    }
    Ok(format!("{SESSION_SEQUENCES} sequences, {steps} steps"))
}

const FUZZ_WORDS: &[&str] = &[
    "compare",
    "with",
    "and",
    "vs",
    "last",
    "this",
    "next",
    "days",
    "day",
    "week",
    "month",
    "year",
    "I",
    "walked",
    "slept",
    "woke",
    "up",
    "went",
    "to",
    "bed",
    "earlier",
    "later",
    "than",
    "more",
    "less",
    "at",
    "least",
    "most",
    "steps",
    "sleep",
    "range",
    "weight",
    "heart",
    "rate",
    "hours",
    "minutes",
    "lb",
    "kg",
    "by",
    "of",
    "the",
    "summer",
    "winter",
    "spring",
    "fall",
    "January",
    "May",
    "December",
    "Thanksgiving",
    "Christmas",
    "Easter",
    "Lunar",
    "New",
    "Year",
    "2017",
    "2020",
    "1",
    "31",
    "10,000",
    "7:30",
    "AM",
    "pm",
    "between",
    "from",
    "until",
    "since",
    "ago",
    "goal",
    "met",
    "show",
    "go",
    "home",
    "undo",
    "maximum",
    "minimum",
    "highest",
    "-",
    "/",
    ".",
    "?",
    "'",
    "weekday",
    "Monday",
    "first",
    "second",
    "quarter",
    "half",
    "dozen",
    "ten",
    "thousand",
    "0",
    "99999999999999999999",
];

fn fuzz_string(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..3) {
        0 => {
            let n = rng.random_range(0..60);
            (0..n).map(|_| rng.random::<char>()).collect()
        }
        1 => {
            let n = rng.random_range(0..120);
            (0..n).map(|_| rng.random_range(' '..='~')).collect()
        }
        _ => {
            let n = rng.random_range(0..25);
            let words: Vec<&str> = (0..n)
                .map(|_| FUZZ_WORDS[rng.random_range(0..FUZZ_WORDS.len())])
                .collect();
            words.join(if rng.random_bool(0.9) { " " } else { "" })
        }
    }
}

fn fuzz_context(rng: &mut ChaCha8Rng) -> InteractionContext {
    let source = DataSourceType::ALL[rng.random_range(0..5)];
    let range = random_range(rng, fixture_span());
    let ctx = match rng.random_range(0..4) {
        0 => InteractionContext::home(range, frame()),
        1 => detail(source, range),
        2 => two_range(source, range, month(2020, 8)),
        _ => InteractionContext::cyclical(source, range, CycleType::DayOfWeek, frame()),
    };
    let pressed = match (rng.random_range(0..4), ctx.page) {
        (0, Page::Home | Page::Detail) => PressedElement::StartDateLabel { date: range.start },
        (1, Page::Home | Page::Detail) => PressedElement::EndDateLabel { date: range.end },
        (2, Page::TwoRange) => PressedElement::AggregationPlot {
            slot: PlotSlot::B,
            range: month(2020, 8),
        },
        (3, _) => PressedElement::DataSourceLabel { source },
        _ => PressedElement::None,
    };
    ctx.pressing(pressed)
}

fn fuzz_criterion() -> Outcome {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = (Duration::ZERO, String::new());
        let mut total = Duration::ZERO;
        for _ in 0..FUZZ_STRINGS {
            let text = fuzz_string(&mut rng);
            let ctx = fuzz_context(&mut rng);
            let t = Instant::now();
            let out = interpret(&text, &ctx);
            let took = t.elapsed();
            std::hint::black_box(out);
            total += took;
            if took > worst.0 {
                worst = (took, text);
            }
        }
        let _ = tx.send((worst, total));
    });
    // A hang shows up as a missing result.
    let ((worst, text), total) = rx
        .recv_timeout(Duration::from_secs(600))
        .map_err(|_| "interpreter crashed or hung".to_string())?;
    if worst >= FUZZ_BUDGET {
        return Err(format!("{text:?} took {worst:?}"));
    }
    Ok(format!(
        "{FUZZ_STRINGS} strings, max {worst:.2?} (budget {FUZZ_BUDGET:?}), mean {:.1?}",
        total / FUZZ_STRINGS as u32
    ))
}

/// One script line in REPL syntax and the matching HTTP request.
struct ScriptStep {
    line: String,
    path: &'static str,
    body: Value,
}

const SCRIPT_UTTERANCES: &[&str] = &[
    "Show 2019",
    "last 30 days",
    "This March",
    "Days I walked more than 10,000 steps",
    "Days I woke up earlier than 7:30 AM",
    "Days I met my step goal",
    "Sleep range of this month",
    "Compare with last August",
    "Compare January 2018 with January 2019",
    "Show 2020 by month",
    "Show hours slept by day of the week",
    "heart rate",
    "weight for summer 2019",
    "maximum weight",
    "florb the wugs",
    "Compare hours slept",
];

fn script() -> Vec<ScriptStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let intent = |line: &str, body: Value| ScriptStep {
        line: line.into(),
        path: "intent",
        body,
    };
    (0..SCRIPT_STEPS)
        .map(|_| match rng.random_range(0..10) {
            0 => intent(":swipe back", json!({"type": "swipe", "direction": "back"})),
            1 => intent(":swipe forward", json!({"type": "swipe", "direction": "forward"})),
            2 => intent(":undo", json!({"type": "undo"})),
            3 if rng.random_bool(0.5) => intent(":dismiss", json!({"type": "dismiss_query"})),
            3 => intent(":home", json!({"type": "go_home"})),
            k => {
                let text = SCRIPT_UTTERANCES[rng.random_range(0..SCRIPT_UTTERANCES.len())];
                let (prefix, pressed) = match k {
                    4 => ("@start ", json!({"kind": "start_date_label"})),
                    5 => ("@plotA ", json!({"kind": "aggregation_plot", "slot": "a"})),
                    6 => ("@group2 ", json!({"kind": "aggregation_plot", "slot": "group:2"})),
                    _ => ("", json!({"kind": "none"})),
                };
                let text = if prefix.is_empty() {
                    text
                } else {
                    ["January 1", "February 2020", "2018", "Summer 2019"][k - 4]
                };
                ScriptStep {
                    line: format!("{prefix}{text}"),
                    path: "command",
                    body: json!({"utterance": text, "pressed": pressed}),
                }
            }
        })
        .collect()
}

fn common_flags() -> [&'static str; 6] {
    ["--seed", "42", "--span", SPAN_FLAG, "--ref-date", REF_FLAG]
}

fn via_cli(steps: &[ScriptStep]) -> Result<Value, String> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_datahand"))
        .arg("repl")
        .args(common_flags())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| format!("spawn repl: {e}"))?;
    {
        let mut stdin = child.stdin.take().unwrap();
        for s in steps {
            writeln!(stdin, "{}", s.line).map_err(|e| e.to_string())?;
        }
        writeln!(stdin, ":json\n:quit").map_err(|e| e.to_string())?;
    }
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("repl exited with {}", out.status));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let last = text.lines().last().ok_or("repl printed nothing")?;
    serde_json::from_str(last).map_err(|e| format!("repl :json output: {e}"))
}

struct Child(std::process::Child);

impl Drop for Child {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn via_http(steps: &[ScriptStep]) -> Result<(Value, usize), String> {
    let mut server = Child(
        Command::new(env!("CARGO_BIN_EXE_datahand"))
            .arg("serve")
            .args(common_flags())
            .args(["--port", "0"])
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| format!("spawn serve: {e}"))?,
    );
    let mut line = String::new();
    BufReader::new(server.0.stderr.take().unwrap())
        .read_line(&mut line)
        .map_err(|e| e.to_string())?;
    let base = line
        .trim()
        .strip_prefix("listening on ")
        .ok_or_else(|| format!("unexpected server banner {line:?}"))?
        .to_string();
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let client = reqwest::Client::new();
        let created: Value = client
            .post(format!("{base}/api/sessions"))
            .send()
            .await
            .map_err(|e| e.to_string())?
            .json()
            .await
            .map_err(|e| e.to_string())?;
        let id = created["id"].as_str().ok_or("no session id")?.to_string();
        let mut executed = 0;
        for s in steps {
            let resp = client
                .post(format!("{base}/api/sessions/{id}/{}", s.path))
                .json(&s.body)
                .send()
                .await
                .map_err(|e| e.to_string())?;
            if resp.status() != 200 {
                return Err(format!("{} returned {}", s.line, resp.status()));
            }
            let body: Value = resp.json().await.map_err(|e| e.to_string())?;
            if body["feedback"]["kind"] == "executed" {
                executed += 1;
            }
        }
        let state: Value = client
            .get(format!("{base}/api/sessions/{id}/state"))
            .send()
            .await
            .map_err(|e| e.to_string())?
            .json()
            .await
            .map_err(|e| e.to_string())?;
        Ok((state, executed))
    })
}

fn transport_criterion() -> Outcome {
    let steps = script();
    let cli = via_cli(&steps)?;
    let (http, executed) = via_http(&steps)?;
    if cli != http {
        return Err(format!(
            "final views differ: CLI page {} range {}, HTTP page {} range {}",
            cli["page"], cli["range"], http["page"], http["range"]
        ));
    }
    Ok(format!(
        "{SCRIPT_STEPS} steps ({executed} executed), final page {}, views identical",
        http["page"]
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden utterance corpus", golden_corpus_criterion),
        ("time-resolution table", time_table_criterion),
        ("scenario replay", scenario_criterion),
        ("oracle equivalence", oracle_criterion),
        ("feedback taxonomy", feedback_criterion),
        ("session properties", session_criterion),
        ("interpreter fuzz", fuzz_criterion),
        ("transport neutrality", transport_criterion),
    ];
    // `cargo test --test acceptance -- 4 7` runs only criteria 4 and 7;
    // other arguments are ignored.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{took:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{took:.1?}]", i + 1);
            }
        }
    }
    let _ = std::io::stdout().flush();
    if failed > 0 {
        std::process::exit(1);
    }
}
