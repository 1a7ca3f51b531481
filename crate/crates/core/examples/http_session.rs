//! Starts the HTTP service on a free port and drives one session through
//! utterances and typed intents.

use std::sync::Arc;

use chrono::NaiveDate;
use datahand::datastore::generate_fixture;
use datahand::interface::{router, AppState};
use datahand::timeparse::{DateRange, ReferenceFrame};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let today = NaiveDate::from_ymd_opt(2020, 8, 27).unwrap();
    let span = DateRange::new(NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(), today).unwrap();
    let app = AppState::new(Arc::new(generate_fixture(42, span)), ReferenceFrame::new(today));

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    tokio::spawn(async move { axum::serve(listener, router(app)).await });
    println!("serving on {base}");

    let client = reqwest::Client::new();
    let created: Value = client.post(format!("{base}/api/sessions")).send().await?.json().await?;
    let id = created["id"].as_str().unwrap().to_string();
    println!("session {id}, page {}", created["state"]["page"]);

    let steps = [
        (
            "command",
            json!({"utterance": "Compare January 2018 with January 2019"}),
        ),
        (
            "command",
            json!({"utterance": "February 2018", "pressed": {"kind": "aggregation_plot", "slot": "a"}}),
        ),
        ("command", json!({"utterance": "Summer 2019"})),
        (
            "intent",
            json!({"type": "set_range", "range": {"start": "2020-07-01", "end": "2020-07-31"}}),
        ),
        ("intent", json!({"type": "swipe", "direction": "back"})),
        ("command", json!({"utterance": "Days I slept less than 6 hours"})),
        (
            "intent",
            json!({"type": "edit_query_param", "edit": {"param": "operand", "operand": {"type": "quantity", "value": 7.0}}}),
        ),
        ("intent", json!({"type": "undo"})),
    ];
    for (path, body) in steps {
        let resp: Value = client
            .post(format!("{base}/api/sessions/{id}/{path}"))
            .json(&body)
            .send()
            .await?
            .json()
            .await?;
        let fb = &resp["feedback"];
        let said = fb.get("summary").or(fb.get("message")).unwrap_or(&fb["text"]);
        println!("\nPOST {path} {body}");
        println!("  {} {said}", fb["kind"]);
        println!("  page {} range {}", resp["state"]["page"], resp["state"]["range"]);
        if let Some(q) = resp["state"]["query_bar"].as_object() {
            println!(
                "  query: {} {} {} -> {} days",
                q["aspect"], q["comparator"], q["operand"], q["count"]
            );
        }
    }

    let data: Value = client
        .get(format!("{base}/api/data/steps?start=2020-08-21&end=2020-08-27"))
        .send()
        .await?
        .json()
        .await?;
    println!(
        "\nGET /api/data/steps: {} records",
        data["records"].as_array().map_or(0, Vec::len)
    );
    Ok(())
}
