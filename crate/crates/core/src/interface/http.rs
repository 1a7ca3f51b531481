use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::Mutex;
use tower_http::cors::CorsLayer;
use uuid::Uuid;

use crate::datastore::{DataSourceType, Dataset};
use crate::interpreter::Intent;
use crate::session::{Feedback, PressedTarget, Session, SwipeDirection};
use crate::timeparse::{DateRange, LocalDate, ReferenceFrame};

use super::StateView;

/// Sessions untouched for this long are dropped.
pub const SESSION_IDLE_LIMIT: Duration = Duration::from_secs(30 * 60);

struct Slot {
    session: Session,
    last_used: Instant,
}

type SlotRef = Arc<Mutex<Slot>>;

/// Shared by all requests: one read-only dataset and the live sessions.
#[derive(Clone)]
pub struct AppState {
    dataset: Arc<Dataset>,
    frame: ReferenceFrame,
    sessions: Arc<Mutex<HashMap<Uuid, SlotRef>>>,
}

impl AppState {
    pub fn new(dataset: Arc<Dataset>, frame: ReferenceFrame) -> AppState {
        AppState {
            dataset,
            frame,
            sessions: Arc::default(),
        }
    }

    pub async fn session_count(&self) -> usize {
        self.sessions.lock().await.len()
    }

    /// Drops sessions idle for longer than `limit`; returns how many went.
    pub async fn evict_idle(&self, limit: Duration) -> usize {
        let mut map = self.sessions.lock().await;
        let before = map.len();
        let mut keep = HashMap::with_capacity(before);
        for (id, slot) in map.drain() {
            // A slot locked by a request in flight is in use.
            let idle = slot.try_lock().map(|s| s.last_used.elapsed() > limit).unwrap_or(false);
            if !idle {
                keep.insert(id, slot);
            }
        }
        *map = keep;
        before - map.len()
    }

    async fn slot(&self, id: &str) -> Result<SlotRef, Response> {
        let id = Uuid::parse_str(id).map_err(|_| not_found())?;
        self.sessions.lock().await.get(&id).cloned().ok_or_else(not_found)
    }
}

/// Body of `POST /api/sessions/{id}/command`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CommandEnvelope {
    pub utterance: String,
    #[serde(default)]
    pub pressed: Option<PressedTarget>,
}

#[derive(Deserialize)]
struct DataQuery {
    start: Option<LocalDate>,
    end: Option<LocalDate>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

fn not_found() -> Response {
    error(StatusCode::NOT_FOUND, "no such session")
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, String> {
    serde_json::from_slice(body).map_err(|e| format!("malformed body: {e}"))
}

fn reply(feedback: &Feedback, session: &Session) -> Response {
    Json(json!({ "feedback": feedback, "state": StateView::of(session) })).into_response()
}

async fn create_session(State(app): State<AppState>) -> Response {
    let id = Uuid::new_v4();
    let session = Session::new(app.dataset.clone(), app.frame.clone());
    let state = StateView::of(&session);
    let slot = Slot {
        session,
        last_used: Instant::now(),
    };
    app.sessions.lock().await.insert(id, Arc::new(Mutex::new(slot)));
    (
        StatusCode::CREATED,
        Json(json!({ "id": id.to_string(), "state": state })),
    )
        .into_response()
}

async fn get_state(State(app): State<AppState>, Path(id): Path<String>) -> Response {
    let slot = match app.slot(&id).await {
        Ok(s) => s,
        Err(r) => return r,
    };
    let mut slot = slot.lock().await;
    slot.last_used = Instant::now();
    Json(StateView::of(&slot.session)).into_response()
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> Response {
    let Ok(id) = Uuid::parse_str(&id) else {
        return not_found();
    };
    match app.sessions.lock().await.remove(&id) {
        Some(_) => StatusCode::NO_CONTENT.into_response(),
        None => not_found(),
    }
}

async fn command(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> Response {
    let slot = match app.slot(&id).await {
        Ok(s) => s,
        Err(r) => return r,
    };
    let env: CommandEnvelope = match parse_body(&body) {
        Ok(e) => e,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let mut slot = slot.lock().await;
    slot.last_used = Instant::now();
    let fb = slot.session.command(&env.utterance, env.pressed.unwrap_or_default());
    reply(&fb, &slot.session)
}

enum Action {
    Intent(Intent),
    Swipe(SwipeDirection),
}

/// Typed intents use their wire names; `swipe` and the `set_source` alias are
/// accepted too.
fn parse_action(mut v: Value) -> Result<Action, String> {
    let ty = v
        .get("type")
        .and_then(Value::as_str)
        .ok_or("missing \"type\"")?
        .to_string();
    match ty.as_str() {
        "swipe" => {
            let dir = v.get("direction").cloned().ok_or("missing \"direction\"")?;
            serde_json::from_value(dir)
                .map(Action::Swipe)
                .map_err(|e| e.to_string())
        }
        _ => {
            if ty == "set_source" {
                v["type"] = Value::from("set_data_source");
            }
            serde_json::from_value(v).map(Action::Intent).map_err(|e| e.to_string())
        }
    }
}

async fn intent(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> Response {
    let slot = match app.slot(&id).await {
        Ok(s) => s,
        Err(r) => return r,
    };
    let action =
        match parse_body::<Value>(&body).and_then(|v| parse_action(v).map_err(|e| format!("malformed intent: {e}"))) {
            Ok(a) => a,
            Err(e) => return error(StatusCode::BAD_REQUEST, e),
        };
    let mut slot = slot.lock().await;
    slot.last_used = Instant::now();
    let fb = match action {
        Action::Intent(i) => slot.session.dispatch(i),
        Action::Swipe(d) => slot.session.swipe(d),
    };
    reply(&fb, &slot.session)
}

async fn data(State(app): State<AppState>, Path(source): Path<String>, Query(q): Query<DataQuery>) -> Response {
    let source: DataSourceType = match source.parse() {
        Ok(s) => s,
        Err(e) => return error(StatusCode::NOT_FOUND, e),
    };
    let coverage = app.dataset.coverage(source);
    let (Some(start), Some(end)) = (q.start.or(coverage.map(|c| c.start)), q.end.or(coverage.map(|c| c.end))) else {
        return Json(json!({ "source": source, "records": [] })).into_response();
    };
    let Some(range) = DateRange::new(start, end) else {
        return error(StatusCode::BAD_REQUEST, format!("start {start} is after end {end}"));
    };
    let records = app.dataset.get_range(source, range);
    Json(json!({ "source": source, "range": range, "records": records })).into_response()
}

async fn meta(State(app): State<AppState>) -> Response {
    let sources: Vec<Value> = DataSourceType::ALL
        .iter()
        .map(|&s| {
            json!({
                "source": s,
                "label": s.label(),
                "records": app.dataset.len(s),
                "coverage": app.dataset.coverage(s),
            })
        })
        .collect();
    Json(json!({
        "reference_date": app.frame.reference_date,
        "profile": app.dataset.profile(),
        "sources": sources,
    }))
    .into_response()
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", axum::routing::delete(delete_session))
        .route("/api/sessions/{id}/state", get(get_state))
        .route("/api/sessions/{id}/command", post(command))
        .route("/api/sessions/{id}/intent", post(intent))
        .route("/api/data/{source}", get(data))
        .route("/api/meta", get(meta))
        .layer(CorsLayer::permissive())
        .with_state(app)
}

/// Serves until ctrl-c, evicting idle sessions once a minute.
pub async fn serve(listener: TcpListener, app: AppState) -> std::io::Result<()> {
    let sweeper = app.clone();
    let sweep = tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_idle(SESSION_IDLE_LIMIT).await;
        }
    });
    let result = axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    sweep.abort();
    result
}
