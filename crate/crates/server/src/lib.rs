//! HTTP service around the optimizer: upload instances, start runs, steer
//! them while they execute and follow their progress as a server-sent event
//! stream.

mod error;
pub mod run;

use std::collections::HashMap;
use std::convert::Infallible;
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::IntoResponse;
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use futures::stream::{self, Stream};
use moga_vrptw::ga::ConfigPatch;
use moga_vrptw::io::{parse_solomon_bytes, FrontDocument, FrontEntry};
use moga_vrptw::{Customer, Engine, GaConfig, Instance};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

pub use error::ApiError;
use run::Run;
pub use run::{Event, RunHandle, RunStatus};

#[derive(Default)]
pub struct AppState {
    instances: RwLock<HashMap<Uuid, Arc<Instance>>>,
    runs: RwLock<HashMap<Uuid, Arc<Run>>>,
}

type Shared = Arc<AppState>;

pub fn app() -> Router {
    router(Arc::default())
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/instances", post(create_instance))
        .route("/instances/{id}", get(get_instance))
        .route("/runs", post(create_run))
        .route("/runs/{id}", get(get_run))
        .route("/runs/{id}/pause", post(pause_run))
        .route("/runs/{id}/resume", post(resume_run))
        .route("/runs/{id}/cancel", post(cancel_run))
        .route("/runs/{id}/config", patch(patch_config))
        .route("/runs/{id}/front", get(get_front))
        .route("/runs/{id}/alternatives/{k}/trace", get(get_trace))
        .route("/runs/{id}/events", get(events))
        .with_state(state)
}

fn parse_id(what: &str, raw: &str) -> Result<Uuid, ApiError> {
    raw.parse().map_err(|_| ApiError::not_found(what, raw))
}

fn find_run(state: &AppState, raw: &str) -> Result<Arc<Run>, ApiError> {
    let id = parse_id("run", raw)?;
    state.runs.read().unwrap().get(&id).cloned().ok_or_else(|| ApiError::not_found("run", raw))
}

fn find_instance(state: &AppState, id: Uuid) -> Option<Arc<Instance>> {
    state.instances.read().unwrap().get(&id).cloned()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub id: Uuid,
    pub name: String,
    pub customers: usize,
    pub vehicle_capacity: f64,
    pub max_vehicles: u32,
    pub total_demand: f64,
    pub depot: Customer,
    pub sites: Vec<Customer>,
}

impl InstanceSummary {
    fn new(id: Uuid, inst: &Instance) -> Self {
        InstanceSummary {
            id,
            name: inst.name().to_owned(),
            customers: inst.len(),
            vehicle_capacity: inst.vehicle_capacity(),
            max_vehicles: inst.max_vehicles(),
            total_demand: inst.customers().iter().map(|c| c.demand).sum(),
            depot: inst.depot().clone(),
            sites: inst.customers().to_vec(),
        }
    }
}

async fn create_instance(State(state): State<Shared>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let inst =
        parse_solomon_bytes(&body).map_err(|e| ApiError { line: e.line, ..ApiError::invalid("", e.to_string()) })?;
    let id = Uuid::new_v4();
    let summary = InstanceSummary::new(id, &inst);
    state.instances.write().unwrap().insert(id, Arc::new(inst));
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn get_instance(State(state): State<Shared>, Path(raw): Path<String>) -> Result<Json<InstanceSummary>, ApiError> {
    let id = parse_id("instance", &raw)?;
    let inst = find_instance(&state, id).ok_or_else(|| ApiError::not_found("instance", &raw))?;
    Ok(Json(InstanceSummary::new(id, &inst)))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateRun {
    pub instance_id: Uuid,
    #[serde(default)]
    pub config: GaConfig,
    /// Hold the run at generation 0 until resumed.
    #[serde(default)]
    pub start_paused: bool,
    /// Pause automatically once this generation has been produced.
    #[serde(default)]
    pub pause_at: Option<usize>,
}

async fn create_run(State(state): State<Shared>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let req: CreateRun = error::parse_json(&body)?;
    req.config.validate().map_err(|e| ApiError::invalid(format!("config.{}", e.field), e.to_string()))?;
    let inst = find_instance(&state, req.instance_id)
        .ok_or_else(|| ApiError::not_found("instance", &req.instance_id.to_string()))?;
    let engine = tokio::task::spawn_blocking(move || Engine::new(inst, req.config))
        .await
        .expect("engine construction does not panic")
        .map_err(|e| ApiError::invalid(format!("config.{}", e.field), e.to_string()))?;
    let run = Run::start(req.instance_id, engine, req.start_paused, req.pause_at);
    state.runs.write().unwrap().insert(run.id, run.clone());
    Ok((StatusCode::CREATED, Json(run.handle())))
}

async fn get_run(State(state): State<Shared>, Path(raw): Path<String>) -> Result<Json<RunHandle>, ApiError> {
    Ok(Json(find_run(&state, &raw)?.handle()))
}

fn transition(state: &AppState, raw: &str, to: RunStatus) -> Result<Json<RunHandle>, ApiError> {
    find_run(state, raw)?
        .transition(to)
        .map(Json)
        .map_err(|e| ApiError::conflict(format!("cannot move a {:?} run to {:?}", e.from, e.to).to_lowercase()))
}

async fn pause_run(State(state): State<Shared>, Path(raw): Path<String>) -> Result<Json<RunHandle>, ApiError> {
    transition(&state, &raw, RunStatus::Paused)
}

async fn resume_run(State(state): State<Shared>, Path(raw): Path<String>) -> Result<Json<RunHandle>, ApiError> {
    transition(&state, &raw, RunStatus::Running)
}

async fn cancel_run(State(state): State<Shared>, Path(raw): Path<String>) -> Result<Json<RunHandle>, ApiError> {
    transition(&state, &raw, RunStatus::Cancelled)
}

const STEERABLE: [&str; 3] = ["mutation_rate", "crossover_rate", "fitness_params"];

async fn patch_config(
    State(state): State<Shared>,
    Path(raw): Path<String>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let run = find_run(&state, &raw)?;
    let value: serde_json::Value = error::parse_json(&body)?;
    let Some(fields) = value.as_object() else {
        return Err(ApiError::invalid("", "expected a JSON object"));
    };
    if let Some(key) = fields.keys().find(|k| !STEERABLE.contains(&k.as_str())) {
        return Err(ApiError::invalid(key.clone(), format!("`{key}` cannot be changed while a run exists")));
    }
    let patch: ConfigPatch = error::parse_json(&body)?;
    patch.validate().map_err(|e| ApiError::invalid(e.field, e.to_string()))?;
    let handle = run.queue_patch(&patch).map_err(|s| ApiError::conflict(format!("run is {s:?}").to_lowercase()))?;
    Ok((StatusCode::ACCEPTED, Json(handle)))
}

fn now() -> Option<u64> {
    SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
}

fn front_of(run: &Run) -> Result<FrontDocument, ApiError> {
    let (archive, config, generation) = run.archive();
    FrontDocument::from_archive(&run.instance, &config, &archive, generation, now())
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
}

async fn get_front(State(state): State<Shared>, Path(raw): Path<String>) -> Result<Json<FrontDocument>, ApiError> {
    let run = find_run(&state, &raw)?;
    Ok(Json(front_of(&run)?))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AlternativeTrace {
    pub k: usize,
    pub generation: usize,
    #[serde(flatten)]
    pub entry: FrontEntry,
}

async fn get_trace(
    State(state): State<Shared>,
    Path((raw, k)): Path<(String, String)>,
) -> Result<Json<AlternativeTrace>, ApiError> {
    let run = find_run(&state, &raw)?;
    let doc = front_of(&run)?;
    let missing = || ApiError::not_found("alternative", &k);
    let index: usize = k.parse().map_err(|_| missing())?;
    let entry = doc.entries.into_iter().nth(index).ok_or_else(missing)?;
    Ok(Json(AlternativeTrace { k: index, generation: doc.generation, entry }))
}

#[derive(Debug, Deserialize)]
struct EventsQuery {
    from: Option<usize>,
}

fn frame(event: &Event) -> SseEvent {
    let seq = match event {
        Event::Snapshot { seq, .. } | Event::Status { seq, .. } | Event::Config { seq, .. } => *seq,
    };
    SseEvent::default().id(seq.to_string()).json_data(event).expect("events always serialise")
}

async fn events(
    State(state): State<Shared>,
    Path(raw): Path<String>,
    Query(query): Query<EventsQuery>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<SseEvent, Infallible>>>, ApiError> {
    let run = find_run(&state, &raw)?;
    let last_seen =
        headers.get("last-event-id").and_then(|v| v.to_str().ok()).and_then(|v| v.trim().parse::<usize>().ok());
    let start = query.from.or(last_seen.map(|n| n + 1)).unwrap_or(0);
    let rx = run.subscribe();
    let frames = stream::unfold((run, rx, start), |(run, mut rx, next)| async move {
        loop {
            rx.borrow_and_update();
            let (event, closed) = run.event_at(next);
            if let Some(event) = event {
                return Some((Ok(frame(&event)), (run, rx, next + 1)));
            }
            if closed || rx.changed().await.is_err() {
                return None;
            }
        }
    });
    Ok(Sse::new(frames).keep_alive(KeepAlive::default()))
}
