//! HTTP and WebSocket session service.
//!
//! Each session owns a surface, a bounded undo stack of snapshots and the
//! latest embedding. Mutations are applied one at a time; a mutation sent
//! while a relaxation runs, or against a stale `revision`, is refused with
//! 409 ConflictingMutation.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use polytile_core::embedding::{init_embedding, relax_observed, EmbeddedMesh, Frame, RelaxOptions, RelaxReport};
use polytile_core::report::AnalysisDoc;
use polytile_core::{parse_spec, write_spec, Length, SlotRef, Surface};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::broadcast;

use crate::presets::preset;
use crate::CommandError;

pub const UNDO_DEPTH: usize = 64;
pub const DEFAULT_TTL: Duration = Duration::from_secs(3600);
/// Minimum spacing of relaxation frames on the live stream (30 per second).
pub const FRAME_INTERVAL: Duration = Duration::from_millis(34);

pub struct Session {
    pub surface: Surface,
    undo: VecDeque<Surface>,
    pub revision: u64,
    report: Option<AnalysisDoc>,
    embedding: Option<(EmbeddedMesh, Option<RelaxReport>)>,
    last_access: Instant,
}

impl Session {
    fn new(surface: Surface) -> Self {
        Session { surface, undo: VecDeque::new(), revision: 0, report: None, embedding: None, last_access: Instant::now() }
    }

    /// Cached analysis of the current surface.
    pub fn report(&mut self) -> &AnalysisDoc {
        self.report.get_or_insert_with(|| AnalysisDoc::new(&self.surface))
    }

    /// Apply `f` to a copy of the surface; commit and push a snapshot only on success.
    fn mutate<T>(&mut self, f: impl FnOnce(&mut Surface) -> Result<T, CommandError>) -> Result<T, CommandError> {
        let mut next = self.surface.clone();
        let out = f(&mut next)?;
        let prev = std::mem::replace(&mut self.surface, next);
        if self.undo.len() == UNDO_DEPTH {
            self.undo.pop_front();
        }
        self.undo.push_back(prev);
        self.changed();
        Ok(out)
    }

    fn undo(&mut self) -> Result<(), CommandError> {
        let prev = self.undo.pop_back().ok_or_else(|| CommandError::new("NothingToUndo", "undo stack is empty"))?;
        self.surface = prev;
        self.changed();
        Ok(())
    }

    fn changed(&mut self) {
        self.revision += 1;
        self.report = None;
        self.embedding = None;
    }

    pub fn undo_depth(&self) -> usize {
        self.undo.len()
    }
}

struct Handle {
    session: Mutex<Session>,
    relaxing: AtomicBool,
    events: broadcast::Sender<Arc<str>>,
}

pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Handle>>>,
    ttl: Duration,
}

impl AppState {
    pub fn new(ttl: Duration) -> Arc<Self> {
        Arc::new(AppState { sessions: RwLock::new(HashMap::new()), ttl })
    }

    fn get(&self, id: &str) -> Result<Arc<Handle>, ApiError> {
        let handle = self.sessions.read().unwrap().get(id).cloned();
        let handle = handle.ok_or_else(|| unknown(id))?;
        let mut s = handle.session.lock().unwrap();
        if s.last_access.elapsed() > self.ttl {
            drop(s);
            self.sessions.write().unwrap().remove(id);
            return Err(unknown(id));
        }
        s.last_access = Instant::now();
        drop(s);
        Ok(handle)
    }

    /// Drop sessions idle for longer than the TTL. Returns how many went.
    pub fn evict_expired(&self) -> usize {
        let mut map = self.sessions.write().unwrap();
        let before = map.len();
        map.retain(|_, h| h.session.lock().unwrap().last_access.elapsed() <= self.ttl);
        before - map.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().unwrap().len()
    }
}

fn unknown(id: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, CommandError::new("UnknownSession", format!("no session `{id}`")))
}

fn conflict(message: &str) -> ApiError {
    ApiError(StatusCode::CONFLICT, CommandError::new("ConflictingMutation", message))
}

#[derive(Debug)]
pub struct ApiError(pub StatusCode, pub CommandError);

impl From<CommandError> for ApiError {
    fn from(e: CommandError) -> Self {
        ApiError(StatusCode::UNPROCESSABLE_ENTITY, e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn bad_request(e: impl std::fmt::Display) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, CommandError::new("BadRequest", e.to_string()))
}

fn parse_body<T: for<'de> Deserialize<'de> + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(bad_request)
}

/// Live-stream and mutation-response document.
#[derive(Serialize)]
struct Event<'a> {
    event: &'a str,
    revision: u64,
    report: Option<&'a AnalysisDoc>,
    frame: Option<&'a Frame>,
}

fn publish(handle: &Handle, event: &Event) {
    let text: Arc<str> = serde_json::to_string(event).expect("events serialize").into();
    // No subscribers is fine.
    let _ = handle.events.send(text);
}

/// The starting frame of a fresh embedding, or none while it cannot be built.
fn current_frame(s: &mut Session) -> Option<Frame> {
    if s.embedding.is_none() {
        let m = init_embedding(&s.surface, 0).ok()?;
        s.embedding = Some((m, None));
    }
    let (m, report) = s.embedding.as_ref()?;
    Some(Frame {
        iteration: report.map_or(0, |r| r.iterations),
        energy: report.map_or_else(|| m.energy(), |r| r.energy),
        positions: m.positions.clone(),
    })
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/faces", post(add_face))
        .route("/sessions/{id}/glue", post(glue))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/report", get(report))
        .route("/sessions/{id}/spec", get(spec))
        .route("/sessions/{id}/relax", post(relax))
        .route("/sessions/{id}/embedding", get(embedding))
        .route("/sessions/{id}/live", get(live))
        .with_state(state)
}

/// Serve until the process is stopped, evicting idle sessions in the background.
pub async fn serve(host: &str, port: u16, ttl: Duration) -> std::io::Result<()> {
    let state = AppState::new(ttl);
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval((ttl / 4).clamp(Duration::from_secs(1), Duration::from_secs(60)));
        loop {
            tick.tick().await;
            let gone = sweeper.evict_expired();
            if gone > 0 {
                tracing::info!(gone, "evicted idle sessions");
            }
        }
    });
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state)).await
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    preset: Option<String>,
    spec: Option<String>,
}

async fn create(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let body: CreateBody = parse_body(&body)?;
    let surface = match (body.preset, body.spec) {
        (Some(_), Some(_)) => return Err(bad_request("give either preset or spec, not both")),
        (Some(name), None) => preset(&name)?,
        (None, Some(text)) => parse_spec(&text).map_err(CommandError::from)?,
        (None, None) => Surface::new(),
    };
    let id = uuid::Uuid::new_v4().simple().to_string();
    let mut session = Session::new(surface);
    let doc = json!({ "id": id, "revision": 0, "report": session.report() });
    let (events, _) = broadcast::channel(64);
    let handle = Arc::new(Handle { session: Mutex::new(session), relaxing: AtomicBool::new(false), events });
    state.sessions.write().unwrap().insert(id, handle);
    Ok((StatusCode::CREATED, Json(doc)).into_response())
}

fn check_writer(handle: &Handle, s: &Session, revision: Option<u64>) -> Result<(), ApiError> {
    if handle.relaxing.load(Ordering::SeqCst) {
        return Err(conflict("a relaxation is running"));
    }
    if let Some(r) = revision {
        if r != s.revision {
            return Err(conflict(&format!("revision {r} is stale, session is at {}", s.revision)));
        }
    }
    Ok(())
}

/// Run a mutation and publish its event; responds with the new report.
fn apply(
    handle: &Handle,
    event: &str,
    revision: Option<u64>,
    f: impl FnOnce(&mut Session) -> Result<Value, CommandError>,
) -> Result<Json<Value>, ApiError> {
    let mut s = handle.session.lock().unwrap();
    check_writer(handle, &s, revision)?;
    let mut extra = f(&mut s)?;
    let frame = current_frame(&mut s);
    let rev = s.revision;
    let report = s.report().clone();
    publish(handle, &Event { event, revision: rev, report: Some(&report), frame: frame.as_ref() });
    extra["revision"] = json!(rev);
    extra["report"] = serde_json::to_value(&report).expect("report serializes");
    Ok(Json(extra))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LengthField {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceBody {
    sides: usize,
    edge_length: Option<LengthField>,
    revision: Option<u64>,
}

fn parse_length(l: Option<LengthField>) -> Result<Length, ApiError> {
    match l {
        None => Ok(Length::from_integer(1)),
        Some(LengthField::Int(n)) => Ok(Length::from_integer(n)),
        Some(LengthField::Text(t)) => t.trim().parse::<Length>().map_err(|_| bad_request(format!("bad edge_length `{t}`"))),
    }
}

async fn add_face(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let handle = state.get(&id)?;
    let body: FaceBody = serde_json::from_slice(&body).map_err(bad_request)?;
    let length = parse_length(body.edge_length)?;
    apply(&handle, "face_added", body.revision, |s| {
        let face = s.mutate(|surf| Ok(surf.add_face(body.sides, length)?))?;
        Ok(json!({ "face": face }))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GlueBody {
    a: SlotRef,
    b: SlotRef,
    #[serde(default)]
    flip: bool,
    revision: Option<u64>,
}

async fn glue(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let handle = state.get(&id)?;
    let body: GlueBody = serde_json::from_slice(&body).map_err(bad_request)?;
    apply(&handle, "glued", body.revision, |s| {
        s.mutate(|surf| Ok(surf.glue(body.a, body.b, body.flip)?))?;
        Ok(json!({}))
    })
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct UndoBody {
    revision: Option<u64>,
}

async fn undo(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let handle = state.get(&id)?;
    let body: UndoBody = parse_body(&body)?;
    apply(&handle, "undo", body.revision, |s| {
        s.undo()?;
        Ok(json!({ "undo_depth": s.undo_depth() }))
    })
}

/// Byte-identical to `polytile analyze --format json` for the same surface.
async fn report(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let handle = state.get(&id)?;
    let text = handle.session.lock().unwrap().report().to_json();
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}

async fn spec(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let handle = state.get(&id)?;
    let text = write_spec(&handle.session.lock().unwrap().surface);
    Ok(([(header::CONTENT_TYPE, "application/toml")], text).into_response())
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RelaxBody {
    iters: usize,
    tol: f64,
    seed: u64,
}

impl Default for RelaxBody {
    fn default() -> Self {
        let d = RelaxOptions::default();
        RelaxBody { iters: d.max_iters, tol: d.tol, seed: 0 }
    }
}

/// Clears the relaxing flag however the relaxation ends.
struct RelaxGuard(Arc<Handle>);

impl Drop for RelaxGuard {
    fn drop(&mut self) {
        self.0.relaxing.store(false, Ordering::SeqCst);
    }
}

async fn relax(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let handle = state.get(&id)?;
    let body: RelaxBody = parse_body(&body)?;
    let (surface, revision) = {
        let s = handle.session.lock().unwrap();
        if handle.relaxing.swap(true, Ordering::SeqCst) {
            return Err(conflict("a relaxation is already running"));
        }
        (s.surface.clone(), s.revision)
    };
    let guard = RelaxGuard(handle.clone());
    let worker = handle.clone();
    let result = tokio::task::spawn_blocking(move || {
        let mut m = init_embedding(&surface, body.seed)?;
        let mut last: Option<Instant> = None;
        let report = relax_observed(&mut m, RelaxOptions { max_iters: body.iters, tol: body.tol }, |i, e, x| {
            if last.is_some_and(|t| t.elapsed() < FRAME_INTERVAL) {
                return;
            }
            last = Some(Instant::now());
            let frame = Frame { iteration: i, energy: e, positions: x.to_vec() };
            publish(&worker, &Event { event: "relax_frame", revision, report: None, frame: Some(&frame) });
        })?;
        Ok::<_, CommandError>((m, report))
    })
    .await
    .map_err(|e| CommandError::new("Internal", e.to_string()))?;
    let (m, report) = result?;
    let mut s = handle.session.lock().unwrap();
    let frame = Frame { iteration: report.iterations, energy: report.energy, positions: m.positions.clone() };
    s.embedding = Some((m, Some(report)));
    let doc = s.report().clone();
    publish(&handle, &Event { event: "relaxed", revision, report: Some(&doc), frame: Some(&frame) });
    drop(s);
    drop(guard);
    Ok(Json(json!({ "revision": revision, "relax": report })))
}

async fn embedding(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let handle = state.get(&id)?;
    let mut s = handle.session.lock().unwrap();
    if s.embedding.is_none() {
        let m = init_embedding(&s.surface, 0).map_err(CommandError::from)?;
        s.embedding = Some((m, None));
    }
    let (m, report) = s.embedding.as_ref().unwrap();
    let faces: Vec<Value> = m.faces.iter().map(|(ring, center)| json!({ "ring": ring, "center": center })).collect();
    Ok(Json(json!({
        "revision": s.revision,
        "nodes": m.nodes,
        "positions": m.positions,
        "faces": faces,
        "springs": m.springs,
        "relax": report,
    })))
}

async fn live(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let handle = state.get(&id)?;
    Ok(ws.on_upgrade(move |socket| stream(socket, handle)))
}

async fn stream(mut socket: WebSocket, handle: Arc<Handle>) {
    // Subscribe before the snapshot so nothing between the two is lost.
    let mut rx = handle.events.subscribe();
    let hello = {
        let mut s = handle.session.lock().unwrap();
        let frame = current_frame(&mut s);
        let rev = s.revision;
        let report = s.report().clone();
        serde_json::to_string(&Event { event: "snapshot", revision: rev, report: Some(&report), frame: frame.as_ref() })
            .expect("events serialize")
    };
    if socket.send(Message::Text(hello.into())).await.is_err() {
        return;
    }
    loop {
        tokio::select! {
            ev = rx.recv() => match ev {
                Ok(text) => {
                    if socket.send(Message::Text(text.as_ref().into())).await.is_err() {
                        return;
                    }
                }
                // A slow reader skips frames rather than stalling writers.
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return,
            },
            msg = socket.recv() => match msg {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}
