//! HTTP + WebSocket play server.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ldx_core::{corpus, CompileError};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::session::{ActionRequest, MoveView, Seat, SessionError, SessionStore, SharedSession, Snapshot, SCHEMA_VERSION};

pub struct AppState {
    pub store: SessionStore,
    /// Extra `.ldx` files offered by `GET /games` and loadable by name.
    pub games_dir: Option<PathBuf>,
}

pub type Shared = Arc<AppState>;

impl AppState {
    pub fn new(ttl: Duration, games_dir: Option<PathBuf>) -> Shared {
        Arc::new(AppState { store: SessionStore::new(ttl), games_dir })
    }

    fn dir_games(&self) -> Vec<(String, PathBuf)> {
        let Some(dir) = &self.games_dir else { return Vec::new() };
        let Ok(entries) = std::fs::read_dir(dir) else { return Vec::new() };
        let mut out: Vec<(String, PathBuf)> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "ldx"))
            .filter_map(|p| Some((p.file_stem()?.to_str()?.to_string(), p)))
            .collect();
        out.sort();
        out
    }

    fn game_text(&self, name: &str) -> Option<String> {
        if let Some((_, path)) = self.dir_games().into_iter().find(|(n, _)| n == name) {
            return std::fs::read_to_string(path).ok();
        }
        corpus::source(name).map(str::to_string)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> ApiError {
        ApiError { status, body: json!({ "v": SCHEMA_VERSION, "error": { "kind": kind, "message": message.into() } }) }
    }

    fn not_found(id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id}"))
    }

    fn compile(e: &CompileError) -> ApiError {
        let mut err = json!({ "kind": e.kind(), "message": e.to_string() });
        match e {
            CompileError::Parse(p) => {
                let (line, column) = p.position();
                err["line"] = json!(line);
                err["column"] = json!(column);
            }
            CompileError::Validation(r) => err["issues"] = json!(r.issues),
            _ => {}
        }
        ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, body: json!({ "v": SCHEMA_VERSION, "error": err }) }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn lookup(app: &AppState, id: &str) -> Result<SharedSession, ApiError> {
    app.store.get(id).ok_or_else(|| ApiError::not_found(id))
}

fn session_error(e: SessionError, s: &crate::session::Session) -> ApiError {
    let view = serde_json::to_value(s.view()).expect("views serialize");
    let (kind, message, legal) = match e {
        SessionError::Illegal { legal, reason } => ("IllegalAction", reason, legal),
        SessionError::Finished => ("GameOver", "the game is over".to_string(), Vec::new()),
        SessionError::HumanSeat(p) => ("HumanSeat", format!("{p:?} is played by a human"), s.game.legal_actions(&s.state)),
        SessionError::NothingToUndo => ("NothingToUndo", "no moves to undo".to_string(), Vec::new()),
    };
    let mask: Vec<bool> = {
        let mut m = vec![false; s.game.codec.size];
        for &a in &legal {
            m[a as usize] = true;
        }
        m
    };
    let legal_moves: Vec<MoveView> = legal.iter().map(|&a| MoveView::decode(&s.game, a)).collect();
    ApiError {
        status: StatusCode::CONFLICT,
        body: json!({
            "v": SCHEMA_VERSION,
            "error": { "kind": kind, "message": message },
            "legal_actions": legal,
            "legal_moves": legal_moves,
            "legal_mask": mask,
            "state": view,
        }),
    }
}

fn state_json(s: &crate::session::Session) -> Value {
    json!({ "v": SCHEMA_VERSION, "session_id": s.id, "state": s.view() })
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    pub game_text: Option<String>,
    pub game_name: Option<String>,
    pub seats: Option<[Seat; 2]>,
    pub seed: Option<u64>,
}

async fn create(State(app): State<Shared>, body: Result<Json<CreateRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body?;
    let text = match (req.game_text, req.game_name) {
        (Some(t), _) => t,
        (None, Some(name)) => app
            .game_text(&name)
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownGame", format!("no game named \"{name}\"")))?,
        (None, None) => return Err(ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", "game_text or game_name is required")),
    };
    let seats = req.seats.unwrap_or([Seat::Human, Seat::Human]);
    let seed = req.seed.unwrap_or_else(rand::random);
    let shared = app.store.create(text, seats, seed).map_err(|e| ApiError::compile(&e))?;
    let s = shared.lock().unwrap();
    Ok((StatusCode::CREATED, Json(state_json(&s))).into_response())
}

async fn get_state(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let shared = lookup(&app, &id)?;
    let s = shared.lock().unwrap();
    Ok(Json(state_json(&s)))
}

async fn post_action(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<ActionRequest>, JsonRejection>,
) -> ApiResult {
    let shared = lookup(&app, &id)?;
    let Json(req) = body?;
    let mut s = shared.lock().unwrap();
    let action = req.resolve(&s.game);
    match s.apply(action) {
        Ok(()) => {
            s.publish();
            Ok(Json(state_json(&s)))
        }
        Err(e) => Err(session_error(e, &s)),
    }
}

async fn agent_move(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let shared = lookup(&app, &id)?;
    let mut s = shared.lock().unwrap();
    match s.agent_move() {
        Ok(a) => {
            s.publish();
            let mut out = state_json(&s);
            out["action"] = json!(MoveView::decode(&s.game, a));
            Ok(Json(out))
        }
        Err(e) => Err(session_error(e, &s)),
    }
}

async fn undo(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let shared = lookup(&app, &id)?;
    let mut s = shared.lock().unwrap();
    match s.undo() {
        Ok(()) => {
            s.publish();
            Ok(Json(state_json(&s)))
        }
        Err(e) => Err(session_error(e, &s)),
    }
}

async fn list_games(State(app): State<Shared>) -> Json<Value> {
    let mut games: Vec<Value> =
        corpus::GAMES.iter().map(|(name, _)| json!({ "name": name, "source": "bundled" })).collect();
    for (name, path) in app.dir_games() {
        games.push(json!({ "name": name, "source": path.display().to_string() }));
    }
    Json(json!({ "v": SCHEMA_VERSION, "games": games }))
}

async fn stream(State(app): State<Shared>, Path(id): Path<String>, ws: WebSocketUpgrade) -> Result<Response, ApiError> {
    let shared = lookup(&app, &id)?;
    Ok(ws.on_upgrade(move |socket| forward(socket, shared)))
}

/// Sends the current state, then every update until either side hangs up.
async fn forward(mut socket: WebSocket, shared: SharedSession) {
    let (first, mut rx) = {
        let s = shared.lock().unwrap();
        (serde_json::to_string(&s.view()).expect("views serialize"), s.updates.subscribe())
    };
    if socket.send(Message::Text(first.into())).await.is_err() {
        return;
    }
    loop {
        tokio::select! {
            update = rx.recv() => match update {
                Ok(text) => {
                    if socket.send(Message::Text(text.into())).await.is_err() {
                        return;
                    }
                }
                Err(tokio::sync::broadcast::error::RecvError::Lagged(_)) => continue,
                Err(_) => return,
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}

pub fn router(app: Shared) -> Router {
    Router::new()
        .route("/games", get(list_games))
        .route("/sessions", post(create))
        .route("/sessions/{id}/state", get(get_state))
        .route("/sessions/{id}/actions", post(post_action))
        .route("/sessions/{id}/agent-move", post(agent_move))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/stream", get(stream))
        .with_state(app)
}

pub fn load_snapshot(app: &AppState, path: &std::path::Path) -> anyhow::Result<Vec<String>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let snap: Snapshot = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok(app.store.restore(&snap))
}

pub fn save_snapshot(app: &AppState, path: &std::path::Path) -> anyhow::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&app.store.snapshot())?)?;
    Ok(())
}

pub struct ServeOptions {
    pub port: u16,
    pub games_dir: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    pub ttl: Duration,
}

pub async fn serve(opts: ServeOptions) -> anyhow::Result<()> {
    let app = AppState::new(opts.ttl, opts.games_dir);
    if let Some(path) = &opts.snapshot {
        for problem in load_snapshot(&app, path)? {
            eprintln!("skipped session {problem}");
        }
        eprintln!("restored {} session(s)", app.store.len());
    }
    let sweeper = {
        let app = app.clone();
        let every = (opts.ttl / 4).clamp(Duration::from_secs(1), Duration::from_secs(60));
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(every);
            loop {
                tick.tick().await;
                app.store.evict_idle(Instant::now());
            }
        })
    };
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", opts.port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    sweeper.abort();
    if let Some(path) = &opts.snapshot {
        save_snapshot(&app, path)?;
        eprintln!("saved {} session(s) to {}", app.store.len(), path.display());
    }
    Ok(())
}
