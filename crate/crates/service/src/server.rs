//! HTTP and WebSocket front end over [`Session`].

use std::collections::{BTreeMap, HashMap};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use coordplan_core::maze_io::read_maze;
use coordplan_core::{AgentParams, MazePair, DEFAULT_STEP_CAP};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

use crate::protocol::{
    ClientMessage, CreateRequest, Envelope, ErrorCode, MazeRef, Phase, ServerMessage, SessionSnapshot, FORMAT_VERSION,
};
use crate::session::{Pushes, Session, SessionError, SessionSetup};

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub fixtures: BTreeMap<String, MazePair>,
    /// One append-only JSONL file of server pushes per session.
    pub log_dir: Option<PathBuf>,
    /// Defaults for every session; a create request may override the scheme.
    pub params: AgentParams,
    pub cap: u32,
    /// Pause between streamed agent moves.
    pub move_delay: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            fixtures: BTreeMap::new(),
            log_dir: None,
            params: AgentParams::default(),
            cap: DEFAULT_STEP_CAP,
            move_delay: Duration::ZERO,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("reading fixture directory {path}: {source}")]
    Dir {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("fixture {path}: {source}")]
    Maze {
        path: PathBuf,
        source: coordplan_core::Error,
    },
}

/// Loads every `*.json` maze in `dir`, keyed by file stem.
pub fn load_fixtures(dir: &Path) -> Result<BTreeMap<String, MazePair>, FixtureError> {
    let dir_err = |source| FixtureError::Dir {
        path: dir.to_path_buf(),
        source,
    };
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(dir_err)? {
        let path = entry.map_err(dir_err)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let pair = read_maze(&path).map_err(|source| FixtureError::Maze {
            path: path.clone(),
            source,
        })?;
        let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        out.insert(id, pair);
    }
    Ok(out)
}

type SharedSession = Arc<Mutex<Session>>;

pub struct AppState {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, SharedSession>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            config,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    fn lookup(&self, id: &str) -> Result<SharedSession, SessionError> {
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::new(ErrorCode::UnknownSession, format!("no session {id:?}")))
    }

    fn create(&self, req: CreateRequest) -> Result<(SharedSession, Pushes), SessionError> {
        let (maze_id, pair) = match req.maze {
            MazeRef::Fixture(name) => {
                let pair = self
                    .config
                    .fixtures
                    .get(&name)
                    .cloned()
                    .ok_or_else(|| SessionError::new(ErrorCode::InvalidMaze, format!("unknown fixture {name:?}")))?;
                (Some(name), pair)
            }
            MazeRef::Inline(file) => {
                let pair = file
                    .to_pair()
                    .map_err(|e| SessionError::new(ErrorCode::InvalidMaze, e.to_string()))?;
                (None, pair)
            }
        };
        let mut params = self.config.params;
        if let Some(scheme) = req.scheme {
            params.planner.scheme = scheme;
        }
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        let id = match req.session_id {
            Some(id) if sessions.contains_key(&id) => {
                return Err(SessionError::new(ErrorCode::DuplicateSession, format!("session {id:?} exists")))
            }
            Some(id) => id,
            None => loop {
                let id = format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed));
                if !sessions.contains_key(&id) {
                    break id;
                }
            },
        };
        let (session, pushes) = Session::create(SessionSetup {
            id: id.clone(),
            maze_id,
            pair,
            config: req.config.into(),
            human_side: req.human_side,
            agent_kind: req.agent_kind,
            params,
            seed: req.seed,
            cap: self.config.cap,
        })?;
        let shared = Arc::new(Mutex::new(session));
        sessions.insert(id, shared.clone());
        drop(sessions);
        self.log(&pushes);
        Ok((shared, pushes))
    }

    fn log(&self, pushes: &[Envelope<ServerMessage>]) {
        let Some(dir) = &self.config.log_dir else { return };
        let Some(id) = pushes.first().and_then(|p| p.session_id.as_deref()) else {
            return;
        };
        let path = dir.join(format!("{id}.jsonl"));
        let result = OpenOptions::new().create(true).append(true).open(&path).and_then(|mut f| {
            let mut buf = String::new();
            for p in pushes {
                buf.push_str(&serde_json::to_string(p).expect("push serializes"));
                buf.push('\n');
            }
            f.write_all(buf.as_bytes())
        });
        if let Err(e) = result {
            tracing::warn!(path = %path.display(), error = %e, "message log write failed");
        }
    }
}

/// `format_version` plus a flattened body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub format_version: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Versioned<T> {
    pub fn new(body: T) -> Self {
        Versioned {
            format_version: FORMAT_VERSION,
            body,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreatedBody {
    pub session_id: String,
    /// Pushes produced by creation, including a complete opening agent turn.
    pub messages: Pushes,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefBody {
    pub session_id: String,
    pub belief: coordplan_core::BeliefExport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MazeInfo {
    pub id: String,
    pub width: u32,
    pub height: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MazeList {
    pub mazes: Vec<MazeInfo>,
}

struct ApiError(SessionError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0.code {
            ErrorCode::UnknownSession => StatusCode::NOT_FOUND,
            ErrorCode::DuplicateSession => StatusCode::CONFLICT,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let body = Envelope::new(
            None,
            None,
            ServerMessage::Error {
                code: self.0.code,
                message: self.0.message,
            },
        );
        (status, Json(body)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/state", get(session_state))
        .route("/sessions/{id}/belief", get(session_belief))
        .route("/mazes", get(list_mazes))
        .route("/ws", get(ws_upgrade))
        .with_state(Arc::new(AppState::new(config)))
}

pub async fn serve(listener: TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    axum::serve(listener, router(config)).await
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<Versioned<CreatedBody>>), ApiError> {
    let (shared, mut pushes) = app.create(req)?;
    let mut session = shared.lock().expect("session poisoned");
    let opening = session.run_agent()?;
    app.log(&opening);
    pushes.extend(opening);
    let body = CreatedBody {
        session_id: session.id().to_string(),
        messages: pushes,
    };
    Ok((StatusCode::CREATED, Json(Versioned::new(body))))
}

async fn session_state(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<Versioned<SessionSnapshot>>, ApiError> {
    let shared = app.lookup(&id)?;
    let snapshot = shared.lock().expect("session poisoned").snapshot();
    Ok(Json(Versioned::new(snapshot)))
}

async fn session_belief(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<Versioned<BeliefBody>>, ApiError> {
    let shared = app.lookup(&id)?;
    let belief = shared.lock().expect("session poisoned").belief();
    Ok(Json(Versioned::new(BeliefBody { session_id: id, belief })))
}

async fn list_mazes(State(app): State<Arc<AppState>>) -> Json<Versioned<MazeList>> {
    let mazes = app
        .config
        .fixtures
        .iter()
        .map(|(id, pair)| MazeInfo {
            id: id.clone(),
            width: pair.width(),
            height: pair.height(),
        })
        .collect();
    Json(Versioned::new(MazeList { mazes }))
}

async fn ws_upgrade(State(app): State<Arc<AppState>>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| ws_loop(app, socket))
}

async fn send_all(socket: &mut WebSocket, pushes: &[Envelope<ServerMessage>]) -> bool {
    for p in pushes {
        let text = serde_json::to_string(p).expect("push serializes");
        if socket.send(Message::Text(text.into())).await.is_err() {
            return false;
        }
    }
    true
}

fn unbound_error(err: SessionError) -> Pushes {
    vec![Envelope::new(
        None,
        None,
        ServerMessage::Error {
            code: err.code,
            message: err.message,
        },
    )]
}

/// Streams the agent's turn one action at a time.
async fn stream_agent(app: &AppState, shared: &SharedSession, socket: &mut WebSocket) -> bool {
    loop {
        let pushes = {
            let mut session = shared.lock().expect("session poisoned");
            if session.phase() != Phase::AgentTurn {
                return true;
            }
            match session.advance_agent() {
                Ok(p) => p,
                Err(e) => vec![session.error_push(e)],
            }
        };
        app.log(&pushes);
        if !send_all(socket, &pushes).await {
            return false;
        }
        if pushes.iter().any(|p| matches!(p.message, ServerMessage::Error { .. })) {
            return true;
        }
        if !app.config.move_delay.is_zero() {
            tokio::time::sleep(app.config.move_delay).await;
        }
    }
}

async fn ws_loop(app: Arc<AppState>, mut socket: WebSocket) {
    let mut bound: Option<String> = None;
    while let Some(Ok(msg)) = socket.recv().await {
        let text = match msg {
            Message::Text(t) => t,
            Message::Close(_) => break,
            _ => continue,
        };
        let envelope: Envelope<ClientMessage> = match serde_json::from_str(text.as_str()) {
            Ok(e) => e,
            Err(e) => {
                let err = SessionError::new(ErrorCode::InvalidRequest, e.to_string());
                if !send_all(&mut socket, &unbound_error(err)).await {
                    break;
                }
                continue;
            }
        };
        if envelope.format_version != FORMAT_VERSION {
            let err = SessionError::new(
                ErrorCode::InvalidRequest,
                format!("format_version {} unsupported", envelope.format_version),
            );
            if !send_all(&mut socket, &unbound_error(err)).await {
                break;
            }
            continue;
        }
        if let ClientMessage::Create(req) = envelope.message {
            match app.create(req) {
                Ok((shared, pushes)) => {
                    bound = Some(shared.lock().expect("session poisoned").id().to_string());
                    if !send_all(&mut socket, &pushes).await || !stream_agent(&app, &shared, &mut socket).await {
                        break;
                    }
                }
                Err(e) => {
                    if !send_all(&mut socket, &unbound_error(e)).await {
                        break;
                    }
                }
            }
            continue;
        }
        let Some(id) = envelope.session_id.or_else(|| bound.clone()) else {
            let err = SessionError::new(ErrorCode::UnknownSession, "no session bound to this socket");
            if !send_all(&mut socket, &unbound_error(err)).await {
                break;
            }
            continue;
        };
        let shared = match app.lookup(&id) {
            Ok(s) => s,
            Err(e) => {
                if !send_all(&mut socket, &unbound_error(e)).await {
                    break;
                }
                continue;
            }
        };
        let pushes = {
            let mut session = shared.lock().expect("session poisoned");
            let result = match envelope.message {
                ClientMessage::HumanAction { action } => session.submit_action(action),
                other => Ok(session.handle(other)),
            };
            result.unwrap_or_else(|e| vec![session.error_push(e)])
        };
        app.log(&pushes);
        if !send_all(&mut socket, &pushes).await || !stream_agent(&app, &shared, &mut socket).await {
            break;
        }
    }
}
