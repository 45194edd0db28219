//! Play sessions: a compiled game, its current state, the action history
//! and who controls each seat.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use ldx_core::agents::{Agent, Mcts, MctsConfig, RandomAgent};
use ldx_core::compiler::codec::{Action, CodecKind};
use ldx_core::dsl::ast::RenderingDetail;
use ldx_core::engine::rng::stream;
use ldx_core::engine::{PlayerResult, DEFAULT_MAX_TURNS};
use ldx_core::topology::{BoardShape, Dir};
use ldx_core::{compile_str, CompileError, CompiledGame, GameState, Player};
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seat {
    Human,
    Random,
    Mcts(u32),
}

impl FromStr for Seat {
    type Err = String;

    fn from_str(s: &str) -> Result<Seat, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "human" => Ok(Seat::Human),
            "random" => Ok(Seat::Random),
            "mcts" => Ok(Seat::Mcts(100)),
            other => other
                .strip_prefix("mcts:")
                .and_then(|n| n.parse().ok())
                .filter(|&n| n > 0)
                .map(Seat::Mcts)
                .ok_or_else(|| format!("unknown seat \"{s}\" (expected human, random or mcts:N)")),
        }
    }
}

impl fmt::Display for Seat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seat::Human => write!(f, "human"),
            Seat::Random => write!(f, "random"),
            Seat::Mcts(n) => write!(f, "mcts:{n}"),
        }
    }
}

impl Serialize for Seat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Seat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Seat, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Seat {
    /// An agent for this seat, seeded per decision; `None` for humans.
    pub fn agent(self, seed: u64, ply: u64) -> Option<Box<dyn Agent>> {
        let rng = stream(seed, ply);
        match self {
            Seat::Human => None,
            Seat::Random => Some(Box::new(RandomAgent::new(rng))),
            Seat::Mcts(n) => Some(Box::new(Mcts::new(MctsConfig::with_iterations(n), rng))),
        }
    }
}

/// A move request in any of the accepted forms.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum ActionRequest {
    Index { action_index: u32 },
    Move { source: usize, dest: usize },
    Place { cell: usize },
    Direction { direction: String },
    Word(String),
}

impl ActionRequest {
    /// Encoded index, or `None` when the request has no encoding in this
    /// game's action space.
    pub fn resolve(&self, game: &CompiledGame) -> Option<u32> {
        let codec = &game.codec;
        match self {
            ActionRequest::Index { action_index } => ((*action_index as usize) < codec.size).then_some(*action_index),
            ActionRequest::Move { source, dest } if codec.kind == CodecKind::Placement && source == dest => {
                codec.encode(Action::Place(*dest))
            }
            ActionRequest::Move { source, dest } => codec.encode(Action::Move { source: *source, dest: *dest }),
            ActionRequest::Place { cell } => codec.encode(Action::Place(*cell)),
            ActionRequest::Direction { direction } => {
                Dir::ALL.into_iter().find(|d| d.name() == direction).and_then(|d| codec.encode(Action::Direction(d)))
            }
            ActionRequest::Word(w) if w.eq_ignore_ascii_case("pass") => codec.encode(Action::Pass),
            ActionRequest::Word(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoveView {
    pub index: u32,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dest: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<&'static str>,
}

impl MoveView {
    pub fn decode(game: &CompiledGame, index: u32) -> MoveView {
        let mut m = MoveView { index, kind: "unknown", cell: None, source: None, dest: None, direction: None };
        match game.codec.decode(index) {
            Some(Action::Pass) => m.kind = "pass",
            Some(Action::Place(c)) => {
                m.kind = "place";
                m.cell = Some(c);
            }
            Some(Action::Move { source, dest }) if source == dest => {
                m.kind = "place";
                m.cell = Some(dest);
            }
            Some(Action::Move { source, dest }) => {
                m.kind = "move";
                m.source = Some(source);
                m.dest = Some(dest);
            }
            Some(Action::Direction(d)) => {
                m.kind = "direction";
                m.direction = Some(d.name());
            }
            None => {}
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellView {
    pub index: usize,
    pub row: u16,
    pub col: u16,
    pub piece: Option<String>,
    pub owner: Option<Player>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeView {
    pub winner: Option<Player>,
    pub results: [&'static str; 2],
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rendering {
    pub board: BoardShape,
    pub rows: usize,
    pub width: usize,
    pub colors: BTreeMap<String, String>,
    pub shapes: BTreeMap<String, String>,
}

/// Everything a client needs to draw and drive one position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateView {
    pub v: u32,
    pub session_id: String,
    pub game: String,
    pub seats: [Seat; 2],
    pub mover: Player,
    pub move_count: u32,
    pub history_len: usize,
    pub cells: Vec<CellView>,
    pub scores: Option<[i64; 2]>,
    pub action_space_size: usize,
    pub legal_moves: Vec<MoveView>,
    pub terminated: bool,
    pub outcome: Option<OutcomeView>,
    pub rendering: Rendering,
}

fn result_name(r: PlayerResult) -> &'static str {
    match r {
        PlayerResult::Win => "win",
        PlayerResult::Lose => "lose",
        PlayerResult::Draw => "draw",
    }
}

pub fn rendering(game: &CompiledGame) -> Rendering {
    let mut colors = BTreeMap::new();
    let mut shapes = BTreeMap::new();
    for d in &game.spec.rendering {
        match d {
            RenderingDetail::Color(p, c) => {
                colors.insert(format!("{p:?}"), serde_json::to_value(c).unwrap().as_str().unwrap_or("").to_string());
            }
            RenderingDetail::Shape(piece, s) => {
                shapes.insert(piece.clone(), serde_json::to_value(s).unwrap().as_str().unwrap_or("").to_string());
            }
        }
    }
    Rendering { board: game.topology.shape, rows: game.topology.rows, width: game.topology.width, colors, shapes }
}

pub struct Session {
    pub id: String,
    pub text: String,
    pub game: Arc<CompiledGame>,
    pub seats: [Seat; 2],
    pub seed: u64,
    pub state: GameState,
    pub history: Vec<u32>,
    pub last_active: Instant,
    pub updates: broadcast::Sender<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionError {
    Illegal { legal: Vec<u32>, reason: String },
    Finished,
    HumanSeat(Player),
    NothingToUndo,
}

impl Session {
    pub fn new(id: String, text: String, game: Arc<CompiledGame>, seats: [Seat; 2], seed: u64) -> Session {
        let state = game.initial_state();
        let (updates, _) = broadcast::channel(64);
        Session { id, text, game, seats, seed, state, history: Vec::new(), last_active: Instant::now(), updates }
    }

    pub fn view(&self) -> StateView {
        let game = &self.game;
        let topo = &game.topology;
        let cells = (0..topo.num_cells)
            .map(|i| {
                let p = self.state.piece_at(i);
                CellView {
                    index: i,
                    row: topo.row_of[i],
                    col: topo.col_of[i],
                    piece: p.map(|(k, _)| game.pieces[k].clone()),
                    owner: p.map(|(_, o)| o),
                }
            })
            .collect();
        let legal = if self.state.terminated { Vec::new() } else { game.legal_actions(&self.state) };
        StateView {
            v: SCHEMA_VERSION,
            session_id: self.id.clone(),
            game: game.name.clone(),
            seats: self.seats,
            mover: self.state.mover,
            move_count: self.state.move_count,
            history_len: self.history.len(),
            cells,
            scores: self.state.scores,
            action_space_size: game.codec.size,
            legal_moves: legal.iter().map(|&a| MoveView::decode(game, a)).collect(),
            terminated: self.state.terminated,
            outcome: self.state.outcome.map(|o| OutcomeView {
                winner: o.winner(),
                results: [result_name(o.results[0]), result_name(o.results[1])],
                truncated: o.truncated,
            }),
            rendering: rendering(game),
        }
    }

    fn legal(&self) -> Vec<u32> {
        if self.state.terminated {
            Vec::new()
        } else {
            self.game.legal_actions(&self.state)
        }
    }

    /// Applies an encoded action after checking it against the engine.
    pub fn apply(&mut self, action: Option<u32>) -> Result<(), SessionError> {
        self.last_active = Instant::now();
        if self.state.terminated {
            return Err(SessionError::Finished);
        }
        let Some(a) = action.filter(|&a| self.game.is_legal(&self.state, a)) else {
            return Err(SessionError::Illegal { legal: self.legal(), reason: "action is not legal".into() });
        };
        self.game.step_capped(&mut self.state, a, DEFAULT_MAX_TURNS).map_err(|e| SessionError::Illegal {
            legal: self.legal(),
            reason: e.to_string(),
        })?;
        self.history.push(a);
        Ok(())
    }

    /// Lets the agent in the mover's seat choose and play an action.
    pub fn agent_move(&mut self) -> Result<u32, SessionError> {
        if self.state.terminated {
            return Err(SessionError::Finished);
        }
        let mover = self.state.mover;
        let mut agent =
            self.seats[mover.index()].agent(self.seed, self.history.len() as u64).ok_or(SessionError::HumanSeat(mover))?;
        let a = agent.select(&self.game, &self.state);
        self.apply(Some(a))?;
        Ok(a)
    }

    /// Replays `actions` from the initial state.
    pub fn replay(game: &CompiledGame, actions: &[u32]) -> Result<GameState, String> {
        let mut st = game.initial_state();
        for (i, &a) in actions.iter().enumerate() {
            if !game.is_legal(&st, a) {
                return Err(format!("history entry {i} ({a}) is not legal"));
            }
            game.step_capped(&mut st, a, DEFAULT_MAX_TURNS).map_err(|e| e.to_string())?;
        }
        Ok(st)
    }

    pub fn undo(&mut self) -> Result<(), SessionError> {
        self.last_active = Instant::now();
        self.history.pop().ok_or(SessionError::NothingToUndo)?;
        self.state = Session::replay(&self.game, &self.history).expect("a prefix of a legal history is legal");
        Ok(())
    }

    pub fn publish(&self) {
        if self.updates.receiver_count() > 0 {
            let _ = self.updates.send(serde_json::to_string(&self.view()).expect("views serialize"));
        }
    }
}

/// Persisted form of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub game_text: String,
    pub seats: [Seat; 2],
    pub seed: u64,
    pub history: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub v: u32,
    pub sessions: Vec<SessionRecord>,
}

pub type SharedSession = Arc<Mutex<Session>>;

pub struct SessionStore {
    sessions: RwLock<HashMap<String, SharedSession>>,
    pub ttl: Duration,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> SessionStore {
        SessionStore { sessions: RwLock::new(HashMap::new()), ttl }
    }

    pub fn create(&self, text: String, seats: [Seat; 2], seed: u64) -> Result<SharedSession, CompileError> {
        let game = Arc::new(compile_str(&text)?);
        let id = uuid::Uuid::new_v4().simple().to_string();
        Ok(self.insert(Session::new(id, text, game, seats, seed)))
    }

    fn insert(&self, s: Session) -> SharedSession {
        let id = s.id.clone();
        let shared = Arc::new(Mutex::new(s));
        self.sessions.write().unwrap().insert(id, shared.clone());
        shared
    }

    pub fn get(&self, id: &str) -> Option<SharedSession> {
        self.sessions.read().unwrap().get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle for longer than the TTL; returns how many.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let mut map = self.sessions.write().unwrap();
        let before = map.len();
        map.retain(|_, s| now.saturating_duration_since(s.lock().unwrap().last_active) <= self.ttl);
        before - map.len()
    }

    pub fn snapshot(&self) -> Snapshot {
        let map = self.sessions.read().unwrap();
        let mut sessions: Vec<SessionRecord> = map
            .values()
            .map(|s| {
                let s = s.lock().unwrap();
                SessionRecord {
                    id: s.id.clone(),
                    game_text: s.text.clone(),
                    seats: s.seats,
                    seed: s.seed,
                    history: s.history.clone(),
                }
            })
            .collect();
        sessions.sort_by(|a, b| a.id.cmp(&b.id));
        Snapshot { v: SCHEMA_VERSION, sessions }
    }

    /// Restores sessions by recompiling and replaying their histories.
    /// Records that no longer compile or replay are skipped and reported.
    pub fn restore(&self, snap: &Snapshot) -> Vec<String> {
        let mut problems = Vec::new();
        for r in &snap.sessions {
            let game = match compile_str(&r.game_text) {
                Ok(g) => Arc::new(g),
                Err(e) => {
                    problems.push(format!("{}: {e}", r.id));
                    continue;
                }
            };
            match Session::replay(&game, &r.history) {
                Ok(state) => {
                    let mut s = Session::new(r.id.clone(), r.game_text.clone(), game, r.seats, r.seed);
                    s.state = state;
                    s.history = r.history.clone();
                    self.insert(s);
                }
                Err(e) => problems.push(format!("{}: {e}", r.id)),
            }
        }
        problems
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seats_parse_and_print() {
        for s in ["human", "random", "mcts:25"] {
            assert_eq!(s.parse::<Seat>().unwrap().to_string(), s);
        }
        assert_eq!("mcts".parse::<Seat>(), Ok(Seat::Mcts(100)));
        assert!("mcts:0".parse::<Seat>().is_err());
        assert!("alien".parse::<Seat>().is_err());
    }

    #[test]
    fn action_requests_deserialize() {
        let parse = |s: &str| serde_json::from_str::<ActionRequest>(s).unwrap();
        assert_eq!(parse(r#"{"action_index": 3}"#), ActionRequest::Index { action_index: 3 });
        assert_eq!(parse(r#"{"source": 1, "dest": 2}"#), ActionRequest::Move { source: 1, dest: 2 });
        assert_eq!(parse(r#"{"cell": 4}"#), ActionRequest::Place { cell: 4 });
        assert_eq!(parse(r#""pass""#), ActionRequest::Word("pass".into()));
    }
}
