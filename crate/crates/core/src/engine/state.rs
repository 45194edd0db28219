use serde::{Deserialize, Serialize};

use crate::compiler::connectivity::UnionFind;
use crate::dsl::ast::Player;
use crate::topology::CellMask;

/// Per-player result of a finished game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayerResult {
    Win,
    Lose,
    Draw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    /// Indexed by [`Player::index`].
    pub results: [PlayerResult; 2],
    /// Ended by the turn cap rather than by a rule.
    pub truncated: bool,
}

impl Outcome {
    pub fn win(p: Player) -> Outcome {
        let mut results = [PlayerResult::Lose; 2];
        results[p.index()] = PlayerResult::Win;
        Outcome { results, truncated: false }
    }

    pub fn draw() -> Outcome {
        Outcome { results: [PlayerResult::Draw; 2], truncated: false }
    }

    pub fn truncated() -> Outcome {
        Outcome { results: [PlayerResult::Draw; 2], truncated: true }
    }

    pub fn winner(&self) -> Option<Player> {
        Player::ALL.into_iter().find(|p| self.results[p.index()] == PlayerResult::Win)
    }

    pub fn result(&self, p: Player) -> PlayerResult {
        self.results[p.index()]
    }

    /// +1 win, 0 draw, -1 loss for `p`.
    pub fn value(&self, p: Player) -> f64 {
        match self.result(p) {
            PlayerResult::Win => 1.0,
            PlayerResult::Draw => 0.0,
            PlayerResult::Lose => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    #[default]
    None,
    Place,
    Step,
    Hop,
    Slide,
    Pass,
}

/// The most recent action taken by one player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LastAction {
    pub kind: ActionKind,
    pub source: u16,
    pub dest: u16,
}

impl LastAction {
    /// Destination cell, if the action put a piece somewhere.
    pub fn cell(&self) -> Option<usize> {
        match self.kind {
            ActionKind::None | ActionKind::Pass => None,
            _ => Some(self.dest as usize),
        }
    }
}

/// Masks filled by the current action and read by its effects and the end
/// rules; cleared when the turn ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Transient {
    pub hopped: CellMask,
    pub captured: CellMask,
    pub promoted: CellMask,
}

/// Runtime state of one game. Optional attributes are `Some` exactly when
/// the compiled game's layout includes them, so every state of one game has
/// the same shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    /// 0 for empty, otherwise `1 + piece * 2 + owner`.
    pub board: Vec<u8>,
    pub mover: Player,
    pub phase: u16,
    /// Position of `mover` in the phase's mover order.
    pub turn: u16,
    pub move_count: u32,
    pub scores: Option<[i64; 2]>,
    /// Whether each player's most recent action was a pass.
    pub passed: Option<[bool; 2]>,
    /// Some(cell) when the layout tracks a forced source cell; `NO_CELL`
    /// means no constraint this turn.
    pub must_move: Option<u16>,
    pub last: Option<[LastAction; 2]>,
    pub transient: Option<Transient>,
    pub terminated: bool,
    pub outcome: Option<Outcome>,
    /// Cell sets per `piece * 2 + owner`, derived from `board`.
    pub(crate) occ: Vec<CellMask>,
    /// Cells occupied by each player, derived from `board`.
    pub(crate) player_occ: [CellMask; 2],
    pub(crate) connectivity: Vec<UnionFind>,
    /// Connectivity needs a rebuild before it can be trusted.
    pub(crate) conn_dirty: bool,
}

impl GameState {
    #[inline]
    pub fn code(piece: usize, owner: Player) -> u8 {
        (1 + piece * 2 + owner.index()) as u8
    }

    /// (piece, owner) at `cell`.
    #[inline]
    pub fn piece_at(&self, cell: usize) -> Option<(usize, Player)> {
        match self.board[cell] {
            0 => None,
            c => {
                let c = c as usize - 1;
                Some((c / 2, Player::from_index(c % 2)))
            }
        }
    }

    pub fn occupied(&self) -> CellMask {
        self.player_occ[0] | self.player_occ[1]
    }

    pub fn occupied_by(&self, p: Player) -> CellMask {
        self.player_occ[p.index()]
    }

    /// Cells holding `piece` owned by `p`.
    #[inline]
    pub fn pieces_of(&self, piece: usize, p: Player) -> CellMask {
        self.occ[piece * 2 + p.index()]
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied().count()
    }

    pub fn score(&self, p: Player) -> i64 {
        self.scores.map(|s| s[p.index()]).unwrap_or(0)
    }

    /// Writes a board cell and keeps the derived sets in sync. Connectivity
    /// is maintained by the caller.
    #[inline]
    pub(crate) fn put(&mut self, cell: usize, code: u8) {
        let old = self.board[cell];
        if old != 0 {
            let i = old as usize - 1;
            self.occ[i].clear(cell);
            self.player_occ[i % 2].clear(cell);
        }
        if code != 0 {
            let i = code as usize - 1;
            self.occ[i].set(cell);
            self.player_occ[i % 2].set(cell);
        }
        self.board[cell] = code;
    }

    /// Copies `other` into `self`, reusing allocations.
    pub fn copy_from(&mut self, other: &GameState) {
        self.board.clone_from(&other.board);
        self.occ.clone_from(&other.occ);
        self.connectivity.clone_from(&other.connectivity);
        self.mover = other.mover;
        self.phase = other.phase;
        self.turn = other.turn;
        self.move_count = other.move_count;
        self.scores = other.scores;
        self.passed = other.passed;
        self.must_move = other.must_move;
        self.last = other.last;
        self.transient = other.transient;
        self.terminated = other.terminated;
        self.outcome = other.outcome;
        self.player_occ = other.player_occ;
        self.conn_dirty = other.conn_dirty;
    }

    /// Bytes of state actually carried by this game's layout.
    pub fn byte_size(&self) -> usize {
        let mut n = self.board.len() + 1 + 2 + 2 + 4 + 1 + 8;
        n += self.scores.map_or(0, |_| 16);
        n += self.passed.map_or(0, |_| 2);
        n += self.must_move.map_or(0, |_| 2);
        n += self.last.map_or(0, |_| 2 * std::mem::size_of::<LastAction>());
        n += self.transient.map_or(0, |_| 3 * self.board.len().div_ceil(8));
        n += self.connectivity.iter().map(UnionFind::byte_size).sum::<usize>();
        n
    }
}
