//! Fixed-size integer encoding of actions.

use serde::Serialize;

use crate::topology::Dir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodecKind {
    /// One index per cell.
    Placement,
    /// One index per (source, destination) pair; placements use `(c, c)`.
    Movement,
    /// One index per direction of a single moving agent.
    Gridworld,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Pass,
    Place(usize),
    Move { source: usize, dest: usize },
    Direction(Dir),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionCodec {
    pub kind: CodecKind,
    pub num_cells: usize,
    /// Agent directions, in index order (gridworld only).
    #[serde(skip)]
    pub directions: Vec<Dir>,
    pub has_pass: bool,
    /// Total number of action indices.
    pub size: usize,
}

impl ActionCodec {
    pub fn new(kind: CodecKind, num_cells: usize, directions: Vec<Dir>, has_pass: bool) -> ActionCodec {
        let base = match kind {
            CodecKind::Placement => num_cells,
            CodecKind::Movement => num_cells * num_cells,
            CodecKind::Gridworld => directions.len(),
        };
        ActionCodec { kind, num_cells, directions, has_pass, size: base + has_pass as usize }
    }

    pub fn pass_index(&self) -> Option<u32> {
        self.has_pass.then(|| (self.size - 1) as u32)
    }

    pub fn encode(&self, a: Action) -> Option<u32> {
        let n = self.num_cells;
        let i = match (self.kind, a) {
            (_, Action::Pass) => return self.pass_index(),
            (CodecKind::Placement, Action::Place(c)) if c < n => c,
            (CodecKind::Movement, Action::Place(c)) if c < n => c * n + c,
            (CodecKind::Movement, Action::Move { source, dest }) if source < n && dest < n && source != dest => {
                source * n + dest
            }
            (CodecKind::Gridworld, Action::Direction(d)) => self.directions.iter().position(|x| *x == d)?,
            _ => return None,
        };
        Some(i as u32)
    }

    pub fn decode(&self, index: u32) -> Option<Action> {
        let i = index as usize;
        if i >= self.size {
            return None;
        }
        if Some(index) == self.pass_index() {
            return Some(Action::Pass);
        }
        let n = self.num_cells;
        Some(match self.kind {
            CodecKind::Placement => Action::Place(i),
            CodecKind::Movement => {
                let (s, d) = (i / n, i % n);
                if s == d {
                    Action::Place(s)
                } else {
                    Action::Move { source: s, dest: d }
                }
            }
            CodecKind::Gridworld => Action::Direction(self.directions[i]),
        })
    }
}
