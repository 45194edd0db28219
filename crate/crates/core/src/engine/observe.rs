//! Fixed-shape tensor views of a state.

use serde::Serialize;

use super::state::GameState;
use crate::compiler::CompiledGame;
use crate::dsl::ast::Player;

/// Boolean planes of `num_cells` values each: for every piece type one
/// plane for the observer's pieces and one for the opponent's, then a
/// constant plane that is all true when P1 is to move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Observation {
    pub num_planes: usize,
    pub num_cells: usize,
    pub planes: Vec<bool>,
    pub legal: Vec<bool>,
}

impl Observation {
    pub fn plane(&self, i: usize) -> &[bool] {
        &self.planes[i * self.num_cells..(i + 1) * self.num_cells]
    }
}

impl CompiledGame {
    pub fn num_planes(&self) -> usize {
        self.pieces.len() * 2 + 1
    }

    pub fn observe(&self, st: &GameState, observer: Player) -> Observation {
        let n = self.topology.num_cells;
        let num_planes = self.num_planes();
        let mut planes = vec![false; num_planes * n];
        for cell in 0..n {
            if let Some((piece, owner)) = st.piece_at(cell) {
                let rel = if owner == observer { 0 } else { 1 };
                planes[(piece * 2 + rel) * n + cell] = true;
            }
        }
        if st.mover == Player::P1 {
            planes[(num_planes - 1) * n..].fill(true);
        }
        Observation { num_planes, num_cells: n, planes, legal: self.legal_mask(st) }
    }
}
