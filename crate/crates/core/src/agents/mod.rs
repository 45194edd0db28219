//! Game-playing agents and match play.

pub mod matches;
pub mod mcts;

use rand::Rng as _;

use crate::compiler::CompiledGame;
use crate::engine::rng::Rng;
use crate::engine::GameState;

pub use matches::{play_game, play_series, SeriesResult};
pub use mcts::{Mcts, MctsConfig, SearchResult};

pub trait Agent: Send {
    /// Picks a legal action for the mover of a non-terminal state.
    fn select(&mut self, game: &CompiledGame, st: &GameState) -> u32;

    fn name(&self) -> String;
}

pub struct RandomAgent {
    rng: Rng,
    legal: Vec<u32>,
}

impl RandomAgent {
    pub fn new(rng: Rng) -> RandomAgent {
        RandomAgent { rng, legal: Vec::new() }
    }
}

impl Agent for RandomAgent {
    fn select(&mut self, game: &CompiledGame, st: &GameState) -> u32 {
        game.legal_actions_into(st, &mut self.legal);
        self.legal[self.rng.random_range(0..self.legal.len())]
    }

    fn name(&self) -> String {
        "random".into()
    }
}
