//! Batched environments stepped in parallel.
//!
//! Environment `i` of a batch seeded with `s` always draws from stream
//! `(s, i)`, so its trajectory is the same for every batch size and thread
//! count. Finished environments are reset in place and keep their stream.

use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;
use thiserror::Error;

use super::playout::apply_cap;
use super::rng::{stream, Rng};
use super::state::{GameState, Outcome};
use crate::compiler::CompiledGame;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BatchError {
    #[error("expected {expected} actions, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("environment {env}: action {action} is not legal")]
    IllegalAction { env: usize, action: u32 },
}

/// What happened to each environment during one batched step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatchStep {
    pub actions: Vec<u32>,
    /// Outcome of environments that finished this step (and were reset).
    pub finished: Vec<Option<Outcome>>,
}

/// Minimum environments per parallel task.
const CHUNK: usize = 16;

pub struct BatchEnv {
    game: Arc<CompiledGame>,
    states: Vec<GameState>,
    rngs: Vec<Rng>,
    max_turns: u32,
    episodes: u64,
    steps: u64,
}

impl BatchEnv {
    pub fn new(game: Arc<CompiledGame>, batch_size: usize, seed: u64, max_turns: u32) -> BatchEnv {
        let init = game.initial_state();
        BatchEnv {
            states: vec![init; batch_size],
            rngs: (0..batch_size as u64).map(|i| stream(seed, i)).collect(),
            game,
            max_turns,
            episodes: 0,
            steps: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn game(&self) -> &CompiledGame {
        &self.game
    }

    pub fn states(&self) -> &[GameState] {
        &self.states
    }

    /// Episodes completed so far across all environments.
    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    /// Environment transitions applied so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Boards of all environments, row-major `[env][cell]`.
    pub fn boards(&self) -> Vec<u8> {
        self.states.iter().flat_map(|s| s.board.iter().copied()).collect()
    }

    /// Legal masks of all environments, row-major `[env][action]`.
    pub fn legal_masks(&self) -> Vec<bool> {
        let a = self.game.codec.size;
        let mut out = vec![false; self.states.len() * a];
        out.par_chunks_mut(a).zip(self.states.par_iter()).with_min_len(CHUNK).for_each_init(Vec::new, |buf, (row, st)| {
            self.game.legal_actions_into(st, buf);
            for &x in buf.iter() {
                row[x as usize] = true;
            }
        });
        out
    }

    fn finish(game: &CompiledGame, st: &mut GameState, max_turns: u32) -> Option<Outcome> {
        apply_cap(st, max_turns);
        if st.terminated {
            let o = st.outcome;
            *st = game.initial_state();
            o
        } else {
            None
        }
    }

    /// Applies one chosen action per environment.
    pub fn step(&mut self, actions: &[u32]) -> Result<BatchStep, BatchError> {
        if actions.len() != self.states.len() {
            return Err(BatchError::WrongLength { expected: self.states.len(), got: actions.len() });
        }
        let game = &*self.game;
        if let Some((env, &action)) =
            actions.iter().enumerate().find(|(i, a)| !game.is_legal(&self.states[*i], **a))
        {
            return Err(BatchError::IllegalAction { env, action });
        }
        let max_turns = self.max_turns;
        let finished: Vec<Option<Outcome>> = self
            .states
            .par_iter_mut()
            .zip(actions.par_iter())
            .with_min_len(CHUNK)
            .map(|(st, &a)| {
                game.apply(st, a);
                Self::finish(game, st, max_turns)
            })
            .collect();
        self.record(&finished);
        Ok(BatchStep { actions: actions.to_vec(), finished })
    }

    /// Every environment takes a uniform random legal action.
    pub fn step_random(&mut self) -> BatchStep {
        let game = &*self.game;
        let max_turns = self.max_turns;
        let (actions, finished): (Vec<u32>, Vec<Option<Outcome>>) = self
            .states
            .par_iter_mut()
            .zip(self.rngs.par_iter_mut())
            .with_min_len(CHUNK)
            .map_init(Vec::new, |legal, (st, rng)| {
                if st.terminated {
                    // Only reachable when the initial state is already final.
                    return (u32::MAX, st.outcome);
                }
                game.legal_actions_into(st, legal);
                let a = legal[rng.random_range(0..legal.len())];
                game.apply(st, a);
                (a, Self::finish(game, st, max_turns))
            })
            .unzip();
        self.record(&finished);
        BatchStep { actions, finished }
    }

    fn record(&mut self, finished: &[Option<Outcome>]) {
        self.steps += finished.len() as u64;
        self.episodes += finished.iter().filter(|o| o.is_some()).count() as u64;
    }
}
