//! Uniform-random playouts and trajectory records.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::rng::Rng;
use super::state::{GameState, Outcome};
use crate::compiler::CompiledGame;
use crate::dsl::ast::Player;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayoutResult {
    pub outcome: Outcome,
    pub moves: u32,
    pub final_state: GameState,
}

/// One line of a trajectory log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub move_count: u32,
    pub mover: Player,
    pub action: u32,
    pub terminated: bool,
    pub outcome: Option<Outcome>,
}

/// Ends a live game that has reached the turn cap as a truncated draw.
pub fn apply_cap(st: &mut GameState, max_turns: u32) {
    if !st.terminated && st.move_count >= max_turns {
        st.terminated = true;
        st.outcome = Some(Outcome::truncated());
    }
}

impl CompiledGame {
    /// Step with a policy until the game ends or hits `max_turns`.
    pub fn play_out(
        &self,
        mut st: GameState,
        max_turns: u32,
        mut policy: impl FnMut(&GameState, &[u32]) -> u32,
        mut on_step: impl FnMut(&GameState, u32, &GameState),
    ) -> PlayoutResult {
        let mut legal = Vec::new();
        let start = st.move_count;
        apply_cap(&mut st, max_turns);
        while !st.terminated {
            self.legal_actions_into(&st, &mut legal);
            let a = policy(&st, &legal);
            let prev = st.clone();
            self.apply(&mut st, a);
            apply_cap(&mut st, max_turns);
            on_step(&prev, a, &st);
        }
        PlayoutResult { outcome: st.outcome.expect("terminated"), moves: st.move_count - start, final_state: st }
    }

    /// Plays from `st` with uniform random moves; `st` is left at the end.
    pub fn random_rollout(&self, st: &mut GameState, rng: &mut Rng, max_turns: u32, legal: &mut Vec<u32>) -> Outcome {
        apply_cap(st, max_turns);
        while !st.terminated {
            self.legal_actions_into(st, legal);
            let a = legal[rng.random_range(0..legal.len())];
            self.apply(st, a);
            apply_cap(st, max_turns);
        }
        st.outcome.expect("terminated")
    }

    /// Applies `action` if legal, then enforces the turn cap.
    pub fn step_capped(&self, st: &mut GameState, action: u32, max_turns: u32) -> Result<(), super::StepError> {
        self.step_mut(st, action)?;
        apply_cap(st, max_turns);
        Ok(())
    }
}

pub fn random_playout(game: &CompiledGame, rng: &mut Rng, max_turns: u32) -> PlayoutResult {
    let mut st = game.initial_state();
    let mut legal = Vec::new();
    let start = st.move_count;
    let outcome = game.random_rollout(&mut st, rng, max_turns, &mut legal);
    PlayoutResult { outcome, moves: st.move_count - start, final_state: st }
}

/// Writes a random playout as JSON lines, one per action.
pub fn random_trajectory(game: &CompiledGame, rng: &mut Rng, max_turns: u32) -> Vec<TrajectoryRecord> {
    let mut out = Vec::new();
    game.play_out(
        game.initial_state(),
        max_turns,
        |_, legal| legal[rng.random_range(0..legal.len())],
        |prev, a, next| {
            out.push(TrajectoryRecord {
                move_count: next.move_count,
                mover: prev.mover,
                action: a,
                terminated: next.terminated,
                outcome: next.outcome,
            })
        },
    );
    out
}
