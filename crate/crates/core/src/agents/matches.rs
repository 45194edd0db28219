//! Head-to-head games between agents.

use rayon::prelude::*;
use serde::Serialize;

use super::Agent;
use crate::compiler::CompiledGame;
use crate::dsl::ast::Player;
use crate::engine::playout::apply_cap;
use crate::engine::Outcome;

/// Plays one game; `agents[0]` moves for P1.
pub fn play_game(game: &CompiledGame, agents: [&mut dyn Agent; 2], max_turns: u32) -> (Outcome, u32) {
    let [a, b] = agents;
    let mut st = game.initial_state();
    apply_cap(&mut st, max_turns);
    while !st.terminated {
        let agent: &mut dyn Agent = if st.mover == Player::P1 { &mut *a } else { &mut *b };
        let action = agent.select(game, &st);
        game.apply(&mut st, action);
        apply_cap(&mut st, max_turns);
    }
    (st.outcome.expect("terminated"), st.move_count)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SeriesResult {
    pub games: u32,
    /// Wins of the first agent.
    pub wins: u32,
    pub losses: u32,
    pub draws: u32,
}

impl SeriesResult {
    pub fn win_rate(&self) -> f64 {
        self.wins as f64 / self.games.max(1) as f64
    }

    /// Wins plus half the draws, per game.
    pub fn score(&self) -> f64 {
        (self.wins as f64 + 0.5 * self.draws as f64) / self.games.max(1) as f64
    }
}

/// Plays `games` games between agents built by `first` and `second`,
/// alternating seats; game `i` gets index `i` for seeding.
pub fn play_series<A, B>(game: &CompiledGame, games: u32, max_turns: u32, first: A, second: B) -> SeriesResult
where
    A: Fn(u64) -> Box<dyn Agent> + Sync,
    B: Fn(u64) -> Box<dyn Agent> + Sync,
{
    let results: Vec<(Outcome, bool)> = (0..games)
        .into_par_iter()
        .map(|i| {
            let mut a = first(i as u64);
            let mut b = second(i as u64);
            let first_is_p1 = i % 2 == 0;
            let (outcome, _) = if first_is_p1 {
                play_game(game, [a.as_mut(), b.as_mut()], max_turns)
            } else {
                play_game(game, [b.as_mut(), a.as_mut()], max_turns)
            };
            (outcome, first_is_p1)
        })
        .collect();
    let mut r = SeriesResult { games, ..Default::default() };
    for (o, first_is_p1) in results {
        let seat = if first_is_p1 { Player::P1 } else { Player::P2 };
        match o.winner() {
            Some(p) if p == seat => r.wins += 1,
            Some(_) => r.losses += 1,
            None => r.draws += 1,
        }
    }
    r
}
