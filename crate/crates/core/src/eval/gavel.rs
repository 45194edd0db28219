//! Playout-based quality heuristics and their harmonic-mean score.
//!
//! A game is evaluated from one pool of matches between a stronger and a
//! weaker MCTS agent whose seats alternate from game to game. Seat
//! statistics (balance) and agent statistics (strategic depth) both come
//! from that pool.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::Serialize;

use crate::agents::{Agent, Mcts, MctsConfig};
use crate::compiler::{compile_str, CompiledGame};
use crate::dsl::ast::Player;
use crate::engine::playout::{apply_cap, random_playout};
use crate::engine::rng::stream;
use crate::engine::Outcome;


#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GavelConfig {
    pub games: u32,
    pub strong_iterations: u32,
    pub weak_iterations: u32,
    pub smoke_playouts: u32,
    pub max_turns: u32,
    pub seed: u64,
    /// Scores strictly above this mark a game as interesting.
    pub threshold: f64,
}

impl Default for GavelConfig {
    fn default() -> Self {
        GavelConfig {
            games: 100,
            strong_iterations: 100,
            weak_iterations: 50,
            smoke_playouts: 8,
            max_turns: 200,
            seed: 0,
            threshold: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeuristicScores {
    pub balance: f64,
    pub decisiveness: f64,
    pub completion: f64,
    pub agency: f64,
    pub coverage: f64,
    pub strategic_depth: f64,
}

impl HeuristicScores {
    pub fn components(&self) -> [f64; 6] {
        [self.balance, self.decisiveness, self.completion, self.agency, self.coverage, self.strategic_depth]
    }

    /// Harmonic mean of the components; 0 if any component is 0.
    pub fn harmonic_mean(&self) -> f64 {
        let c = self.components();
        if c.iter().any(|x| *x <= 0.0) {
            return 0.0;
        }
        c.len() as f64 / c.iter().map(|x| 1.0 / x).sum::<f64>()
    }
}

/// Raw counts behind the heuristics.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MatchStats {
    pub games: u32,
    pub p1_wins: u32,
    pub p2_wins: u32,
    pub draws: u32,
    pub truncated: u32,
    pub strong_wins: u32,
    pub weak_wins: u32,
    pub turns: u64,
    /// Turns on which the mover had more than one legal action.
    pub choice_turns: u64,
    /// Sum over games of the fraction of cells ever occupied.
    pub coverage_sum: f64,
}

impl MatchStats {
    pub fn scores(&self) -> HeuristicScores {
        let games = self.games.max(1) as f64;
        let decisive = self.p1_wins + self.p2_wins;
        let balance = if decisive == 0 {
            0.0
        } else {
            let d = decisive as f64;
            1.0 - (self.p1_wins as f64 / d - self.p2_wins as f64 / d).abs()
        };
        HeuristicScores {
            balance,
            decisiveness: decisive as f64 / games,
            completion: (self.games - self.truncated) as f64 / games,
            agency: if self.turns == 0 { 0.0 } else { self.choice_turns as f64 / self.turns as f64 },
            coverage: self.coverage_sum / games,
            strategic_depth: ((self.strong_wins as f64 - self.weak_wins as f64) / games).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GavelReport {
    pub name: String,
    pub playable: bool,
    pub error: Option<String>,
    pub scores: Option<HeuristicScores>,
    pub gavel_score: f64,
    pub interesting: bool,
    pub stats: Option<MatchStats>,
}

impl GavelReport {
    fn unplayable(name: String, error: String) -> GavelReport {
        GavelReport { name, playable: false, error: Some(error), scores: None, gavel_score: 0.0, interesting: false, stats: None }
    }

    pub const CSV_HEADER: &'static str =
        "name,playable,balance,decisiveness,completion,agency,coverage,strategic_depth,gavel_score,interesting";

    pub fn csv_row(&self) -> String {
        let comps = match &self.scores {
            Some(s) => s.components().map(|x| format!("{x:.4}")).join(","),
            None => ",,,,,".to_string(),
        };
        let name = if self.name.contains([',', '"']) { format!("\"{}\"", self.name.replace('"', "\"\"")) } else { self.name.clone() };
        format!("{name},{},{comps},{:.4},{}", self.playable, self.gavel_score, self.interesting)
    }
}

struct GameRecord {
    outcome: Outcome,
    strong_seat: Player,
    turns: u64,
    choice_turns: u64,
    coverage: f64,
}

fn play_recorded(game: &CompiledGame, cfg: &GavelConfig, i: u64) -> GameRecord {
    let strong_seat = if i.is_multiple_of(2) { Player::P1 } else { Player::P2 };
    let mut strong = Mcts::new(MctsConfig { max_turns: cfg.max_turns, ..MctsConfig::with_iterations(cfg.strong_iterations) }, stream(cfg.seed, 2 * i));
    let mut weak = Mcts::new(MctsConfig { max_turns: cfg.max_turns, ..MctsConfig::with_iterations(cfg.weak_iterations) }, stream(cfg.seed, 2 * i + 1));
    let mut st = game.initial_state();
    apply_cap(&mut st, cfg.max_turns);
    let mut seen = st.occupied();
    let (mut turns, mut choice_turns) = (0u64, 0u64);
    let mut legal = Vec::new();
    while !st.terminated {
        game.legal_actions_into(&st, &mut legal);
        turns += 1;
        if legal.len() > 1 {
            choice_turns += 1;
        }
        let action = if legal.len() == 1 {
            legal[0]
        } else if st.mover == strong_seat {
            strong.select(game, &st)
        } else {
            weak.select(game, &st)
        };
        game.apply(&mut st, action);
        apply_cap(&mut st, cfg.max_turns);
        seen |= st.occupied();
    }
    let coverage = (seen & game.topology.all).count() as f64 / game.topology.num_cells as f64;
    GameRecord { outcome: st.outcome.expect("terminated"), strong_seat, turns, choice_turns, coverage }
}

/// Plays the match pool and aggregates raw statistics.
pub fn collect_stats(game: &CompiledGame, cfg: &GavelConfig) -> MatchStats {
    let records: Vec<GameRecord> = (0..cfg.games as u64).into_par_iter().map(|i| play_recorded(game, cfg, i)).collect();
    let mut s = MatchStats { games: cfg.games, ..Default::default() };
    for r in records {
        match r.outcome.winner() {
            Some(Player::P1) => s.p1_wins += 1,
            Some(Player::P2) => s.p2_wins += 1,
            None => s.draws += 1,
        }
        if let Some(w) = r.outcome.winner() {
            if w == r.strong_seat {
                s.strong_wins += 1;
            } else {
                s.weak_wins += 1;
            }
        }
        s.truncated += r.outcome.truncated as u32;
        s.turns += r.turns;
        s.choice_turns += r.choice_turns;
        s.coverage_sum += r.coverage;
    }
    s
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "runtime failure".into())
}

/// Evaluates an already compiled game.
pub fn evaluate_compiled(game: &CompiledGame, cfg: &GavelConfig) -> GavelReport {
    let name = game.name.clone();
    let smoke = catch_unwind(AssertUnwindSafe(|| {
        for i in 0..cfg.smoke_playouts as u64 {
            random_playout(game, &mut stream(cfg.seed ^ 0x5eed, i), cfg.max_turns);
        }
    }));
    if let Err(e) = smoke {
        return GavelReport::unplayable(name, panic_message(e));
    }
    let stats = match catch_unwind(AssertUnwindSafe(|| collect_stats(game, cfg))) {
        Ok(s) => s,
        Err(e) => return GavelReport::unplayable(name, panic_message(e)),
    };
    let scores = stats.scores();
    let gavel_score = scores.harmonic_mean();
    GavelReport {
        name,
        playable: true,
        error: None,
        scores: Some(scores),
        gavel_score,
        interesting: gavel_score > cfg.threshold,
        stats: Some(stats),
    }
}

/// Evaluates arbitrary program text; failures make the game unplayable.
pub fn evaluate_game(text: &str, cfg: &GavelConfig) -> GavelReport {
    match compile_str(text) {
        Ok(game) => evaluate_compiled(&game, cfg),
        Err(e) => GavelReport::unplayable(String::new(), e.to_string()),
    }
}

/// Median and population standard deviation.
pub fn median_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    let median = if v.len().is_multiple_of(2) { (v[mid - 1] + v[mid]) / 2.0 } else { v[mid] };
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
    (median, var.sqrt())
}

