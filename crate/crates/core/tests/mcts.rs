mod common;

use common::ttt::optimal_moves;
use ldx_core::agents::{play_series, Agent, Mcts, MctsConfig, RandomAgent};
use ldx_core::engine::rng::stream;
use ldx_core::engine::StepError;
use ldx_core::{corpus, CompiledGame, GameState};

fn ttt_after(moves: &[u32]) -> (CompiledGame, GameState, [u8; 9]) {
    let game = corpus::load("tic_tac_toe").unwrap();
    let mut st = game.initial_state();
    let mut b = [0u8; 9];
    for (i, &m) in moves.iter().enumerate() {
        st = game.step(&st, m).unwrap();
        b[m as usize] = if i % 2 == 0 { 1 } else { 2 };
    }
    (game, st, b)
}

fn mcts(iterations: u32, seed: u64) -> Mcts {
    Mcts::new(MctsConfig::with_iterations(iterations), stream(seed, 0))
}

#[test]
fn takes_the_win_in_one() {
    let (game, st, b) = ttt_after(&[0, 3, 1, 4]);
    assert_eq!(optimal_moves(&b, 1), vec![2]);
    let hits = (0..100).filter(|&s| mcts(100, s).select(&game, &st) == 2).count();
    assert!(hits >= 99, "{hits}/100");
}

#[test]
fn blocks_the_forced_threat() {
    let (game, st, b) = ttt_after(&[0, 4, 1]);
    let optimal = optimal_moves(&b, 2);
    assert_eq!(optimal, vec![2]);
    let hits = (0..100).filter(|&s| optimal.contains(&mcts(100, s).select(&game, &st))).count();
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn single_iteration_returns_a_legal_action() {
    for name in ["tic_tac_toe", "english_draughts", "reversi"] {
        let game = corpus::load(name).unwrap();
        let st = game.initial_state();
        for s in 0..20 {
            let a = mcts(1, s).select(&game, &st);
            assert!(game.is_legal(&st, a), "{name}");
        }
    }
}

#[test]
fn terminal_root_is_an_error() {
    let (game, st, _) = ttt_after(&[0, 3, 1, 4, 2]);
    assert!(st.terminated);
    assert!(matches!(mcts(10, 0).search(&game, &st), Err(StepError::TerminalState)));
}

#[test]
fn greedy_search_ignores_reward_scale() {
    let game = corpus::load("connect_four").unwrap();
    let st = game.initial_state();
    for seed in 0..5 {
        let run = |scale: f64| {
            let cfg = MctsConfig { exploration: 0.0, reward_scale: scale, ..MctsConfig::with_iterations(200) };
            Mcts::new(cfg, stream(seed, 0)).search(&game, &st).unwrap()
        };
        let (a, b) = (run(1.0), run(7.5));
        assert_eq!(a.action, b.action);
        let visits = |r: &ldx_core::agents::SearchResult| r.children.iter().map(|c| c.visits).collect::<Vec<_>>();
        assert_eq!(visits(&a), visits(&b));
        for (x, y) in a.children.iter().zip(&b.children) {
            assert!((x.value * 7.5 - y.value).abs() < 1e-9);
        }
    }
}

#[test]
fn visits_are_conserved() {
    for name in ["tic_tac_toe", "connect_four", "english_draughts"] {
        let game = corpus::load(name).unwrap();
        let st = game.initial_state();
        for iterations in [1, 2, 17, 300] {
            let mut m = mcts(iterations, 4);
            let r = m.search(&game, &st).unwrap();
            assert_eq!(r.root_visits, iterations);
            for (visits, child_sum, children) in m.tree_visits() {
                if children > 0 {
                    assert_eq!(child_sum, visits - 1, "{name} {iterations}");
                }
            }
        }
    }
}

#[test]
fn beats_random_at_connect_four() {
    let game = corpus::load("connect_four").unwrap();
    let r = play_series(
        &game,
        40,
        200,
        |i| Box::new(mcts(100, 1000 + i)) as Box<dyn Agent>,
        |i| Box::new(RandomAgent::new(stream(2000, i))) as Box<dyn Agent>,
    );
    assert!(r.win_rate() >= 0.85, "{r:?}");
}
