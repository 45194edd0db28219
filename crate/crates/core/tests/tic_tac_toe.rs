mod common;

use common::ttt;
use ldx_core::dsl::ast::Player;
use ldx_core::engine::random_playout;
use ldx_core::engine::rng::stream;
use ldx_core::{corpus, CompiledGame, GameState};

fn engine_counts(game: &CompiledGame, st: &GameState, acc: &mut [u64; 3]) {
    for a in game.legal_actions(st) {
        let next = game.step(st, a).unwrap();
        if next.terminated {
            match next.outcome.unwrap().winner() {
                Some(Player::P1) => acc[0] += 1,
                Some(Player::P2) => acc[1] += 1,
                None => acc[2] += 1,
            }
        } else {
            engine_counts(game, &next, acc);
        }
    }
}

#[test]
fn exhaustive_enumeration_matches_oracle() {
    let mut expected = [0u64; 3];
    ttt::count_games(&mut [0; 9], 1, &mut expected);
    let game = corpus::load("tic_tac_toe").unwrap();
    let mut got = [0u64; 3];
    engine_counts(&game, &game.initial_state(), &mut got);
    assert_eq!(got, expected);
    assert_eq!(got.iter().sum::<u64>(), 255_168);
}

#[test]
fn random_play_distribution_matches_exact_probabilities() {
    let exact = ttt::random_play(&mut [0; 9], 1);
    let game = corpus::load("tic_tac_toe").unwrap();
    let n = 10_000;
    let mut counts = [0u32; 3];
    for i in 0..n {
        let r = random_playout(&game, &mut stream(42, i), 200);
        match r.outcome.winner() {
            Some(Player::P1) => counts[0] += 1,
            Some(Player::P2) => counts[1] += 1,
            None => counts[2] += 1,
        }
    }
    for k in 0..3 {
        let freq = counts[k] as f64 / n as f64;
        assert!((freq - exact[k]).abs() < 0.015, "outcome {k}: {freq} vs {}", exact[k]);
    }
}

#[test]
fn codec_and_layout() {
    let game = corpus::load("tic_tac_toe").unwrap();
    assert_eq!(game.codec.size, 9);
    let attrs = game.layout.attributes();
    for missing in ["scores", "passes", "connectivity"] {
        assert!(!attrs.contains(&missing), "{attrs:?}");
    }
    let st = game.initial_state();
    assert!(st.scores.is_none() && st.passed.is_none());
    assert_eq!(game.legal_actions(&st), (0..9).collect::<Vec<_>>());
}

#[test]
fn stones_equal_moves_in_every_game() {
    let game = corpus::load("tic_tac_toe").unwrap();
    for i in 0..500 {
        let mut rng = stream(3, i);
        let mut st = game.initial_state();
        while !st.terminated {
            let legal = game.legal_actions(&st);
            let a = legal[rand::Rng::random_range(&mut rng, 0..legal.len())];
            st = game.step(&st, a).unwrap();
            assert_eq!(st.occupied_count(), st.move_count as usize);
        }
    }
}
