use std::sync::Arc;

use ldx_core::engine::rng::stream;
use ldx_core::engine::{BatchEnv, BatchError};
use ldx_core::{corpus, CompiledGame};
use rand::Rng as _;

const SEED: u64 = 99;
const STEPS: usize = 250;
const MAX_TURNS: u32 = 200;

/// One environment run on its own: actions taken and final board.
fn reference(game: &CompiledGame, env: u64) -> (Vec<u32>, Vec<u8>) {
    let mut rng = stream(SEED, env);
    let mut st = game.initial_state();
    let mut actions = Vec::new();
    for _ in 0..STEPS {
        let legal = game.legal_actions(&st);
        let a = legal[rng.random_range(0..legal.len())];
        actions.push(a);
        game.step_capped(&mut st, a, MAX_TURNS).unwrap();
        if st.terminated {
            st = game.initial_state();
        }
    }
    (actions, st.board)
}

fn check(name: &str) {
    let game = Arc::new(corpus::load(name).unwrap());
    let refs: Vec<(Vec<u32>, Vec<u8>)> = (0..1024).map(|i| reference(&game, i)).collect();
    for b in [2usize, 64, 1024] {
        let mut env = BatchEnv::new(game.clone(), b, SEED, MAX_TURNS);
        let mut taken = vec![Vec::new(); b];
        for _ in 0..STEPS {
            let s = env.step_random();
            for (i, a) in s.actions.into_iter().enumerate() {
                taken[i].push(a);
            }
        }
        for i in 0..b {
            assert_eq!(taken[i], refs[i].0, "{name} B={b} env {i}");
            assert_eq!(env.states()[i].board, refs[i].1, "{name} B={b} env {i}");
        }
    }
}

#[test]
fn batches_match_independent_runs_tic_tac_toe() {
    check("tic_tac_toe");
}

#[test]
fn batches_match_independent_runs_draughts() {
    check("english_draughts");
}

#[test]
fn batches_match_independent_runs_reversi() {
    check("reversi");
}

#[test]
fn explicit_actions_are_validated() {
    let game = Arc::new(corpus::load("connect_four").unwrap());
    let mut env = BatchEnv::new(game.clone(), 3, 0, MAX_TURNS);
    assert_eq!(env.step(&[0, 1]), Err(BatchError::WrongLength { expected: 3, got: 2 }));
    // Row 0 is the top; only the bottom row is open at the start.
    assert_eq!(env.step(&[35, 36, 0]), Err(BatchError::IllegalAction { env: 2, action: 0 }));
    let masks = env.legal_masks();
    assert_eq!(masks.len(), 3 * 42);
    assert_eq!(masks[..42].iter().filter(|&&m| m).count(), 7);
    let s = env.step(&[35, 36, 41]).unwrap();
    assert!(s.finished.iter().all(Option::is_none));
    assert_eq!(env.boards()[35], 1);
    assert_eq!(env.steps(), 3);
}
