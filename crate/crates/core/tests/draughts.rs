mod common;

use common::draughts::{moves, mv, KING, PAWN};
use ldx_core::dsl::ast::Player;
use ldx_core::engine::rng::stream;
use ldx_core::{compile_str, corpus, CompiledGame};
use rand::Rng as _;

fn with_start(p1: &str, p2: &str) -> CompiledGame {
    let src = corpus::source("english_draughts").unwrap();
    let start = src.find("(start").unwrap();
    let play = src.find("(play\n").unwrap();
    let text = format!(
        "{}(start (place \"pawn\" P1 ({p1})) (place \"pawn\" P2 ({p2})))\n        {}",
        &src[..start],
        &src[play..]
    );
    compile_str(&text).unwrap()
}

#[test]
fn transcript_forced_capture_double_jump_promotion() {
    let game = with_start("33 55", "26 12 7");
    let mut st = game.initial_state();
    assert_eq!(st.mover, Player::P1);
    // The capture is forced: the free pawn on 55 may not step.
    assert_eq!(game.legal_actions(&st), vec![mv(33, 19)]);
    st = game.step(&st, mv(33, 19)).unwrap();
    assert_eq!(st.piece_at(26), None);
    // Same piece again, and only its capture.
    assert_eq!(st.mover, Player::P1);
    assert_eq!(game.legal_actions(&st), vec![mv(19, 5)]);
    st = game.step(&st, mv(19, 5)).unwrap();
    assert_eq!(st.piece_at(12), None);
    assert_eq!(st.piece_at(5), Some((KING, Player::P1)));
    assert_eq!(st.mover, Player::P2);
    assert_eq!(game.legal_actions(&st), vec![mv(7, 14)]);
    st = game.step(&st, mv(7, 14)).unwrap();
    // The new king is forced to capture toward its own side.
    assert_eq!(game.legal_actions(&st), vec![mv(5, 23)]);
    st = game.step(&st, mv(5, 23)).unwrap();
    assert!(st.terminated);
    assert_eq!(st.outcome.unwrap().winner(), Some(Player::P1));
}

#[test]
fn captures_take_priority_in_fuzzed_states() {
    let game = corpus::load("english_draughts").unwrap();
    let mut checked = 0;
    let mut with_capture = 0;
    let mut g = 0;
    while checked < 10_000 {
        let mut rng = stream(5, g);
        g += 1;
        let mut st = game.initial_state();
        while !st.terminated && st.move_count < 200 && checked < 10_000 {
            let legal = game.legal_actions(&st);
            let (caps, steps) = moves(&st);
            if caps.is_empty() {
                assert_eq!(legal, steps);
            } else {
                with_capture += 1;
                assert_eq!(legal, caps);
            }
            checked += 1;
            let a = legal[rng.random_range(0..legal.len())];
            st = game.step(&st, a).unwrap();
        }
    }
    assert!(with_capture > 500, "too few capture states: {with_capture}");
}

#[test]
fn layout_and_codec() {
    let game = corpus::load("english_draughts").unwrap();
    assert_eq!(game.codec.size, 4096);
    assert_eq!(game.pieces, vec!["pawn", "king"]);
    let st = game.initial_state();
    assert_eq!(game.observe(&st, Player::P1).num_planes, 5);
    assert_eq!(game.legal_actions(&st).len(), 7);
    assert_eq!(st.pieces_of(PAWN, Player::P1).count(), 12);
}
