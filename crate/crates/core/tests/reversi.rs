mod common;

use common::{owners, reversi};
use ldx_core::compiler::codec::Action;
use ldx_core::dsl::ast::Player;
use ldx_core::engine::rng::stream;
use ldx_core::corpus;
use rand::Rng as _;

#[test]
fn initial_position() {
    let game = corpus::load("reversi").unwrap();
    assert_eq!(game.codec.size, 65);
    let st = game.initial_state();
    assert_eq!(game.legal_actions(&st).len(), 4);
    assert_eq!(st.scores, Some([2, 2]));
}

#[test]
fn random_games_agree_with_reference_rules() {
    let game = corpus::load("reversi").unwrap();
    let pass = game.codec.encode(Action::Pass).unwrap();
    for i in 0..1000 {
        let mut rng = stream(11, i);
        let mut st = game.initial_state();
        let mut b = owners::<64>(&st);
        while !st.terminated {
            let me = st.mover.index() as u8 + 1;
            let mut expected: Vec<u32> = reversi::moves(&b, me).into_iter().map(|c| c as u32).collect();
            if expected.is_empty() {
                expected.push(pass);
            }
            let legal = game.legal_actions(&st);
            assert_eq!(legal, expected, "game {i} move {}", st.move_count);
            let a = legal[rng.random_range(0..legal.len())];
            if a != pass {
                for f in reversi::flips(&b, a as usize, me) {
                    b[f] = me;
                }
                b[a as usize] = me;
            }
            st = game.step(&st, a).unwrap();
            assert_eq!(owners::<64>(&st), b);
            let scores = st.scores.unwrap();
            assert_eq!((scores[0] + scores[1]) as usize, st.occupied_count());
        }
        let p1 = b.iter().filter(|&&v| v == 1).count();
        let p2 = b.iter().filter(|&&v| v == 2).count();
        let expected = match p1.cmp(&p2) {
            std::cmp::Ordering::Greater => Some(Player::P1),
            std::cmp::Ordering::Less => Some(Player::P2),
            std::cmp::Ordering::Equal => None,
        };
        assert_eq!(st.outcome.unwrap().winner(), expected, "game {i}");
        assert!(!st.outcome.unwrap().truncated);
        let full = b.iter().all(|&v| v != 0);
        let stuck = reversi::moves(&b, 1).is_empty() && reversi::moves(&b, 2).is_empty();
        assert!(full || stuck, "game {i} ended early");
    }
}
