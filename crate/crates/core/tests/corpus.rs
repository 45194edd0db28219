use std::sync::Arc;

use ldx_core::compiler::codec::CodecKind;
use ldx_core::dsl::ast::Player;
use ldx_core::dsl::{parse_game, serialize::serialize};
use ldx_core::engine::playout::random_trajectory;
use ldx_core::engine::random_playout;
use ldx_core::engine::rng::stream;
use ldx_core::eval::bench::{benchmark_throughput, BenchConfig, ThroughputRow};
use ldx_core::{compile, corpus};

#[test]
fn random_playouts_finish_within_the_cap() {
    for (name, _) in corpus::GAMES {
        let game = corpus::load(name).unwrap();
        for i in 0..300 {
            let r = random_playout(&game, &mut stream(1, i), 200);
            assert!(r.final_state.terminated);
            assert!(r.moves <= 200, "{name}");
            if r.outcome.truncated {
                assert_eq!(r.moves, 200);
                assert!(r.outcome.winner().is_none());
            }
        }
    }
}

#[test]
fn serialized_corpus_compiles_to_the_same_game() {
    for (name, text) in corpus::GAMES {
        let spec = parse_game(text).unwrap();
        let again = parse_game(&serialize(&spec)).unwrap();
        assert_eq!(spec, again, "{name}");
        let a = compile(&spec).unwrap();
        let b = compile(&again).unwrap();
        for i in 0..20 {
            let ra = random_playout(&a, &mut stream(2, i), 200);
            let rb = random_playout(&b, &mut stream(2, i), 200);
            assert_eq!(ra.final_state, rb.final_state, "{name}");
        }
    }
}

#[test]
fn action_spaces() {
    let size = |n: &str| corpus::load(n).unwrap().codec.size;
    assert_eq!(size("tic_tac_toe"), 9);
    assert_eq!(size("connect_four"), 42);
    assert_eq!(size("reversi"), 65);
    assert_eq!(size("english_draughts"), 4096);
    let grid = corpus::load("gridworld").unwrap();
    assert_eq!(grid.codec.kind, CodecKind::Gridworld);
    assert_eq!(grid.codec.size, 4);
}

#[test]
fn connect_four_opening() {
    let game = corpus::load("connect_four").unwrap();
    let st = game.initial_state();
    assert_eq!(game.legal_actions(&st), (35..42).collect::<Vec<u32>>());
    let st = game.step(&st, 38).unwrap();
    assert!(game.legal_actions(&st).contains(&31));
}

#[test]
fn observations() {
    let game = corpus::load("english_draughts").unwrap();
    let st = game.initial_state();
    let o1 = game.observe(&st, Player::P1);
    let o2 = game.observe(&st, Player::P2);
    assert_eq!(o1.num_planes, 5);
    assert_eq!(o1.planes.len(), 5 * 64);
    assert_eq!(o1.plane(0), o2.plane(1));
    assert_eq!(o1.plane(0).iter().filter(|&&x| x).count(), 12);
    assert!(o1.plane(4).iter().all(|&x| x));
    assert_eq!(o1.legal.iter().filter(|&&x| x).count(), 7);
}

#[test]
fn trajectories_are_deterministic() {
    let game = corpus::load("pente").unwrap();
    let a = random_trajectory(&game, &mut stream(3, 0), 200);
    let b = random_trajectory(&game, &mut stream(3, 0), 200);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(!a.is_empty());
}

#[test]
fn benchmark_rows_cover_every_batch_size() {
    let cfg = BenchConfig { batch_sizes: vec![1, 4, 16], warmup_episodes: 4, episodes: 20, max_turns: 200, seed: 0 };
    let mut rows: Vec<ThroughputRow> = Vec::new();
    for name in ["tic_tac_toe", "connect_four"] {
        rows.extend(benchmark_throughput(&Arc::new(corpus::load(name).unwrap()), &cfg));
    }
    assert_eq!(rows.len(), 2 * 3);
    assert_eq!(ThroughputRow::CSV_HEADER.split(',').count(), 5);
    for r in &rows {
        assert!(r.steps_per_sec_mean > 0.0);
        assert!(r.episodes >= 20);
        assert_eq!(r.csv_row().split(',').count(), 5);
        assert_eq!(r.tsv_row().split('\t').count(), 3);
    }
}
