use ldx_core::eval::gavel::{evaluate_game, GavelConfig, GavelReport, HeuristicScores, MatchStats};
use ldx_core::corpus;
use proptest::prelude::*;

fn small() -> GavelConfig {
    GavelConfig { games: 12, strong_iterations: 30, weak_iterations: 10, ..Default::default() }
}

const DEGENERATE: &str = r#"(game "Degenerate" (players 2)
    (equipment (board (square 3)) (pieces ("stone" both)))
    (rules
        (play (repeat (P1 P2) (place "stone" (destination (center)))))
        (end (if (mover_is P1) (mover win)))))"#;

#[test]
fn degenerate_game_is_not_interesting() {
    let r = evaluate_game(DEGENERATE, &GavelConfig { games: 20, ..Default::default() });
    assert!(r.playable);
    let s = r.scores.unwrap();
    assert_eq!(s.decisiveness, 1.0);
    assert_eq!(s.agency, 0.0);
    assert_eq!(s.balance, 0.0);
    assert!((s.coverage - 1.0 / 9.0).abs() < 1e-12);
    assert_eq!(r.gavel_score, 0.0);
    assert!(!r.interesting);
    let stats = r.stats.unwrap();
    assert_eq!((stats.p1_wins, stats.turns), (20, 20));
}

#[test]
fn unparseable_text_is_unplayable() {
    for text in ["(game", "", "(game \"x\" (players 2))", "(nonsense 1 2 3)"] {
        let r = evaluate_game(text, &small());
        assert!(!r.playable);
        assert_eq!(r.gavel_score, 0.0);
        assert!(r.error.is_some());
        assert!(r.scores.is_none() && !r.interesting);
    }
}

#[test]
fn evaluation_is_reproducible() {
    let text = corpus::source("tic_tac_toe").unwrap();
    let a = evaluate_game(text, &small());
    let b = evaluate_game(text, &small());
    assert_eq!(a, b);
    let c = evaluate_game(text, &GavelConfig { seed: 1, ..small() });
    assert!(c.playable);
}

#[test]
fn csv_columns() {
    assert_eq!(GavelReport::CSV_HEADER.split(',').count(), 10);
    let r = evaluate_game("(", &small());
    assert_eq!(r.csv_row().split(',').count(), 10);
    let ok = evaluate_game(corpus::source("connect_four").unwrap(), &small());
    assert_eq!(ok.csv_row().split(',').count(), 10);
    assert!(ok.csv_row().starts_with("Connect Four,true,"));
}

proptest! {
    #[test]
    fn harmonic_mean_bounds(c in prop::array::uniform6(0.0f64..=1.0)) {
        let s = HeuristicScores {
            balance: c[0], decisiveness: c[1], completion: c[2], agency: c[3], coverage: c[4], strategic_depth: c[5],
        };
        let h = s.harmonic_mean();
        let min = c.iter().copied().fold(f64::INFINITY, f64::min);
        let max = c.iter().copied().fold(0.0, f64::max);
        let mean = c.iter().sum::<f64>() / 6.0;
        if min == 0.0 {
            prop_assert_eq!(h, 0.0);
        } else {
            prop_assert!(h >= min - 1e-12 && h <= max + 1e-12);
            prop_assert!(h <= mean + 1e-12);
            prop_assert!(h <= 6.0 * min + 1e-12);
        }
    }

    #[test]
    fn components_stay_in_unit_range(
        games in 1u32..200, a in 0u32..200, b in 0u32..200, t in 0u32..200,
        sw in 0u32..200, turns in 0u64..10_000, choice in 0u64..10_000, cov in 0.0f64..1.0,
    ) {
        let p1 = a % (games + 1);
        let p2 = b % (games - p1 + 1);
        let decisive = p1 + p2;
        let strong = sw % (decisive + 1);
        let stats = MatchStats {
            games,
            p1_wins: p1,
            p2_wins: p2,
            draws: games - decisive,
            truncated: t % (games - decisive + 1),
            strong_wins: strong,
            weak_wins: decisive - strong,
            turns,
            choice_turns: choice.min(turns),
            coverage_sum: cov * games as f64,
        };
        for x in stats.scores().components() {
            prop_assert!((0.0..=1.0).contains(&x), "{:?}", stats);
        }
    }
}
