use ldx_core::dsl::parse_game;
use ldx_core::eval::gavel::{GavelConfig, GavelReport};
use ldx_core::generator::{evaluate_samples, nesting_depth, sample_games, summarize, Grammar, SamplerConfig};

#[test]
fn thousands_of_samples_all_parse() {
    let cfg = SamplerConfig::default();
    let texts = sample_games(&cfg, 2000, 17);
    for t in &texts {
        if let Err(e) = parse_game(t) {
            panic!("{e}\n{t}");
        }
        assert!(nesting_depth(t) <= cfg.max_depth + Grammar::bundled().max_min_depth());
    }
}

#[test]
fn deeper_limits_still_parse() {
    for max_depth in [1, 3, 8] {
        let cfg = SamplerConfig { max_depth, ..Default::default() };
        for t in sample_games(&cfg, 200, max_depth as u64) {
            assert!(parse_game(&t).is_ok(), "{t}");
        }
    }
}

#[test]
fn fixed_seed_gives_identical_text() {
    let cfg = SamplerConfig::default();
    assert_eq!(sample_games(&cfg, 50, 5), sample_games(&cfg, 50, 5));
}

#[test]
fn piece_references_come_from_declarations() {
    for t in sample_games(&SamplerConfig::default(), 300, 9) {
        let spec = parse_game(&t).unwrap();
        let declared: Vec<&str> = spec.equipment.pieces.iter().map(|p| p.name.as_str()).collect();
        for s in &spec.start {
            assert!(declared.contains(&s.piece.as_str()), "{t}");
        }
    }
}

#[test]
fn aggregate_respects_playable_ge_interesting() {
    let texts = sample_games(&SamplerConfig::default(), 40, 3);
    let cfg = GavelConfig { games: 6, strong_iterations: 20, weak_iterations: 10, ..Default::default() };
    let reports = evaluate_samples(&texts, &cfg);
    let s = summarize(&texts, &reports);
    assert_eq!(s.samples, 40);
    assert_eq!(s.parsed, 40);
    assert!(s.interesting <= s.playable);
    assert!(s.playable_pct <= 100.0);
    for r in &reports {
        assert!(!r.interesting || r.playable);
        if let Some(sc) = r.scores {
            assert!(sc.components().iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }
}

#[test]
fn corpus_aggregate_is_fully_playable() {
    let texts: Vec<String> = ldx_core::corpus::BOARD_GAMES
        .iter()
        .map(|n| ldx_core::corpus::source(n).unwrap().to_string())
        .collect();
    let cfg = GavelConfig { games: 2, strong_iterations: 5, weak_iterations: 2, ..Default::default() };
    let reports: Vec<GavelReport> = evaluate_samples(&texts, &cfg);
    let s = summarize(&texts, &reports);
    assert_eq!(s.playable_pct, 100.0);
}

#[test]
fn empty_batch_gives_empty_table() {
    let texts = sample_games(&SamplerConfig::default(), 0, 1);
    let reports = evaluate_samples(&texts, &GavelConfig::default());
    let s = summarize(&texts, &reports);
    assert!(reports.is_empty());
    assert_eq!((s.samples, s.playable, s.interesting), (0, 0, 0));
}
