use std::path::Path;
use std::process::{Command, Output};

use ldx_cli::commands;
use ldx_cli::session::Seat;
use ldx_core::corpus;
use serde_json::Value;

fn ldx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldx")).args(args).output().unwrap()
}

fn games_dir() -> String {
    format!("{}/../../games", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn validate_accepts_the_corpus() {
    for (name, _) in corpus::GAMES {
        let out = ldx(&["validate", &format!("{}/{name}.ldx", games_dir())]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn validate_reports_syntax_errors_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ldx");
    std::fs::write(&path, "(game \"bad\"\n  (players 2)\n  (equipment (board (square 3)")
        .unwrap();
    let out = ldx(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("SyntaxError"), "{err}");

    let out = ldx(&["--json", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["v"], 1);
    assert_eq!(v["error"]["kind"], "SyntaxError");
    assert_eq!(v["error"]["line"], 3);
    assert!(v["error"]["column"].as_u64().unwrap() > 0);
}

#[test]
fn info_describes_draughts() {
    let out = ldx(&["info", "games/draughts.ldx"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["action_space_size"], 4096);
    assert_eq!(v["pieces"], serde_json::json!(["pawn", "king"]));
    assert_eq!(v["codec"]["kind"], "movement");
    assert_eq!(v["num_cells"], 64);
    assert_eq!(v["observation_planes"], 5);
    assert!(v["state_attributes"].as_array().unwrap().iter().any(|a| a == "must_move"));
}

#[test]
fn info_of_tic_tac_toe_has_no_optional_state() {
    let out = ldx(&["info", &format!("{}/tic_tac_toe.ldx", games_dir())]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["action_space_size"], 9);
    assert_eq!(v["state_attributes"], serde_json::json!([]));
}

#[test]
fn topology_lists_neighbours() {
    let out = ldx(&["topology", "hex.ldx"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["num_cells"], 121);
    assert_eq!(v["directions"].as_array().unwrap().len(), 6);
    // Corner cell 0 of an 11x11 rhombus touches two or three cells.
    let n0 = v["neighbors"][0].as_object().unwrap().len();
    assert!((2..=3).contains(&n0));
    assert!(v["neighbors"].as_array().unwrap().iter().all(|n| n.as_object().unwrap().len() <= 6));
}

#[test]
fn missing_files_fail_cleanly() {
    let out = ldx(&["--json", "info", "does/not/exist.ldx"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "Error");
}

#[test]
fn bench_prints_csv_and_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ldx(&[
        "bench",
        "tic_tac_toe.ldx",
        "--batch-sizes",
        "1,4",
        "--episodes",
        "20",
        "--warmup",
        "2",
        "--tsv-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "game,batch_size,steps_per_sec_mean,steps_per_sec_std,episodes");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains(",1,") && lines[2].contains(",4,"));
    let tsv = std::fs::read_to_string(dir.path().join("Tic-Tac-Toe.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 3);
}

#[test]
fn gavel_prints_one_row_per_game() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.ldx"), "(game").unwrap();
    let ttt = format!("{}/tic_tac_toe.ldx", games_dir());
    let out = ldx(&["gavel", &ttt, dir.path().to_str().unwrap(), "--games", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let cols = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == cols));
    assert!(lines[1].contains(",true,"));
    assert!(lines[2].starts_with("broken,false,"));
}

#[test]
fn generate_writes_programs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("gen");
    let out = ldx(&["generate", "--count", "12", "--seed", "3", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    let games = manifest["games"].as_array().unwrap();
    assert_eq!(games.len(), 12);
    for g in games {
        let text = std::fs::read_to_string(out_dir.join(g["file"].as_str().unwrap())).unwrap();
        assert_eq!(g["nesting_depth"].as_u64().unwrap() as u32, ldx_core::generator::nesting_depth(&text));
        assert!(g["parses"].as_bool().unwrap());
    }
    assert!(manifest.get("summary").is_none());

    // Same seed, same programs.
    let again = dir.path().join("again");
    ldx(&["generate", "--count", "12", "--seed", "3", "--out", again.to_str().unwrap()]);
    for g in games {
        let f = g["file"].as_str().unwrap();
        assert_eq!(std::fs::read(out_dir.join(f)).unwrap(), std::fs::read(again.join(f)).unwrap());
    }
}

#[test]
fn generate_with_evaluation_reports_an_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let sampler = ldx_core::generator::SamplerConfig::default();
    let gavel = ldx_core::eval::GavelConfig { games: 4, ..Default::default() };
    let m = commands::generate(dir.path(), 6, 1, &sampler, Some(&gavel)).unwrap();
    let s = m.summary.unwrap();
    assert_eq!(s.samples, 6);
    assert!(s.playable >= s.interesting);
    assert!(m.games.iter().all(|g| g.report.is_some()));
}

#[test]
fn scripted_human_game_reaches_a_result() {
    let game = commands::load_source(Path::new("tic_tac_toe")).unwrap();
    let game = ldx_core::compile_str(&game.text).unwrap();
    // P1 takes the top row while P2 (random) fills in; bad input is re-prompted.
    let mut input = "banana\n0\n1\n2\n3\n4\n5\n6\n7\n8\n".as_bytes();
    let mut out = Vec::new();
    let st = commands::play(&game, [Seat::Human, Seat::Random], 2, 200, &mut input, &mut out);
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("not a legal move: banana"));
    let st = st.unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert!(st.terminated);
    assert!(text.contains("wins") || text.contains("draw"));
}

#[test]
fn agent_only_game_is_reproducible() {
    let game = corpus::load("connect_four").unwrap();
    let run = || {
        let mut out = Vec::new();
        commands::play(&game, [Seat::Mcts(10), Seat::Random], 8, 200, &mut "".as_bytes(), &mut out).unwrap();
        String::from_utf8(out).unwrap()
    };
    assert_eq!(run(), run());
}
