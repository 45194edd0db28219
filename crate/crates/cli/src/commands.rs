//! Implementations behind the `ldx` subcommands. Everything here returns
//! values or writes to a supplied writer so it can be tested without a
//! process boundary.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use ldx_core::compiler::codec::Action;
use ldx_core::eval::{benchmark_throughput, evaluate_compiled, BenchConfig, GavelConfig, GavelReport, ThroughputRow};
use ldx_core::generator::{self, GenerationSummary, SamplerConfig};
use ldx_core::topology::Dir;
use ldx_core::{compile_str, corpus, CompileError, CompiledGame, GameState, Player};
use serde::Serialize;
use serde_json::{json, Value};

use crate::session::{rendering, MoveView, Seat};

/// A game program and the name it was loaded under.
pub struct Source {
    pub name: String,
    pub text: String,
}

/// Reads `path`; if no such file exists, falls back to a bundled game
/// named by the file stem (so `games/draughts.ldx` finds English draughts).
pub fn load_source(path: &Path) -> anyhow::Result<Source> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(Source { name: stem, text });
    }
    match corpus::source(&stem) {
        Some(text) => Ok(Source { name: stem, text: text.to_string() }),
        None => bail!("{}: no such file or bundled game", path.display()),
    }
}

/// Machine-readable description of a compile failure.
pub fn error_json(e: &CompileError) -> Value {
    let mut v = json!({ "kind": e.kind(), "message": e.to_string() });
    match e {
        CompileError::Parse(p) => {
            let (line, column) = p.position();
            v["line"] = json!(line);
            v["column"] = json!(column);
        }
        CompileError::Validation(r) => v["issues"] = json!(r.issues),
        _ => {}
    }
    v
}

pub fn info(game: &CompiledGame) -> Value {
    let topo = &game.topology;
    json!({
        "name": game.name,
        "board": topo.shape,
        "num_cells": topo.num_cells,
        "pieces": game.pieces,
        "action_space_size": game.codec.size,
        "codec": game.codec,
        "state_attributes": game.layout.attributes(),
        "layout": game.layout,
        "observation_planes": game.num_planes(),
        "phases": game.spec.phases.len(),
        "rendering": rendering(game),
    })
}

pub fn topology(game: &CompiledGame) -> Value {
    let topo = &game.topology;
    let dirs: Vec<&str> = topo.directions.iter().map(Dir::name).collect();
    let neighbors: Vec<Value> = (0..topo.num_cells)
        .map(|c| {
            let mut m = serde_json::Map::new();
            for d in topo.directions.iter() {
                if let Some(n) = topo.neighbor(c, d) {
                    m.insert(d.name().to_string(), json!(n));
                }
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "board": topo.shape,
        "num_cells": topo.num_cells,
        "rows": topo.rows,
        "width": topo.width,
        "directions": dirs,
        "row_of": topo.row_of,
        "col_of": topo.col_of,
        "corners": topo.corners.to_vec(),
        "center": topo.center.to_vec(),
        "edges": topo.edge_list().iter().map(|m| m.to_vec()).collect::<Vec<_>>(),
        "neighbors": neighbors,
    })
}

/// Cell numbers laid out like the board.
pub fn render_indices(game: &CompiledGame) -> String {
    let topo = &game.topology;
    let w = topo.num_cells.saturating_sub(1).to_string().len();
    let mut out = String::new();
    for r in 0..topo.rows {
        let cells: Vec<String> =
            (0..topo.width).filter_map(|c| topo.cell_at(r as i64, c as i64)).map(|c| format!("{c:>w$}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// ASCII board: `.` empty, the piece's initial upper-case for P1 and
/// lower-case for P2.
pub fn render_board(game: &CompiledGame, st: &GameState) -> String {
    game.topology.render(|c| match st.piece_at(c) {
        None => '.',
        Some((k, owner)) => {
            let ch = game.pieces[k].chars().next().unwrap_or('?');
            if owner == Player::P1 {
                ch.to_ascii_uppercase()
            } else {
                ch.to_ascii_lowercase()
            }
        }
    })
}

/// Parses a human move: an action index, `pass`, a cell, `source dest`,
/// or a direction name.
pub fn parse_move(game: &CompiledGame, line: &str) -> Option<u32> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let codec = &game.codec;
    match words.as_slice() {
        [w] if w.eq_ignore_ascii_case("pass") => codec.encode(Action::Pass),
        [w] if w.starts_with('#') => w[1..].parse().ok().filter(|&i: &u32| (i as usize) < codec.size),
        [w] => match w.parse::<usize>() {
            Ok(c) => codec.encode(Action::Place(c)),
            Err(_) => Dir::ALL.into_iter().find(|d| d.name() == *w).and_then(|d| codec.encode(Action::Direction(d))),
        },
        [s, d] => {
            let (s, d) = (s.parse().ok()?, d.parse().ok()?);
            if s == d {
                codec.encode(Action::Place(s))
            } else {
                codec.encode(Action::Move { source: s, dest: d })
            }
        }
        _ => None,
    }
}

fn describe(game: &CompiledGame, a: u32) -> String {
    let m = MoveView::decode(game, a);
    match m.kind {
        "pass" => "pass".into(),
        "place" => format!("{}", m.cell.unwrap_or_default()),
        "move" => format!("{} {}", m.source.unwrap_or_default(), m.dest.unwrap_or_default()),
        "direction" => m.direction.unwrap_or_default().into(),
        _ => format!("#{a}"),
    }
}

/// Runs one game in the terminal. Human seats read moves from `input`.
pub fn play(
    game: &CompiledGame,
    seats: [Seat; 2],
    seed: u64,
    max_turns: u32,
    input: &mut impl BufRead,
    out: &mut impl Write,
) -> anyhow::Result<GameState> {
    let mut st = game.initial_state();
    let mut ply = 0u64;
    writeln!(out, "{}\ncells:\n{}", game.name, render_indices(game))?;
    while !st.terminated {
        writeln!(out, "\n{}", render_board(game, &st))?;
        if let Some(s) = st.scores {
            writeln!(out, "scores: P1 {} P2 {}", s[0], s[1])?;
        }
        let legal = game.legal_actions(&st);
        let seat = seats[st.mover.index()];
        let action = match seat.agent(seed, ply) {
            Some(mut agent) => {
                let a = agent.select(game, &st);
                writeln!(out, "{:?} ({seat}) plays {}", st.mover, describe(game, a))?;
                a
            }
            None => loop {
                let moves: Vec<String> = legal.iter().map(|&a| describe(game, a)).collect();
                writeln!(out, "{:?} to move. legal: {}", st.mover, moves.join(", "))?;
                write!(out, "> ")?;
                out.flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 {
                    bail!("input ended before the game finished");
                }
                match parse_move(game, &line) {
                    Some(a) if legal.contains(&a) => break a,
                    _ => writeln!(out, "not a legal move: {}", line.trim())?,
                }
            },
        };
        game.step_capped(&mut st, action, max_turns)?;
        ply += 1;
    }
    writeln!(out, "\n{}", render_board(game, &st))?;
    let o = st.outcome.expect("terminated games have an outcome");
    match o.winner() {
        Some(p) => writeln!(out, "{p:?} wins after {} moves", st.move_count)?,
        None if o.truncated => writeln!(out, "draw (move limit reached)")?,
        None => writeln!(out, "draw")?,
    }
    Ok(st)
}

pub fn bench(games: &[(String, Arc<CompiledGame>)], cfg: &BenchConfig) -> Vec<ThroughputRow> {
    games.iter().flat_map(|(_, g)| benchmark_throughput(g, cfg)).collect()
}

pub fn bench_csv(rows: &[ThroughputRow]) -> String {
    let mut s = format!("{}\n", ThroughputRow::CSV_HEADER);
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// One TSV per game: `batch_size  mean  std`.
pub fn bench_tsv(rows: &[ThroughputRow], game: &str) -> String {
    let mut s = String::from("batch_size\tsteps_per_sec_mean\tsteps_per_sec_std\n");
    for r in rows.iter().filter(|r| r.game == game) {
        s.push_str(&r.tsv_row());
        s.push('\n');
    }
    s
}

pub fn gavel(sources: &[Source], cfg: &GavelConfig) -> Vec<GavelReport> {
    sources
        .iter()
        .map(|s| match compile_str(&s.text) {
            Ok(g) => evaluate_compiled(&g, cfg),
            Err(e) => GavelReport {
                name: s.name.clone(),
                playable: false,
                error: Some(e.to_string()),
                scores: None,
                gavel_score: 0.0,
                interesting: false,
                stats: None,
            },
        })
        .collect()
}

pub fn gavel_csv(reports: &[GavelReport]) -> String {
    let mut s = format!("{}\n", GavelReport::CSV_HEADER);
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub nesting_depth: u32,
    pub parses: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<GavelReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub count: usize,
    pub seed: u64,
    pub sampler: SamplerConfig,
    pub games: Vec<ManifestEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<GenerationSummary>,
}

/// Samples `count` programs into `dir` as `gen_NNNN.ldx` and writes
/// `manifest.json`. With `evaluate`, every sample is scored too.
pub fn generate(
    dir: &Path,
    count: usize,
    seed: u64,
    sampler: &SamplerConfig,
    evaluate: Option<&GavelConfig>,
) -> anyhow::Result<Manifest> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let texts = generator::sample_games(sampler, count, seed);
    let reports = evaluate.map(|cfg| generator::evaluate_samples(&texts, cfg));
    let width = count.saturating_sub(1).to_string().len().max(4);
    let mut games = Vec::with_capacity(count);
    for (i, text) in texts.iter().enumerate() {
        let file = format!("gen_{i:0width$}.ldx");
        std::fs::write(dir.join(&file), text)?;
        games.push(ManifestEntry {
            file,
            nesting_depth: generator::nesting_depth(text),
            parses: ldx_core::dsl::parse_game(text).is_ok(),
            report: reports.as_ref().map(|r| r[i].clone()),
        });
    }
    let summary = reports.as_ref().map(|r| generator::summarize(&texts, r));
    let manifest = Manifest { count, seed, sampler: *sampler, games, summary };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn expand_paths(paths: &[PathBuf]) -> anyhow::Result<Vec<Source>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "ldx"))
                .collect();
            files.sort();
            for f in files {
                out.push(load_source(&f)?);
            }
        } else {
            out.push(load_source(p)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn human_moves_parse() {
        let ttt = corpus::load("tic_tac_toe").unwrap();
        assert_eq!(parse_move(&ttt, "4"), Some(4));
        assert_eq!(parse_move(&ttt, "#8"), Some(8));
        assert_eq!(parse_move(&ttt, "9"), None);
        let d = corpus::load("draughts").unwrap();
        assert_eq!(parse_move(&d, "40 33"), Some(40 * 64 + 33));
        assert_eq!(parse_move(&d, "pass"), None);
    }

    #[test]
    fn missing_files_fall_back_to_bundled_games() {
        let s = load_source(Path::new("no/such/dir/draughts.ldx")).unwrap();
        assert_eq!(s.text, corpus::source("english_draughts").unwrap());
        assert!(load_source(Path::new("no/such/nonsense.ldx")).is_err());
    }
}
