//! Uniform random sampling of game programs straight from the language
//! grammar.
//!
//! The grammar is kept as data (`grammar.lark`) and loaded into a small
//! expression tree. Sampling walks it from the root rule, picking uniformly
//! among alternatives. Once the number of open parentheses reaches
//! `max_depth`, every choice is resolved toward the expansion that closes
//! soonest: optional parts are dropped, repetitions stop at their minimum
//! and alternatives are restricted to the shallowest ones.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng as _;
use serde::Serialize;

use crate::dsl::parse_game;
use crate::engine::rng::{stream, Rng};
use crate::eval::gavel::{evaluate_game, median_std, GavelConfig, GavelReport};
use crate::topology::{BoardShape, Topology};

pub const GRAMMAR: &str = include_str!("grammar.lark");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Seq(Vec<Expr>),
    Alt(Vec<Expr>),
    Lit(String),
    /// Uppercase terminal such as `UP` or `P1`.
    Term(String),
    Rule(String),
    Opt(Box<Expr>),
    Plus(Box<Expr>),
    Star(Box<Expr>),
    Regex(String),
}

#[derive(Debug, Clone)]
pub struct Grammar {
    pub rules: HashMap<String, Expr>,
    /// Smallest parenthesis nesting each rule can expand to.
    min_depth: HashMap<String, u32>,
}

fn tokenize(body: &str) -> Vec<String> {
    let chars: Vec<char> = body.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' || c == '/' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i] != c {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            out.push(chars[start..i.min(chars.len())].iter().collect());
        } else if "()|?+*".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if i == start {
                i += 1;
                continue;
            }
            out.push(chars[start..i].iter().collect());
        }
    }
    out
}

struct ExprParser {
    toks: Vec<String>,
    at: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.at).map(String::as_str)
    }

    fn alt(&mut self) -> Expr {
        let mut alts = vec![self.seq()];
        while self.peek() == Some("|") {
            self.at += 1;
            alts.push(self.seq());
        }
        if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            Expr::Alt(alts)
        }
    }

    fn seq(&mut self) -> Expr {
        let mut items = Vec::new();
        while let Some(t) = self.peek() {
            if t == "|" || t == ")" {
                break;
            }
            let mut item = self.atom();
            while let Some(op) = self.peek() {
                item = match op {
                    "?" => Expr::Opt(Box::new(item)),
                    "+" => Expr::Plus(Box::new(item)),
                    "*" => Expr::Star(Box::new(item)),
                    _ => break,
                };
                self.at += 1;
            }
            items.push(item);
        }
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr::Seq(items)
        }
    }

    fn atom(&mut self) -> Expr {
        let t = self.toks[self.at].clone();
        self.at += 1;
        if t == "(" {
            let e = self.alt();
            self.at += 1;
            return e;
        }
        if let Some(s) = t.strip_prefix('"') {
            return Expr::Lit(s.trim_end_matches('"').to_string());
        }
        if let Some(s) = t.strip_prefix('/') {
            return Expr::Regex(s.trim_end_matches('/').to_string());
        }
        if t.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
            Expr::Term(t)
        } else {
            Expr::Rule(t)
        }
    }
}

impl Grammar {
    pub fn parse(text: &str) -> Grammar {
        let mut bodies: Vec<(String, String)> = Vec::new();
        for line in text.lines() {
            let line = match line.find("//") {
                Some(i) if !line[..i].contains('"') || line[..i].matches('"').count() % 2 == 0 => &line[..i],
                _ => line,
            };
            if line.trim().is_empty() {
                continue;
            }
            let head = line.split(':').next().unwrap_or("");
            let is_rule = !line.starts_with(char::is_whitespace)
                && line.contains(':')
                && head.trim_start_matches('?').chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if is_rule {
                let name = head.trim_start_matches('?').to_string();
                bodies.push((name, line[head.len() + 1..].to_string()));
            } else if let Some(last) = bodies.last_mut() {
                last.1.push(' ');
                last.1.push_str(line);
            }
        }
        let rules: HashMap<String, Expr> = bodies
            .into_iter()
            .map(|(name, body)| (name, ExprParser { toks: tokenize(&body), at: 0 }.alt()))
            .collect();
        let mut g = Grammar { rules, min_depth: HashMap::new() };
        g.compute_min_depth();
        g
    }

    /// The bundled language grammar.
    pub fn bundled() -> &'static Grammar {
        static G: OnceLock<Grammar> = OnceLock::new();
        G.get_or_init(|| Grammar::parse(GRAMMAR))
    }

    fn compute_min_depth(&mut self) {
        let names: Vec<String> = self.rules.keys().cloned().collect();
        loop {
            let mut changed = false;
            for n in &names {
                let d = self.expr_depth(&self.rules[n]);
                if d < self.min_depth.get(n).copied().unwrap_or(u32::MAX) {
                    self.min_depth.insert(n.clone(), d);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Minimal nesting an expression needs; `u32::MAX` while unknown.
    pub fn expr_depth(&self, e: &Expr) -> u32 {
        match e {
            Expr::Lit(s) if s == "(" => 1,
            Expr::Lit(_) | Expr::Term(_) | Expr::Regex(_) | Expr::Opt(_) | Expr::Star(_) => 0,
            Expr::Rule(r) => self.min_depth.get(r).copied().unwrap_or(u32::MAX),
            Expr::Plus(e) => self.expr_depth(e),
            Expr::Alt(v) => v.iter().map(|e| self.expr_depth(e)).min().unwrap_or(0),
            Expr::Seq(v) => {
                let mut open = 0u32;
                let mut best = 0u32;
                for item in v {
                    match item {
                        Expr::Lit(s) if s == "(" => {
                            open += 1;
                            best = best.max(open);
                        }
                        Expr::Lit(s) if s == ")" => open = open.saturating_sub(1),
                        e => {
                            let d = self.expr_depth(e);
                            if d == u32::MAX {
                                return u32::MAX;
                            }
                            best = best.max(open + d);
                        }
                    }
                }
                best
            }
        }
    }

    /// Deepest forced expansion of any rule.
    pub fn max_min_depth(&self) -> u32 {
        self.min_depth.values().copied().filter(|d| *d != u32::MAX).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub max_depth: u32,
    pub min_board: u64,
    pub max_board: u64,
    pub min_line: u64,
    pub max_line: u64,
    /// Chance of taking an optional part or repeating once more.
    pub continue_prob: f64,
    /// Upper bound on items produced by one repetition.
    pub max_repeat: u32,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { max_depth: 5, min_board: 3, max_board: 19, min_line: 2, max_line: 6, continue_prob: 0.5, max_repeat: 4 }
    }
}

struct Board {
    cells: u64,
    rows: u64,
    width: u64,
}

struct Sampler<'a> {
    g: &'a Grammar,
    cfg: &'a SamplerConfig,
    rng: &'a mut Rng,
    out: Vec<String>,
    depth: u32,
    stack: Vec<&'a str>,
    pieces: Vec<String>,
    regions: Vec<String>,
    board: Option<Board>,
}

impl<'a> Sampler<'a> {
    fn forced(&self) -> bool {
        self.depth >= self.cfg.max_depth
    }

    fn within(&self, rule: &str) -> bool {
        self.stack.contains(&rule)
    }

    fn parent(&self) -> &str {
        self.stack.iter().rev().nth(1).copied().unwrap_or("")
    }

    fn emit(&mut self, s: impl Into<String>) {
        self.out.push(s.into());
    }

    fn int(&mut self, lo: u64, hi: u64) -> u64 {
        self.rng.random_range(lo..=hi.max(lo))
    }

    fn expand(&mut self, e: &'a Expr) {
        match e {
            Expr::Lit(s) => {
                if s == "(" {
                    self.depth += 1;
                } else if s == ")" {
                    self.depth = self.depth.saturating_sub(1);
                }
                self.emit(s.clone());
            }
            Expr::Term(t) => {
                let text = match t.as_str() {
                    "P1" | "P2" => t.clone(),
                    "STRING" => format!("\"s{}\"", self.int(0, 9)),
                    _ => t.to_ascii_lowercase(),
                };
                self.emit(text);
            }
            Expr::Regex(_) => {
                let n = self.int(0, 9);
                self.emit(n.to_string());
            }
            Expr::Rule(r) => self.rule(r),
            Expr::Seq(v) => v.iter().for_each(|e| self.expand(e)),
            Expr::Alt(v) => {
                let choice = if self.forced() {
                    let depths: Vec<u32> = v.iter().map(|e| self.g.expr_depth(e)).collect();
                    let min = *depths.iter().min().unwrap();
                    let shallow: Vec<usize> = (0..v.len()).filter(|&i| depths[i] == min).collect();
                    shallow[self.rng.random_range(0..shallow.len())]
                } else {
                    self.rng.random_range(0..v.len())
                };
                self.expand(&v[choice]);
            }
            Expr::Opt(e) => {
                if !self.forced() && self.rng.random_bool(self.cfg.continue_prob) {
                    self.expand(e);
                }
            }
            Expr::Plus(e) => self.repeat(e, 1),
            Expr::Star(e) => self.repeat(e, 0),
        }
    }

    fn repeat(&mut self, e: &'a Expr, min: u32) {
        let mut n = min;
        if !self.forced() {
            while n < self.cfg.max_repeat && self.rng.random_bool(self.cfg.continue_prob) {
                n += 1;
            }
        }
        for _ in 0..n {
            self.expand(e);
        }
    }

    fn shape(&mut self, kind: &str, small: bool) -> BoardShape {
        let (lo, hi) = if small { (1, 4) } else { (self.cfg.min_board, self.cfg.max_board) };
        match kind {
            "hexagon_shape" => {
                let d = self.int(lo / 2, hi.saturating_sub(1) / 2) * 2 + 1;
                BoardShape::Hexagon(d.max(1))
            }
            "square_shape" => BoardShape::Square(self.int(lo, hi)),
            "rectangle_shape" => BoardShape::Rectangle(self.int(lo, hi), self.int(lo, hi)),
            _ => BoardShape::HexRectangle(self.int(lo, hi), self.int(lo, hi)),
        }
    }

    fn emit_shape(&mut self, shape: BoardShape) {
        let parts = match shape {
            BoardShape::Square(n) => vec!["square".to_string(), n.to_string()],
            BoardShape::Rectangle(r, c) => vec!["rectangle".into(), r.to_string(), c.to_string()],
            BoardShape::Hexagon(d) => vec!["hexagon".into(), d.to_string()],
            BoardShape::HexRectangle(r, c) => vec!["hex_rectangle".into(), r.to_string(), c.to_string()],
        };
        self.emit("(");
        self.out.extend(parts);
        self.emit(")");
    }

    fn integer(&mut self, rule: &str) -> u64 {
        let board = self.board.as_ref().map_or((9, 3, 3), |b| (b.cells, b.rows, b.width));
        let parent = self.parent().to_string();
        match (rule, parent.as_str()) {
            (_, "function_line") => self.int(self.cfg.min_line, self.cfg.max_line),
            (_, "custodial_length_arg") => self.int(1, 4),
            (_, "distance_arg") => self.int(1, 5),
            (_, "priority_arg") => self.int(0, 2),
            (_, "pattern_arg") => self.int(1, 4),
            (_, "mask_row") => self.int(0, board.1 - 1),
            (_, "mask_column") => self.int(0, board.2 - 1),
            (_, "indices_arg") if self.within("pattern_arg") => self.int(0, 15),
            (_, "indices_arg") => self.int(0, board.0 - 1),
            ("positive_int", _) => self.int(1, 10),
            _ => self.int(0, 9),
        }
    }

    fn fresh(list: &mut Vec<String>, prefix: &str) -> String {
        let name = format!("{prefix}{}", list.len());
        list.push(name.clone());
        name
    }

    fn pick(&mut self, pieces: bool, prefix: &str) -> String {
        let list = if pieces { &self.pieces } else { &self.regions };
        if list.is_empty() {
            format!("{prefix}0")
        } else {
            list[self.rng.random_range(0..list.len())].clone()
        }
    }

    fn rule(&mut self, r: &'a str) {
        self.stack.push(r);
        let parent = self.parent().to_string();
        match r {
            "board" => {
                let kinds = ["square_shape", "rectangle_shape", "hexagon_shape", "hex_rectangle_shape"];
                let kind = kinds[self.rng.random_range(0..kinds.len())];
                let shape = self.shape(kind, false);
                if let Ok(t) = Topology::new(shape) {
                    self.board = Some(Board { cells: t.num_cells as u64, rows: t.rows as u64, width: t.width as u64 });
                }
                self.emit("(");
                self.emit("board");
                self.emit_shape(shape);
                self.emit(")");
            }
            "square_shape" | "rectangle_shape" | "hexagon_shape" | "hex_rectangle_shape" => {
                let shape = self.shape(r, true);
                self.emit_shape(shape);
            }
            "positive_int" | "nonnegative_int" | "odd_int" => {
                let n = self.integer(r);
                self.emit(n.to_string());
            }
            "name" => {
                let text = match parent.as_str() {
                    "game" => "generated".to_string(),
                    "piece_definition" => Self::fresh(&mut self.pieces, "piece"),
                    "region_definition" => Self::fresh(&mut self.regions, "region"),
                    "piece_reference" => self.pick(true, "piece"),
                    "region_reference" => self.pick(false, "region"),
                    _ => "name".to_string(),
                };
                self.emit(format!("\"{text}\""));
            }
            _ => match self.g.rules.get(r) {
                Some(e) => self.expand(e),
                None => self.emit(r.to_string()),
            },
        }
        self.stack.pop();
    }
}

fn join_tokens(tokens: &[String]) -> String {
    let mut s = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 && t != ")" && tokens[i - 1] != "(" {
            s.push(' ');
        }
        s.push_str(t);
    }
    s
}

/// Samples one game program from `root` (normally `game`).
pub fn sample_rule(grammar: &Grammar, root: &str, cfg: &SamplerConfig, rng: &mut Rng) -> String {
    let mut s = Sampler {
        g: grammar,
        cfg,
        rng,
        out: Vec::new(),
        depth: 0,
        stack: Vec::new(),
        pieces: Vec::new(),
        regions: Vec::new(),
        board: None,
    };
    s.rule(grammar.rules.get_key_value(root).map_or(root, |(k, _)| k.as_str()));
    join_tokens(&s.out)
}

pub fn sample_game(cfg: &SamplerConfig, rng: &mut Rng) -> String {
    sample_rule(Grammar::bundled(), "game", cfg, rng)
}

/// `count` programs; sample `i` uses stream `(seed, i)`.
pub fn sample_games(cfg: &SamplerConfig, count: usize, seed: u64) -> Vec<String> {
    (0..count as u64).map(|i| sample_game(cfg, &mut stream(seed, i))).collect()
}

/// Largest parenthesis nesting in a program text.
pub fn nesting_depth(text: &str) -> u32 {
    let (mut d, mut best) = (0i64, 0i64);
    for c in text.chars() {
        match c {
            '(' => {
                d += 1;
                best = best.max(d);
            }
            ')' => d -= 1,
            _ => {}
        }
    }
    best as u32
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationSummary {
    pub samples: usize,
    pub parsed: usize,
    pub playable: usize,
    pub interesting: usize,
    pub playable_pct: f64,
    pub interesting_pct: f64,
    pub gavel_median: f64,
    pub gavel_std: f64,
    pub depth_median: f64,
    pub depth_std: f64,
}

impl GenerationSummary {
    pub const CSV_HEADER: &'static str = "samples,parsed,playable_pct,interesting_pct,gavel_median,gavel_std,strategic_depth_median,strategic_depth_std";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.2},{:.2},{:.4},{:.4},{:.4},{:.4}",
            self.samples,
            self.parsed,
            self.playable_pct,
            self.interesting_pct,
            self.gavel_median,
            self.gavel_std,
            self.depth_median,
            self.depth_std
        )
    }
}

/// Aggregates per-sample reports. Medians are taken over playable samples.
pub fn summarize(texts: &[String], reports: &[GavelReport]) -> GenerationSummary {
    let parsed = texts.iter().filter(|t| parse_game(t).is_ok()).count();
    let playable: Vec<&GavelReport> = reports.iter().filter(|r| r.playable).collect();
    let interesting = reports.iter().filter(|r| r.interesting).count();
    let pct = |k: usize| if reports.is_empty() { 0.0 } else { 100.0 * k as f64 / reports.len() as f64 };
    let (gavel_median, gavel_std) = median_std(&playable.iter().map(|r| r.gavel_score).collect::<Vec<_>>());
    let depths: Vec<f64> = playable.iter().filter_map(|r| r.scores.map(|s| s.strategic_depth)).collect();
    let (depth_median, depth_std) = median_std(&depths);
    GenerationSummary {
        samples: texts.len(),
        parsed,
        playable: playable.len(),
        interesting,
        playable_pct: pct(playable.len()),
        interesting_pct: pct(interesting),
        gavel_median,
        gavel_std,
        depth_median,
        depth_std,
    }
}

/// Evaluates every sample with the quality heuristics.
pub fn evaluate_samples(texts: &[String], cfg: &GavelConfig) -> Vec<GavelReport> {
    texts.iter().map(|t| evaluate_game(t, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn referenced(e: &Expr, out: &mut Vec<String>) {
        match e {
            Expr::Rule(r) => out.push(r.clone()),
            Expr::Seq(v) | Expr::Alt(v) => v.iter().for_each(|e| referenced(e, out)),
            Expr::Opt(e) | Expr::Plus(e) | Expr::Star(e) => referenced(e, out),
            _ => {}
        }
    }

    #[test]
    fn grammar_rules_resolve() {
        let g = Grammar::bundled();
        assert!(g.rules.contains_key("game"));
        let mut refs = Vec::new();
        g.rules.values().for_each(|e| referenced(e, &mut refs));
        for r in refs {
            assert!(g.rules.contains_key(&r), "undefined rule {r}");
        }
        assert_eq!(g.min_depth["game"], g.expr_depth(&g.rules["game"]));
        assert!(g.min_depth.values().all(|d| *d != u32::MAX));
    }

    #[test]
    fn loader_handles_alternatives_and_suffixes() {
        let g = Grammar::parse("a: \"(\" \"x\" b+ c? \")\"\n?b: B | \"y\"\n   | c\nc: \"z\" // trailing comment\n");
        assert_eq!(g.rules.len(), 3);
        match &g.rules["b"] {
            Expr::Alt(v) => assert_eq!(v.len(), 3),
            e => panic!("{e:?}"),
        }
        assert_eq!(g.min_depth["a"], 1);
    }

    #[test]
    fn samples_are_deterministic_per_seed() {
        let cfg = SamplerConfig::default();
        assert_eq!(sample_games(&cfg, 5, 3), sample_games(&cfg, 5, 3));
        assert_ne!(sample_games(&cfg, 5, 3), sample_games(&cfg, 5, 4));
    }

    #[test]
    fn depth_limit_bounds_nesting() {
        let g = Grammar::bundled();
        for max_depth in 1..8 {
            let cfg = SamplerConfig { max_depth, ..Default::default() };
            for t in sample_games(&cfg, 30, max_depth as u64) {
                assert!(nesting_depth(&t) <= max_depth + g.max_min_depth(), "{t}");
            }
        }
    }

    #[test]
    fn empty_summary() {
        let s = summarize(&[], &[]);
        assert_eq!((s.samples, s.playable, s.interesting), (0, 0, 0));
        assert_eq!(s.playable_pct, 0.0);
    }
}
