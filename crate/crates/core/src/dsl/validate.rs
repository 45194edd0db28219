//! Semantic checks that need the board: reference resolution, index
//! bounds, and constructs that make no sense for the declared geometry.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::ast::*;
use super::keywords::direction_str;
use crate::topology::{BoardShape, Edge, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", issue.path, issue.message)?;
        }
        Ok(())
    }
}

struct Checker<'a> {
    topo: &'a Topology,
    spec: &'a GameSpec,
    pieces: HashSet<&'a str>,
    regions: HashSet<&'a str>,
    issues: Vec<Issue>,
}

/// Checks `spec` against the board built from its own shape.
pub fn validate(spec: &GameSpec, topo: &Topology) -> ValidationReport {
    let mut c = Checker { topo, spec, pieces: HashSet::new(), regions: HashSet::new(), issues: Vec::new() };
    c.run();
    ValidationReport { issues: c.issues }
}

impl<'a> Checker<'a> {
    fn issue(&mut self, path: &str, message: impl Into<String>) {
        self.issues.push(Issue { path: path.to_string(), message: message.into() });
    }

    fn run(&mut self) {
        let spec = self.spec;
        if spec.players.count != 2 {
            self.issue("players", format!("only two-player games are supported, found {}", spec.players.count));
        }
        if spec.equipment.board != self.topo.shape {
            self.issue("equipment.board", "topology does not match the declared board");
        }
        for (i, p) in spec.equipment.pieces.iter().enumerate() {
            if !self.pieces.insert(&p.name) {
                self.issue(&format!("equipment.pieces[{i}]"), format!("duplicate piece \"{}\"", p.name));
            }
        }
        for (i, r) in spec.equipment.regions.iter().enumerate() {
            if !self.regions.insert(&r.name) {
                self.issue(&format!("equipment.regions[{i}]"), format!("duplicate region \"{}\"", r.name));
            }
        }
        for (i, r) in spec.equipment.regions.iter().enumerate() {
            self.cell_set(&format!("equipment.regions[{i}]"), &r.cells);
        }
        for (i, s) in spec.start.iter().enumerate() {
            let path = format!("rules.start[{i}]");
            self.piece(&path, &s.piece);
            self.cell_set(&path, &s.cells);
        }
        for (i, phase) in spec.phases.iter().enumerate() {
            let path = format!("rules.play[{i}]");
            if phase.order.is_empty() {
                self.issue(&path, "empty mover order");
            }
            self.mechanic(&path, &phase.mechanic);
        }
        if spec.end_rules.is_empty() {
            self.issue("rules.end", "at least one end rule is required");
        }
        for (i, r) in spec.end_rules.iter().enumerate() {
            self.predicate(&format!("rules.end[{i}]"), &r.condition);
        }
        for (i, d) in spec.rendering.iter().enumerate() {
            if let RenderingDetail::Shape(p, _) = d {
                self.piece(&format!("rendering[{i}]"), p);
            }
        }
    }

    fn piece(&mut self, path: &str, name: &str) {
        if !self.pieces.contains(name) {
            self.issue(path, format!("unknown piece \"{name}\""));
        }
    }

    fn index(&mut self, path: &str, i: u64) {
        if i >= self.topo.num_cells as u64 {
            self.issue(path, format!("index {i} out of range (board has {} cells)", self.topo.num_cells));
        }
    }

    fn cell_set(&mut self, path: &str, c: &CellSet) {
        match c {
            CellSet::Indices(v) => {
                for &i in v {
                    self.index(path, i);
                }
            }
            CellSet::Masks(m) => self.multi_mask(path, m),
        }
    }

    fn multi_mask(&mut self, path: &str, m: &MultiMask) {
        match m {
            MultiMask::Corners | MultiMask::Edges | MultiMask::EdgesNoCorners => {}
            MultiMask::Single(m) => self.mask(path, m),
            MultiMask::List(v) => {
                for (i, m) in v.iter().enumerate() {
                    self.mask(&format!("{path}[{i}]"), m);
                }
            }
        }
    }

    fn facing_available(&self) -> bool {
        self.spec.players.forward.is_some()
    }

    fn direction(&mut self, path: &str, d: &DirectionArg) {
        for &kw in d.keywords() {
            if kw.is_relative() && !self.facing_available() {
                self.issue(path, format!("relative direction `{}` needs set_forward", direction_str(kw)));
                return;
            }
        }
        let facings: Vec<Option<Facing>> = match self.spec.players.forward {
            Some(f) => f.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        for f in facings {
            match self.topo.resolve_directions(d.keywords(), f) {
                Ok(set) if set.is_empty() => {
                    let names: Vec<&str> = d.keywords().iter().map(|k| direction_str(*k)).collect();
                    self.issue(path, format!("direction `{}` has no meaning on this board", names.join(" ")));
                    return;
                }
                Ok(_) => {}
                Err(e) => {
                    self.issue(path, e.to_string());
                    return;
                }
            }
        }
    }

    fn orientation(&mut self, path: &str, o: Option<Orientation>) {
        if let Some(o) = o {
            if self.topo.orientation_dirs(o).is_empty() {
                self.issue(path, "orientation has no meaning on this board");
            }
        }
    }

    fn mechanic(&mut self, path: &str, m: &Mechanic) {
        match m {
            Mechanic::Place(p) => {
                self.piece(path, &p.piece);
                self.mask(&format!("{path}.destination"), &p.destination);
                if let Some(r) = &p.result {
                    self.predicate(&format!("{path}.result"), r);
                }
            }
            Mechanic::Move(mv) => {
                for (i, alt) in mv.alternatives.iter().enumerate() {
                    let apath = format!("{path}.move[{i}]");
                    self.piece(&apath, alt.piece());
                    if let Some(d) = alt.direction() {
                        self.direction(&apath, d);
                    }
                    if let MoveType::Hop(h) = alt {
                        if let Some(p) = &h.over_piece {
                            self.piece(&apath, p);
                        }
                    }
                }
            }
        }
        for (i, e) in m.effects().iter().enumerate() {
            let epath = format!("{path}.effects[{i}]");
            match e {
                Effect::Do(a) => self.effect(&epath, a),
                Effect::If { condition, then, otherwise } => {
                    self.predicate(&epath, condition);
                    self.effect(&epath, then);
                    if let Some(o) = otherwise {
                        self.effect(&epath, o);
                    }
                }
            }
        }
    }

    fn effect(&mut self, path: &str, e: &EffectAction) {
        match e {
            EffectAction::Capture { mask, .. } | EffectAction::Flip { mask, .. } => self.mask(path, mask),
            EffectAction::ExtraTurn { .. } => {}
            EffectAction::IncrementScore { amount: f, .. } | EffectAction::SetScore { value: f, .. } => {
                self.function(path, f)
            }
            EffectAction::Promote { from, to, mask, .. } => {
                self.piece(path, from);
                self.piece(path, to);
                self.mask(path, mask);
            }
        }
    }

    fn line(&mut self, path: &str, l: &LineFn) {
        self.piece(path, &l.piece);
        if l.length as usize > self.topo.rows.max(self.topo.width) {
            self.issue(path, format!("line length {} exceeds the board", l.length));
        }
        self.orientation(path, l.orientation);
        if let Some(x) = &l.exclude {
            self.multi_mask(path, x);
        }
    }

    fn mask(&mut self, path: &str, m: &Mask) {
        match m {
            Mask::Adjacent { mask, direction } => {
                if let Some(d) = direction {
                    self.direction(path, d);
                }
                self.mask(path, mask);
            }
            Mask::Column(i) => {
                if *i as usize >= self.topo.width {
                    self.issue(path, format!("column {i} out of range"));
                }
            }
            Mask::Row(i) => {
                if *i as usize >= self.topo.rows {
                    self.issue(path, format!("row {i} out of range"));
                }
            }
            Mask::CornerCustodial { piece, .. } => {
                self.piece(path, piece);
                if self.topo.is_hex() {
                    self.issue(path, "corner_custodial is only defined on square and rectangular boards");
                }
            }
            Mask::Custodial { piece, orientation, .. } => {
                self.piece(path, piece);
                self.orientation(path, *orientation);
            }
            Mask::Edge(kw) => match Edge::from_keyword(*kw) {
                Some(e) => {
                    if self.topo.edge(e).is_none() {
                        self.issue(path, format!("edge {e:?} does not exist on this board"));
                    }
                }
                None => {
                    if !self.facing_available() {
                        self.issue(path, "forward/backward edges need set_forward");
                    }
                }
            },
            Mask::Region(name) => {
                if !self.regions.contains(name.as_str()) {
                    self.issue(path, format!("unknown region \"{name}\""));
                }
            }
            Mask::Line(l) => self.line(path, l),
            Mask::And(v) | Mask::Or(v) => {
                for m in v {
                    self.mask(path, m);
                }
            }
            Mask::Not(m) => self.mask(path, m),
            Mask::Captured
            | Mask::Center
            | Mask::Corners
            | Mask::Empty
            | Mask::Hopped
            | Mask::Occupied(_)
            | Mask::PrevMove(_)
            | Mask::Promoted => {}
        }
    }

    fn function(&mut self, path: &str, f: &Function) {
        match f {
            Function::Add(v) | Function::Multiply(v) => {
                for f in v {
                    self.function(path, f);
                }
            }
            Function::Subtract(a, b) => {
                self.function(path, a);
                self.function(path, b);
            }
            Function::Connected { piece, masks, direction, .. } => {
                self.piece(path, piece);
                self.multi_mask(path, masks);
                if let Some(d) = direction {
                    self.direction(path, d);
                }
                let n = match masks {
                    MultiMask::List(v) => v.len(),
                    MultiMask::Single(_) => 1,
                    _ => 6,
                };
                if n > 8 {
                    self.issue(path, "connected supports at most 8 masks");
                }
            }
            Function::Count(m) => self.mask(path, m),
            Function::Line(l) => self.line(path, l),
            Function::Pattern { piece, pattern, exclude, .. } => {
                self.piece(path, piece);
                match pattern {
                    PatternArg::Offsets { indices, .. } => {
                        if indices.is_empty() {
                            self.issue(path, "empty pattern");
                        }
                    }
                    PatternArg::Shape(s) => {
                        let hex_shape = matches!(s, BoardShape::Hexagon(_) | BoardShape::HexRectangle(..));
                        if hex_shape != self.topo.is_hex() {
                            self.issue(path, "pattern shape does not match the board's cell geometry");
                        }
                        if let Err(e) = Topology::shape_offsets(*s) {
                            self.issue(path, e.to_string());
                        }
                    }
                }
                if let Some(x) = exclude {
                    self.multi_mask(path, x);
                }
            }
            Function::Constant(_) | Function::Score(_) => {}
        }
    }

    fn predicate(&mut self, path: &str, p: &Predicate) {
        match p {
            Predicate::Equals(v) => {
                for f in v {
                    self.function(path, f);
                }
            }
            Predicate::Exists(m) | Predicate::LastMoveIn(m) => self.mask(path, m),
            Predicate::Function(f) => self.function(path, f),
            Predicate::GreaterEqual(a, b) | Predicate::LessEqual(a, b) => {
                self.function(path, a);
                self.function(path, b);
            }
            Predicate::And(v) | Predicate::Or(v) => {
                for p in v {
                    self.predicate(path, p);
                }
            }
            Predicate::Not(p) => self.predicate(path, p),
            Predicate::ActionWas(..)
            | Predicate::CanMoveAgain(_)
            | Predicate::FullBoard
            | Predicate::MoverIs(_)
            | Predicate::NoLegalActions
            | Predicate::Passed(_) => {}
        }
    }
}
