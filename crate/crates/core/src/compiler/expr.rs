//! Masks, functions and predicates compiled to closures over a [`Ctx`].
//!
//! Masks that do not depend on the state fold to constants at compile time,
//! optionally one per player when they depend on the mover's facing.

use std::collections::HashMap;

use super::connectivity::{connected_bfs, Tracker};
use super::{CompileError, CompiledGame};
use crate::dsl::ast::*;
use crate::engine::state::{ActionKind, GameState};
use crate::topology::{CellMask, DirSet, Edge, LineTable, Topology, NO_CELL};

/// Evaluation context: the game, a state, the acting player and the cell
/// the current action landed on.
pub struct Ctx<'a> {
    pub game: &'a CompiledGame,
    pub state: &'a GameState,
    pub mover: Player,
    pub anchor: Option<usize>,
}

pub type MaskFn = Box<dyn Fn(&Ctx) -> CellMask + Send + Sync>;
pub type IntFn = Box<dyn Fn(&Ctx) -> i64 + Send + Sync>;
pub type PredFn = Box<dyn Fn(&Ctx) -> bool + Send + Sync>;

pub enum MaskNode {
    Const(CellMask),
    /// Indexed by the mover.
    PerPlayer([CellMask; 2]),
    Dyn(MaskFn),
}

impl MaskNode {
    #[inline]
    pub fn eval(&self, ctx: &Ctx) -> CellMask {
        match self {
            MaskNode::Const(m) => *m,
            MaskNode::PerPlayer(m) => m[ctx.mover.index()],
            MaskNode::Dyn(f) => f(ctx),
        }
    }

    pub fn is_static(&self) -> bool {
        !matches!(self, MaskNode::Dyn(_))
    }

    fn per_player(&self) -> Option<[CellMask; 2]> {
        match self {
            MaskNode::Const(m) => Some([*m, *m]),
            MaskNode::PerPlayer(m) => Some(*m),
            MaskNode::Dyn(_) => None,
        }
    }

    fn from_pair(m: [CellMask; 2]) -> MaskNode {
        if m[0] == m[1] {
            MaskNode::Const(m[0])
        } else {
            MaskNode::PerPlayer(m)
        }
    }

    fn into_fn(self) -> MaskFn {
        match self {
            MaskNode::Const(m) => Box::new(move |_| m),
            MaskNode::PerPlayer(m) => Box::new(move |ctx| m[ctx.mover.index()]),
            MaskNode::Dyn(f) => f,
        }
    }
}

/// Shared compilation context.
pub struct Builder<'a> {
    pub spec: &'a GameSpec,
    pub topo: &'a Topology,
    pub pieces: HashMap<String, usize>,
    pub regions: HashMap<String, CellMask>,
    pub trackers: Vec<Tracker>,
    /// Phase whose rules are being compiled, if any.
    pub phase: Option<usize>,
}

impl<'a> Builder<'a> {
    pub fn piece(&self, name: &str) -> Result<usize, CompileError> {
        self.pieces.get(name).copied().ok_or_else(|| CompileError::UnknownPiece(name.to_string()))
    }

    fn facing(&self, p: Player) -> Option<Facing> {
        self.spec.players.forward.map(|f| f[p.index()])
    }

    /// Directions per player; `None` means every board direction.
    pub fn dirs(&self, d: Option<&DirectionArg>) -> Result<[DirSet; 2], CompileError> {
        let Some(d) = d else {
            return Ok([self.topo.directions; 2]);
        };
        let mut out = [DirSet::EMPTY; 2];
        for p in Player::ALL {
            out[p.index()] = self.topo.resolve_directions(d.keywords(), self.facing(p))?;
        }
        Ok(out)
    }

    pub fn multi_mask(&mut self, m: &MultiMask) -> Result<Vec<MaskNode>, CompileError> {
        Ok(match m {
            MultiMask::Corners => self.topo.corner_list().into_iter().map(MaskNode::Const).collect(),
            MultiMask::Edges => self.topo.edge_list().into_iter().map(MaskNode::Const).collect(),
            MultiMask::EdgesNoCorners => {
                let corners = self.topo.corners;
                self.topo.edge_list().into_iter().map(|e| MaskNode::Const(e.andnot(&corners))).collect()
            }
            MultiMask::Single(m) => vec![self.mask(m)?],
            MultiMask::List(v) => v.iter().map(|m| self.mask(m)).collect::<Result<_, _>>()?,
        })
    }

    /// Union of a multi-mask, for `exclude:` arguments.
    fn multi_union(&mut self, m: &MultiMask) -> Result<MaskNode, CompileError> {
        let parts = self.multi_mask(m)?;
        Ok(or_nodes(parts))
    }

    /// Cells of a start placement or region.
    pub fn cell_set(&mut self, c: &CellSet) -> Result<CellMask, CompileError> {
        match c {
            CellSet::Indices(v) => {
                let mut m = CellMask::EMPTY;
                for &i in v {
                    if i as usize >= self.topo.num_cells {
                        return Err(CompileError::Invalid(format!("cell index {i} out of range")));
                    }
                    m.set(i as usize);
                }
                Ok(m)
            }
            CellSet::Masks(mm) => {
                let mut out = CellMask::EMPTY;
                for node in self.multi_mask(mm)? {
                    match node {
                        MaskNode::Const(m) => out |= m,
                        _ => return Err(CompileError::Invalid("cell sets must not depend on the game state".into())),
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn mask(&mut self, m: &Mask) -> Result<MaskNode, CompileError> {
        let topo = self.topo;
        Ok(match m {
            Mask::Adjacent { mask, direction } => {
                let inner = self.mask(mask)?;
                let dirs = self.dirs(direction.as_ref())?;
                let tables: [Vec<CellMask>; 2] = dirs.map(|ds| {
                    (0..topo.num_cells)
                        .map(|c| CellMask::from_cells(ds.iter().filter_map(|d| topo.neighbor(c, d))))
                        .collect()
                });
                let shift = move |m: CellMask, p: usize| -> CellMask {
                    let mut out = CellMask::EMPTY;
                    for c in m.iter() {
                        out |= tables[p][c];
                    }
                    out
                };
                match inner.per_player() {
                    Some(pair) => MaskNode::from_pair([shift(pair[0], 0), shift(pair[1], 1)]),
                    None => {
                        let f = inner.into_fn();
                        MaskNode::Dyn(Box::new(move |ctx| shift(f(ctx), ctx.mover.index())))
                    }
                }
            }
            Mask::Captured => MaskNode::Dyn(Box::new(|ctx| ctx.state.transient.map_or(CellMask::EMPTY, |t| t.captured))),
            Mask::Hopped => MaskNode::Dyn(Box::new(|ctx| ctx.state.transient.map_or(CellMask::EMPTY, |t| t.hopped))),
            Mask::Promoted => MaskNode::Dyn(Box::new(|ctx| ctx.state.transient.map_or(CellMask::EMPTY, |t| t.promoted))),
            Mask::Center => MaskNode::Const(topo.center),
            Mask::Column(i) => MaskNode::Const(topo.column_mask(*i as usize)),
            Mask::Row(i) => MaskNode::Const(topo.row_mask(*i as usize)),
            Mask::Corners => MaskNode::Const(topo.corners),
            Mask::Edge(kw) => match Edge::from_keyword(*kw) {
                Some(e) => MaskNode::Const(
                    topo.edge(e).ok_or_else(|| CompileError::Invalid(format!("edge {e:?} does not exist")))?,
                ),
                None => {
                    let mut pair = [CellMask::EMPTY; 2];
                    for p in Player::ALL {
                        let f = self.facing(p).ok_or(CompileError::MissingForward)?;
                        let e = if *kw == EdgeKw::Forward { Edge::facing(f) } else { Edge::facing(f).opposite() };
                        pair[p.index()] = topo.edge(e).unwrap_or(CellMask::EMPTY);
                    }
                    MaskNode::from_pair(pair)
                }
            },
            Mask::Region(name) => MaskNode::Const(
                *self.regions.get(name).ok_or_else(|| CompileError::Invalid(format!("unknown region \"{name}\"")))?,
            ),
            Mask::Empty => MaskNode::Dyn(Box::new(|ctx| ctx.game.topology.all.andnot(&ctx.state.occupied()))),
            Mask::Occupied(None) => MaskNode::Dyn(Box::new(|ctx| ctx.state.occupied())),
            Mask::Occupied(Some(r)) => {
                let r = *r;
                MaskNode::Dyn(Box::new(move |ctx| ctx.state.occupied_by(r.resolve(ctx.mover))))
            }
            Mask::PrevMove(r) => {
                let r = *r;
                MaskNode::Dyn(Box::new(move |ctx| {
                    ctx.state
                        .last
                        .and_then(|l| l[r.resolve(ctx.mover).index()].cell())
                        .map_or(CellMask::EMPTY, CellMask::single)
                }))
            }
            Mask::Custodial { piece, length, mover, orientation } => {
                let piece = self.piece(piece)?;
                let dirs = orientation.map_or(topo.directions, |o| topo.orientation_dirs(o));
                let length = *length;
                let flankers = *mover;
                MaskNode::Dyn(Box::new(move |ctx| custodial(ctx, piece, length, flankers, dirs)))
            }
            Mask::CornerCustodial { piece, mover } => {
                let piece = self.piece(piece)?;
                let flankers = *mover;
                let orth = topo.resolve_direction(DirectionKw::Orthogonal, None)?;
                let corners: Vec<(usize, CellMask)> = topo
                    .corners
                    .iter()
                    .map(|c| (c, CellMask::from_cells(orth.iter().filter_map(|d| topo.neighbor(c, d)))))
                    .collect();
                MaskNode::Dyn(Box::new(move |ctx| {
                    let mut out = CellMask::EMPTY;
                    for f in flanker_players(flankers, ctx.mover) {
                        let victims = ctx.state.pieces_of(piece, f.other());
                        let own = ctx.state.occupied_by(f);
                        for (corner, guards) in &corners {
                            if !victims.contains(*corner) || guards.count() < 2 || !guards.is_subset(&own) {
                                continue;
                            }
                            if let Some(a) = ctx.anchor {
                                if !guards.contains(a) {
                                    continue;
                                }
                            }
                            out.set(*corner);
                        }
                    }
                    out
                }))
            }
            Mask::Line(l) => {
                let line = self.line(l)?;
                MaskNode::Dyn(Box::new(move |ctx| line.mask(ctx)))
            }
            Mask::And(v) => {
                let parts = v.iter().map(|m| self.mask(m)).collect::<Result<Vec<_>, _>>()?;
                and_nodes(parts)
            }
            Mask::Or(v) => {
                let parts = v.iter().map(|m| self.mask(m)).collect::<Result<Vec<_>, _>>()?;
                or_nodes(parts)
            }
            Mask::Not(m) => {
                let all = topo.all;
                match self.mask(m)? {
                    MaskNode::Const(m) => MaskNode::Const(all.andnot(&m)),
                    MaskNode::PerPlayer(p) => MaskNode::PerPlayer(p.map(|m| all.andnot(&m))),
                    MaskNode::Dyn(f) => MaskNode::Dyn(Box::new(move |ctx| all.andnot(&f(ctx)))),
                }
            }
        })
    }

    fn line(&mut self, l: &LineFn) -> Result<LineEval, CompileError> {
        let piece = self.piece(&l.piece)?;
        let dirs = l.orientation.map_or(self.topo.directions, |o| self.topo.orientation_dirs(o));
        let table = self.topo.line_table(l.length as usize, dirs);
        let starts = start_index(self.topo.num_cells, table.tuples().map(|t| t[0]));
        let exclude = match &l.exclude {
            Some(x) => Some(self.multi_union(x)?),
            None => None,
        };
        Ok(LineEval {
            table,
            starts,
            piece,
            player: l.player.unwrap_or(PlayerRef::Relative(MoverRef::Mover)),
            exact: l.exact.unwrap_or(false),
            exclude,
        })
    }

    fn pattern(
        &mut self,
        piece: &str,
        pattern: &PatternArg,
        rotate: Option<bool>,
        player: Option<PlayerRef>,
        exclude: Option<&MultiMask>,
    ) -> Result<IntFn, CompileError> {
        let piece = self.piece(piece)?;
        let offsets = match pattern {
            PatternArg::Offsets { width, indices } => Topology::index_offsets(*width, indices)?,
            PatternArg::Shape(s) => Topology::shape_offsets(*s)?,
        };
        let table = self.topo.pattern_table(&offsets, rotate.unwrap_or(false))?;
        let starts = start_index(self.topo.num_cells, table.placements().map(|t| t[0]));
        let exclude = match exclude {
            Some(x) => Some(self.multi_union(x)?),
            None => None,
        };
        let player = player.unwrap_or(PlayerRef::Relative(MoverRef::Mover));
        Ok(Box::new(move |ctx| {
            let target = ctx.state.pieces_of(piece, player.resolve(ctx.mover));
            let ex = exclude.as_ref().map(|x| x.eval(ctx));
            let mut n = 0;
            for c in target.iter() {
                for i in starts[c] as usize..starts[c + 1] as usize {
                    let cells = &table.cells[i * table.size..(i + 1) * table.size];
                    if cells.iter().all(|&x| target.contains(x as usize))
                        && ex.is_none_or(|ex| !cells.iter().any(|&x| ex.contains(x as usize)))
                    {
                        n += 1;
                    }
                }
            }
            n
        }))
    }

    pub fn function(&mut self, f: &Function) -> Result<IntFn, CompileError> {
        Ok(match f {
            Function::Add(v) => {
                let parts = v.iter().map(|f| self.function(f)).collect::<Result<Vec<_>, _>>()?;
                Box::new(move |ctx| parts.iter().map(|f| f(ctx)).sum())
            }
            Function::Multiply(v) => {
                let parts = v.iter().map(|f| self.function(f)).collect::<Result<Vec<_>, _>>()?;
                Box::new(move |ctx| parts.iter().map(|f| f(ctx)).product())
            }
            Function::Subtract(a, b) => {
                let (a, b) = (self.function(a)?, self.function(b)?);
                Box::new(move |ctx| a(ctx) - b(ctx))
            }
            Function::Constant(n) => {
                let n = *n as i64;
                Box::new(move |_| n)
            }
            Function::Count(m) => match self.mask(m)? {
                MaskNode::Const(m) => {
                    let n = m.count() as i64;
                    Box::new(move |_| n)
                }
                node => Box::new(move |ctx| node.eval(ctx).count() as i64),
            },
            Function::Line(l) => {
                let line = self.line(l)?;
                Box::new(move |ctx| line.count(ctx))
            }
            Function::Pattern { piece, pattern, rotate, player, exclude } => {
                self.pattern(piece, pattern, *rotate, *player, exclude.as_ref())?
            }
            Function::Score(r) => {
                let r = *r;
                Box::new(move |ctx| ctx.state.score(r.resolve(ctx.mover)))
            }
            Function::Connected { piece, masks, mover, direction } => {
                let test = self.connected(piece, masks, *mover, direction.as_ref())?;
                Box::new(move |ctx| test(ctx) as i64)
            }
        })
    }

    fn connected(
        &mut self,
        piece: &str,
        masks: &MultiMask,
        mover: Option<MoverOrBoth>,
        direction: Option<&DirectionArg>,
    ) -> Result<PredFn, CompileError> {
        let piece = self.piece(piece)?;
        let dirs = self.dirs(direction)?;
        let nodes = self.multi_mask(masks)?;
        let statics: Option<Vec<CellMask>> = nodes
            .iter()
            .map(|n| match n {
                MaskNode::Const(m) => Some(*m),
                _ => None,
            })
            .collect();
        let n = self.topo.num_cells;
        if let Some(statics) = statics {
            let slot = self.trackers.iter().position(|t| t.piece == piece && t.dirs == dirs && t.masks.len() + statics.len() <= 32);
            let slot = slot.unwrap_or_else(|| {
                self.trackers.push(Tracker::new(piece, dirs, n));
                self.trackers.len() - 1
            });
            let first = self.trackers[slot].add_masks(&statics).expect("slot chosen with room");
            let count = statics.len() as u32;
            return Ok(Box::new(move |ctx| {
                flanker_players(mover, ctx.mover).any(|p| {
                    let tracker = &ctx.game.trackers[slot];
                    if ctx.state.conn_dirty {
                        let pieces = ctx.state.pieces_of(piece, p);
                        connected_bfs(&ctx.game.topology, pieces, tracker.dirs[p.index()], &statics)
                    } else {
                        tracker.query(&ctx.state.connectivity[slot], ctx.state, p, first, count)
                    }
                })
            }));
        }
        Ok(Box::new(move |ctx| {
            let masks: Vec<CellMask> = nodes.iter().map(|m| m.eval(ctx)).collect();
            flanker_players(mover, ctx.mover).any(|p| {
                connected_bfs(&ctx.game.topology, ctx.state.pieces_of(piece, p), dirs[p.index()], &masks)
            })
        }))
    }

    pub fn predicate(&mut self, p: &Predicate) -> Result<PredFn, CompileError> {
        Ok(match p {
            Predicate::ActionWas(r, kind) => {
                let (r, kind) = (*r, action_kind(*kind));
                Box::new(move |ctx| ctx.state.last.is_some_and(|l| l[r.resolve(ctx.mover).index()].kind == kind))
            }
            Predicate::CanMoveAgain(kind) => {
                let phase = self.phase;
                let kind = *kind;
                Box::new(move |ctx| {
                    let Some(cell) = ctx.anchor else { return false };
                    let phase = phase.unwrap_or(ctx.state.phase as usize);
                    ctx.game.can_move_again(ctx.state, phase, cell, ctx.mover, kind)
                })
            }
            Predicate::Equals(v) => {
                let parts = v.iter().map(|f| self.function(f)).collect::<Result<Vec<_>, _>>()?;
                Box::new(move |ctx| {
                    let mut it = parts.iter().map(|f| f(ctx));
                    match it.next() {
                        Some(first) => it.all(|x| x == first),
                        None => true,
                    }
                })
            }
            Predicate::Exists(m) => self.exists(m)?,
            Predicate::FullBoard => Box::new(|ctx| ctx.state.occupied_count() == ctx.game.topology.num_cells),
            Predicate::Function(f) => match f {
                Function::Line(l) => {
                    let line = self.line(l)?;
                    Box::new(move |ctx| line.exists(ctx))
                }
                Function::Connected { piece, masks, mover, direction } => {
                    self.connected(piece, masks, *mover, direction.as_ref())?
                }
                f => {
                    let f = self.function(f)?;
                    Box::new(move |ctx| f(ctx) > 0)
                }
            },
            Predicate::GreaterEqual(a, b) => {
                let (a, b) = (self.function(a)?, self.function(b)?);
                Box::new(move |ctx| a(ctx) >= b(ctx))
            }
            Predicate::LessEqual(a, b) => {
                let (a, b) = (self.function(a)?, self.function(b)?);
                Box::new(move |ctx| a(ctx) <= b(ctx))
            }
            Predicate::LastMoveIn(m) => {
                let m = self.mask(m)?;
                Box::new(move |ctx| {
                    let Some(cell) = ctx.state.last.and_then(|l| l[ctx.mover.index()].cell()) else {
                        return false;
                    };
                    m.eval(ctx).contains(cell)
                })
            }
            Predicate::MoverIs(p) => {
                let p = *p;
                Box::new(move |ctx| ctx.mover == p)
            }
            Predicate::NoLegalActions => Box::new(|ctx| !ctx.game.has_move(ctx.state)),
            Predicate::Passed(who) => {
                let who = *who;
                Box::new(move |ctx| {
                    let Some(passed) = ctx.state.passed else { return false };
                    match who {
                        MoverOrBoth::Both => passed[0] && passed[1],
                        MoverOrBoth::Relative(r) => passed[r.resolve(ctx.mover).index()],
                    }
                })
            }
            Predicate::And(v) => {
                let parts = v.iter().map(|p| self.predicate(p)).collect::<Result<Vec<_>, _>>()?;
                Box::new(move |ctx| parts.iter().all(|p| p(ctx)))
            }
            Predicate::Or(v) => {
                let parts = v.iter().map(|p| self.predicate(p)).collect::<Result<Vec<_>, _>>()?;
                Box::new(move |ctx| parts.iter().any(|p| p(ctx)))
            }
            Predicate::Not(p) => {
                let p = self.predicate(p)?;
                Box::new(move |ctx| !p(ctx))
            }
        })
    }

    fn exists(&mut self, m: &Mask) -> Result<PredFn, CompileError> {
        Ok(match m {
            Mask::Line(l) => {
                let line = self.line(l)?;
                Box::new(move |ctx| line.exists(ctx))
            }
            m => match self.mask(m)? {
                MaskNode::Const(m) => {
                    let v = !m.is_empty();
                    Box::new(move |_| v)
                }
                node => Box::new(move |ctx| !node.eval(ctx).is_empty()),
            },
        })
    }
}

pub fn action_kind(k: MoveKind) -> ActionKind {
    match k {
        MoveKind::Hop => ActionKind::Hop,
        MoveKind::Slide => ActionKind::Slide,
        MoveKind::Step => ActionKind::Step,
    }
}

/// Index into a start-sorted tuple list: tuples starting at cell `c` are
/// `starts[c]..starts[c + 1]`.
fn start_index(num_cells: usize, firsts: impl Iterator<Item = u16>) -> Vec<u32> {
    let mut counts = vec![0u32; num_cells + 1];
    for f in firsts {
        counts[f as usize + 1] += 1;
    }
    for i in 1..counts.len() {
        counts[i] += counts[i - 1];
    }
    counts
}

pub fn and_nodes(parts: Vec<MaskNode>) -> MaskNode {
    let (stat, dynamic): (Vec<_>, Vec<_>) = parts.into_iter().partition(MaskNode::is_static);
    let mut acc = [!CellMask::EMPTY; 2];
    for s in stat {
        let p = s.per_player().expect("static");
        acc = [acc[0] & p[0], acc[1] & p[1]];
    }
    if dynamic.is_empty() {
        return MaskNode::from_pair(acc);
    }
    let fs: Vec<MaskFn> = dynamic.into_iter().map(MaskNode::into_fn).collect();
    MaskNode::Dyn(Box::new(move |ctx| {
        let mut m = acc[ctx.mover.index()];
        for f in &fs {
            if m.is_empty() {
                break;
            }
            m &= f(ctx);
        }
        m
    }))
}

pub fn or_nodes(parts: Vec<MaskNode>) -> MaskNode {
    let (stat, dynamic): (Vec<_>, Vec<_>) = parts.into_iter().partition(MaskNode::is_static);
    let mut acc = [CellMask::EMPTY; 2];
    for s in stat {
        let p = s.per_player().expect("static");
        acc = [acc[0] | p[0], acc[1] | p[1]];
    }
    if dynamic.is_empty() {
        return MaskNode::from_pair(acc);
    }
    let fs: Vec<MaskFn> = dynamic.into_iter().map(MaskNode::into_fn).collect();
    MaskNode::Dyn(Box::new(move |ctx| {
        let mut m = acc[ctx.mover.index()];
        for f in &fs {
            m |= f(ctx);
        }
        m
    }))
}

fn flanker_players(sel: Option<MoverOrBoth>, mover: Player) -> impl Iterator<Item = Player> {
    let list: ([Player; 2], usize) = match sel {
        None | Some(MoverOrBoth::Relative(MoverRef::Mover)) => ([mover, mover], 1),
        Some(MoverOrBoth::Relative(MoverRef::Opponent)) => ([mover.other(), mover], 1),
        Some(MoverOrBoth::Both) => (Player::ALL, 2),
    };
    list.0.into_iter().take(list.1)
}

/// Opponent runs of `piece` bracketed on both ends by the flanking player.
/// With an anchor only runs touching the anchor cell count.
fn custodial(ctx: &Ctx, piece: usize, length: CustodialLength, sel: Option<MoverOrBoth>, dirs: DirSet) -> CellMask {
    let topo = &ctx.game.topology;
    let mut out = CellMask::EMPTY;
    for f in flanker_players(sel, ctx.mover) {
        let victims = ctx.state.pieces_of(piece, f.other());
        let own = ctx.state.occupied_by(f);
        if victims.is_empty() {
            continue;
        }
        let mut scan = |a: usize| {
            for d in dirs.iter() {
                let mut run = CellMask::EMPTY;
                let mut n = 0u64;
                let mut cur = a;
                let closed = loop {
                    match topo.neighbor(cur, d) {
                        Some(x) if victims.contains(x) => {
                            run.set(x);
                            n += 1;
                            cur = x;
                        }
                        Some(x) => break own.contains(x),
                        None => break false,
                    }
                };
                let len_ok = match length {
                    CustodialLength::Any => n >= 1,
                    CustodialLength::Exactly(k) => n == k,
                };
                if closed && len_ok {
                    out |= run;
                }
            }
        };
        match ctx.anchor {
            Some(a) => {
                if own.contains(a) {
                    scan(a)
                }
            }
            None => own.iter().for_each(scan),
        }
    }
    out
}

struct LineEval {
    table: LineTable,
    starts: Vec<u32>,
    piece: usize,
    player: PlayerRef,
    exact: bool,
    exclude: Option<MaskNode>,
}

impl LineEval {
    /// Calls `hit` for each qualifying line; stops when it returns true.
    #[inline]
    fn scan(&self, ctx: &Ctx, mut hit: impl FnMut(&[u16]) -> bool) {
        let target = ctx.state.pieces_of(self.piece, self.player.resolve(ctx.mover));
        if target.count() < self.table.length {
            return;
        }
        let ex = self.exclude.as_ref().map(|x| x.eval(ctx));
        let len = self.table.length;
        for c in target.iter() {
            for i in self.starts[c] as usize..self.starts[c + 1] as usize {
                let cells = &self.table.cells[i * len..(i + 1) * len];
                if !cells[1..].iter().all(|&x| target.contains(x as usize)) {
                    continue;
                }
                if self.exact {
                    let [a, b] = self.table.extensions[i];
                    if (a != NO_CELL && target.contains(a as usize))
                        || (b != NO_CELL && target.contains(b as usize))
                    {
                        continue;
                    }
                }
                if let Some(ex) = &ex {
                    if cells.iter().any(|&x| ex.contains(x as usize)) {
                        continue;
                    }
                }
                if hit(cells) {
                    return;
                }
            }
        }
    }

    fn exists(&self, ctx: &Ctx) -> bool {
        let mut found = false;
        self.scan(ctx, |_| {
            found = true;
            true
        });
        found
    }

    fn count(&self, ctx: &Ctx) -> i64 {
        let mut n = 0;
        self.scan(ctx, |_| {
            n += 1;
            false
        });
        n
    }

    fn mask(&self, ctx: &Ctx) -> CellMask {
        let mut m = CellMask::EMPTY;
        self.scan(ctx, |cells| {
            for &c in cells {
                m.set(c as usize);
            }
            false
        });
        m
    }
}
