//! Initial states, legal actions and the transition function.

use thiserror::Error;

use crate::compiler::codec::{Action, CodecKind};
use crate::compiler::expr::{action_kind, Ctx};
use crate::compiler::{CompiledEffect, CompiledGame, CompiledMechanic, CompiledMove, CompiledPlace};
use crate::dsl::ast::*;
use crate::engine::state::{ActionKind, GameState, LastAction, Outcome, Transient};
use crate::topology::{CellMask, NO_CELL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("action {action} is not legal in this state")]
    IllegalAction { action: u32 },
    #[error("the game is already over")]
    TerminalState,
}

/// A decoded action with cells resolved against a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Resolved {
    Pass,
    Place(usize),
    Move(usize, usize),
}

impl CompiledGame {
    pub fn initial_state(&self) -> GameState {
        let n = self.topology.num_cells;
        let l = &self.layout;
        let first = self.phases[0].order[0];
        let mut st = GameState {
            board: vec![0; n],
            mover: first,
            phase: 0,
            turn: 0,
            move_count: 0,
            scores: l.scores.then_some([0; 2]),
            passed: l.passes.then_some([false; 2]),
            must_move: l.must_move.then_some(NO_CELL),
            last: l.last_action.then_some([LastAction::default(); 2]),
            transient: l.transient.then(Transient::default),
            terminated: false,
            outcome: None,
            occ: vec![CellMask::EMPTY; self.pieces.len() * 2],
            player_occ: [CellMask::EMPTY; 2],
            connectivity: self.trackers.iter().map(|t| t.empty(n)).collect(),
            conn_dirty: false,
        };
        for (piece, player, cells) in &self.start {
            for c in cells.iter() {
                st.put(c, GameState::code(*piece, *player));
            }
        }
        self.rebuild_connectivity(&mut st);
        if l.scores {
            let ctx_state = st.clone();
            for e in &self.phases[0].effects {
                if let CompiledEffect::SetScore { who, value } = e {
                    let ctx = Ctx { game: self, state: &ctx_state, mover: first, anchor: None };
                    let v = value(&ctx);
                    st.scores.as_mut().unwrap()[who.resolve(first).index()] = v;
                }
            }
        }
        if !self.has_any_action(&st) {
            st.terminated = true;
            st.outcome = Some(Outcome::draw());
        }
        st
    }

    pub fn terminal(&self, st: &GameState) -> Option<Outcome> {
        st.outcome
    }

    fn rebuild_connectivity(&self, st: &mut GameState) {
        let mut ufs = std::mem::take(&mut st.connectivity);
        for (t, uf) in self.trackers.iter().zip(ufs.iter_mut()) {
            *uf = t.empty(self.topology.num_cells);
            t.rebuild(uf, &self.topology, st);
        }
        st.connectivity = ufs;
        st.conn_dirty = false;
    }

    /// Writes a cell, keeping connectivity current for additions.
    #[inline]
    fn put(&self, st: &mut GameState, cell: usize, code: u8) {
        let old = st.board[cell];
        st.put(cell, code);
        if self.trackers.is_empty() || st.conn_dirty {
            return;
        }
        if old == 0 && code != 0 {
            let piece = (code as usize - 1) / 2;
            for (i, t) in self.trackers.iter().enumerate() {
                if t.piece == piece {
                    t.add(&mut st.connectivity[i], &self.topology, &st.board, cell);
                }
            }
        } else if old != code {
            let touched = |c: u8| c != 0 && self.trackers.iter().any(|t| t.piece == (c as usize - 1) / 2);
            if touched(old) || touched(code) {
                st.conn_dirty = true;
            }
        }
    }

    fn sources(&self, st: &GameState, alt: &CompiledMove) -> CellMask {
        let mut s = st.pieces_of(alt.piece, st.mover);
        if let Some(m) = st.must_move {
            if m != NO_CELL {
                s = if s.contains(m as usize) { CellMask::single(m as usize) } else { CellMask::EMPTY };
            }
        }
        s
    }

    /// Destinations reachable from `src` with one alternative.
    fn targets(&self, st: &GameState, alt: &CompiledMove, p: Player, src: usize) -> CellMask {
        let topo = &self.topology;
        let mut out = CellMask::EMPTY;
        for d in alt.dirs[p.index()].iter() {
            match alt.kind {
                MoveKind::Step => {
                    if let Some(n) = topo.neighbor(src, d) {
                        if st.board[n] == 0 {
                            out.set(n);
                        }
                    }
                }
                MoveKind::Slide => {
                    for (k, n) in topo.ray(src, d).enumerate() {
                        if k >= alt.distance || st.board[n] != 0 {
                            break;
                        }
                        out.set(n);
                    }
                }
                MoveKind::Hop => {
                    if let Some(t) = self.hop_target(st, alt, p, src, d) {
                        out.set(t.1);
                    }
                }
            }
        }
        out
    }

    /// (hopped cell, landing cell) for a hop from `src` along `d`.
    #[inline]
    fn hop_target(
        &self,
        st: &GameState,
        alt: &CompiledMove,
        p: Player,
        src: usize,
        d: crate::topology::Dir,
    ) -> Option<(usize, usize)> {
        let topo = &self.topology;
        let mid = topo.neighbor(src, d)?;
        let land = topo.neighbor(mid, d)?;
        let (piece, owner) = st.piece_at(mid)?;
        if st.board[land] != 0 {
            return None;
        }
        if alt.hop_over.is_some_and(|r| r.resolve(p) != owner) {
            return None;
        }
        if alt.over_piece.is_some_and(|x| x != piece) {
            return None;
        }
        Some((mid, land))
    }

    /// Lowest priority class with at least one move, if any.
    fn active_class(&self, st: &GameState, alts: &[CompiledMove], classes: &[u64]) -> Option<u64> {
        if classes.len() == 1 {
            return Some(classes[0]);
        }
        classes.iter().copied().find(|&cls| {
            alts.iter().filter(|a| a.priority == cls).any(|a| {
                self.sources(st, a).iter().any(|s| !self.targets(st, a, st.mover, s).is_empty())
            })
        })
    }

    fn place_mask(&self, st: &GameState, p: &CompiledPlace) -> CellMask {
        let ctx = Ctx { game: self, state: st, mover: st.mover, anchor: None };
        let mut m = p.dest.eval(&ctx) & self.topology.all.andnot(&st.occupied());
        if let Some(result) = &p.result {
            if !m.is_empty() {
                let mut scratch = st.clone();
                scratch.conn_dirty = !self.trackers.is_empty();
                let code = GameState::code(p.piece, p.owner.resolve(st.mover));
                for c in m.iter() {
                    scratch.put(c, code);
                    let ok = result(&Ctx { game: self, state: &scratch, mover: st.mover, anchor: Some(c) });
                    scratch.put(c, 0);
                    if !ok {
                        m.clear(c);
                    }
                }
            }
        }
        m
    }

    fn place_any(&self, st: &GameState, p: &CompiledPlace) -> bool {
        let ctx = Ctx { game: self, state: st, mover: st.mover, anchor: None };
        let m = p.dest.eval(&ctx) & self.topology.all.andnot(&st.occupied());
        let Some(result) = &p.result else { return !m.is_empty() };
        if m.is_empty() {
            return false;
        }
        let mut scratch = st.clone();
        scratch.conn_dirty = !self.trackers.is_empty();
        let code = GameState::code(p.piece, p.owner.resolve(st.mover));
        m.iter().any(|c| {
            scratch.put(c, code);
            let ok = result(&Ctx { game: self, state: &scratch, mover: st.mover, anchor: Some(c) });
            scratch.put(c, 0);
            ok
        })
    }

    /// Whether the mover has any action other than passing.
    pub(crate) fn has_move(&self, st: &GameState) -> bool {
        let phase = &self.phases[st.phase as usize];
        match &phase.mechanic {
            CompiledMechanic::Place(p) => self.place_any(st, p),
            CompiledMechanic::Move { alts, .. } => alts.iter().any(|a| {
                self.sources(st, a).iter().any(|s| !self.targets(st, a, st.mover, s).is_empty())
            }),
        }
    }

    fn pass_allowed(&self, st: &GameState) -> bool {
        self.codec.has_pass && self.phases[st.phase as usize].force_pass
    }

    fn has_any_action(&self, st: &GameState) -> bool {
        self.has_move(st) || self.pass_allowed(st)
    }

    /// Legal action indices in ascending order.
    pub fn legal_actions(&self, st: &GameState) -> Vec<u32> {
        let mut out = Vec::new();
        self.legal_actions_into(st, &mut out);
        out
    }

    pub fn legal_actions_into(&self, st: &GameState, out: &mut Vec<u32>) {
        out.clear();
        if st.terminated {
            return;
        }
        let n = self.topology.num_cells as u32;
        let phase = &self.phases[st.phase as usize];
        match &phase.mechanic {
            CompiledMechanic::Place(p) => {
                let m = self.place_mask(st, p);
                let movement = self.codec.kind == CodecKind::Movement;
                out.extend(m.iter().map(|c| if movement { c as u32 * n + c as u32 } else { c as u32 }));
            }
            CompiledMechanic::Move { alts, classes } => {
                if let Some(cls) = self.active_class(st, alts, classes) {
                    let mut by_source: Vec<(usize, CellMask)> = Vec::new();
                    for a in alts.iter().filter(|a| a.priority == cls) {
                        for s in self.sources(st, a).iter() {
                            let t = self.targets(st, a, st.mover, s);
                            if t.is_empty() {
                                continue;
                            }
                            match by_source.iter_mut().find(|x| x.0 == s) {
                                Some(x) => x.1 |= t,
                                None => by_source.push((s, t)),
                            }
                        }
                    }
                    by_source.sort_unstable_by_key(|x| x.0);
                    if self.codec.kind == CodecKind::Gridworld {
                        for (s, t) in &by_source {
                            for (i, d) in self.codec.directions.iter().enumerate() {
                                if self.topology.neighbor(*s, *d).is_some_and(|x| t.contains(x)) {
                                    out.push(i as u32);
                                }
                            }
                        }
                        out.sort_unstable();
                        out.dedup();
                    } else {
                        for (s, t) in by_source {
                            out.extend(t.iter().map(|d| s as u32 * n + d as u32));
                        }
                    }
                }
            }
        }
        if out.is_empty() && self.pass_allowed(st) {
            out.push(self.codec.pass_index().expect("pass allowed"));
        }
    }

    /// Legal actions as a boolean vector over the whole action space.
    pub fn legal_mask(&self, st: &GameState) -> Vec<bool> {
        let mut mask = vec![false; self.codec.size];
        for a in self.legal_actions(st) {
            mask[a as usize] = true;
        }
        mask
    }

    fn resolve(&self, st: &GameState, action: u32) -> Option<Resolved> {
        Some(match self.codec.decode(action)? {
            Action::Pass => Resolved::Pass,
            Action::Place(c) => Resolved::Place(c),
            Action::Move { source, dest } => Resolved::Move(source, dest),
            Action::Direction(d) => {
                let src = st.occupied_by(st.mover).first_cell()?;
                Resolved::Move(src, self.topology.neighbor(src, d)?)
            }
        })
    }

    /// First alternative of the active class that produces `src -> dst`.
    fn matching_alt<'a>(&'a self, st: &GameState, src: usize, dst: usize) -> Option<&'a CompiledMove> {
        let CompiledMechanic::Move { alts, classes } = &self.phases[st.phase as usize].mechanic else {
            return None;
        };
        let (piece, owner) = st.piece_at(src)?;
        if owner != st.mover {
            return None;
        }
        let cls = self.active_class(st, alts, classes)?;
        alts.iter().find(|a| {
            a.priority == cls
                && a.piece == piece
                && self.sources(st, a).contains(src)
                && self.targets(st, a, st.mover, src).contains(dst)
        })
    }

    pub fn is_legal(&self, st: &GameState, action: u32) -> bool {
        if st.terminated {
            return false;
        }
        match self.resolve(st, action) {
            None => false,
            Some(Resolved::Pass) => self.pass_allowed(st) && !self.has_move(st),
            Some(Resolved::Place(c)) => match &self.phases[st.phase as usize].mechanic {
                CompiledMechanic::Place(p) => self.place_mask(st, p).contains(c),
                CompiledMechanic::Move { .. } => false,
            },
            Some(Resolved::Move(s, d)) => self.matching_alt(st, s, d).is_some(),
        }
    }

    /// Applies a legal action, returning the successor state.
    pub fn step(&self, st: &GameState, action: u32) -> Result<GameState, StepError> {
        let mut next = st.clone();
        self.step_mut(&mut next, action)?;
        Ok(next)
    }

    pub fn step_mut(&self, st: &mut GameState, action: u32) -> Result<(), StepError> {
        if st.terminated {
            return Err(StepError::TerminalState);
        }
        if !self.is_legal(st, action) {
            return Err(StepError::IllegalAction { action });
        }
        self.apply(st, action);
        Ok(())
    }

    /// Applies an action already known to be legal.
    pub(crate) fn apply(&self, st: &mut GameState, action: u32) {
        let mover = st.mover;
        let resolved = self.resolve(st, action).expect("legal action decodes");
        if st.transient.is_some() {
            st.transient = Some(Transient::default());
        }
        let mut anchor = None;
        let mut record = LastAction::default();
        match resolved {
            Resolved::Pass => record.kind = ActionKind::Pass,
            Resolved::Place(c) => {
                let CompiledMechanic::Place(p) = &self.phases[st.phase as usize].mechanic else {
                    unreachable!("placement outside a placement phase")
                };
                self.put(st, c, GameState::code(p.piece, p.owner.resolve(mover)));
                anchor = Some(c);
                record = LastAction { kind: ActionKind::Place, source: c as u16, dest: c as u16 };
            }
            Resolved::Move(s, d) => {
                let alt = self.matching_alt(st, s, d).expect("legal move has an alternative");
                let code = st.board[s];
                if alt.kind == MoveKind::Hop {
                    let hop = alt.dirs[mover.index()]
                        .iter()
                        .find_map(|dir| self.hop_target(st, alt, mover, s, dir).filter(|h| h.1 == d));
                    let (mid, _) = hop.expect("hop has a direction");
                    if let Some(t) = st.transient.as_mut() {
                        t.hopped.set(mid);
                    }
                    if alt.capture {
                        self.put(st, mid, 0);
                        if let Some(t) = st.transient.as_mut() {
                            t.captured.set(mid);
                        }
                    }
                }
                self.put(st, s, 0);
                self.put(st, d, code);
                anchor = Some(d);
                record = LastAction { kind: action_kind(alt.kind), source: s as u16, dest: d as u16 };
            }
        }
        if let Some(last) = st.last.as_mut() {
            last[mover.index()] = record;
        }
        if let Some(passed) = st.passed.as_mut() {
            passed[mover.index()] = resolved == Resolved::Pass;
        }
        if let Some(m) = st.must_move.as_mut() {
            *m = NO_CELL;
        }

        let mut extra = None;
        let phase_idx = st.phase as usize;
        if resolved != Resolved::Pass {
            for e in &self.phases[phase_idx].effects {
                self.apply_effect(st, e, mover, anchor, &mut extra);
            }
        }
        if st.conn_dirty {
            self.rebuild_connectivity(st);
        }

        let mut exhausted = false;
        if let Some((who, same_piece)) = extra {
            st.mover = who;
            if same_piece {
                if let (Some(m), Some(a)) = (st.must_move.as_mut(), anchor) {
                    *m = a as u16;
                }
            }
        } else {
            let phase = &self.phases[phase_idx];
            let t = st.turn as usize + 1;
            if t < phase.order.len() {
                st.turn = t as u16;
                st.mover = phase.order[t];
            } else if phase.kind == PhaseKind::Repeat {
                st.turn = 0;
                st.mover = phase.order[0];
            } else if phase_idx + 1 < self.phases.len() {
                st.phase += 1;
                st.turn = 0;
                st.mover = self.phases[phase_idx + 1].order[0];
            } else {
                exhausted = true;
            }
        }
        st.move_count += 1;

        let outcome = {
            let ctx = Ctx { game: self, state: st, mover, anchor };
            self.end_rules.iter().find(|(cond, _)| cond(&ctx)).map(|(_, r)| resolve_result(*r, mover, st))
        };
        let outcome = match outcome {
            Some(o) => Some(o),
            None if exhausted || !self.has_any_action(st) => Some(Outcome::draw()),
            None => None,
        };
        if let Some(o) = outcome {
            st.terminated = true;
            st.outcome = Some(o);
        }
        if st.transient.is_some() {
            st.transient = Some(Transient::default());
        }
    }

    fn effect_owners(
        st: &GameState,
        owners: Option<MoverOrBoth>,
        default_both: bool,
        mover: Player,
    ) -> CellMask {
        match owners {
            Some(MoverOrBoth::Both) => st.occupied(),
            Some(MoverOrBoth::Relative(r)) => st.occupied_by(r.resolve(mover)),
            None if default_both => st.occupied(),
            None => st.occupied_by(mover),
        }
    }

    fn apply_effect(
        &self,
        st: &mut GameState,
        e: &CompiledEffect,
        mover: Player,
        anchor: Option<usize>,
        extra: &mut Option<(Player, bool)>,
    ) {
        let ctx = Ctx { game: self, state: st, mover, anchor };
        match e {
            CompiledEffect::Capture { mask, owners, increment_score } => {
                let m = mask.eval(&ctx) & Self::effect_owners(st, *owners, true, mover);
                for c in m.iter() {
                    self.put(st, c, 0);
                }
                if let Some(t) = st.transient.as_mut() {
                    t.captured |= m;
                }
                if *increment_score {
                    if let Some(s) = st.scores.as_mut() {
                        s[mover.index()] += m.count() as i64;
                    }
                }
            }
            CompiledEffect::Flip { mask, owners } => {
                let m = mask.eval(&ctx) & Self::effect_owners(st, *owners, true, mover);
                for c in m.iter() {
                    let code = st.board[c];
                    let flipped = ((code - 1) ^ 1) + 1;
                    self.put(st, c, flipped);
                }
            }
            CompiledEffect::Promote { from, to, mask, owners } => {
                let m = mask.eval(&ctx) & Self::effect_owners(st, *owners, false, mover);
                let mut done = CellMask::EMPTY;
                for c in m.iter() {
                    if let Some((piece, owner)) = st.piece_at(c) {
                        if piece == *from {
                            self.put(st, c, GameState::code(*to, owner));
                            done.set(c);
                        }
                    }
                }
                if let Some(t) = st.transient.as_mut() {
                    t.promoted |= done;
                }
            }
            CompiledEffect::IncrementScore { who, amount } => {
                let v = amount(&ctx);
                if let Some(s) = st.scores.as_mut() {
                    s[who.resolve(mover).index()] += v;
                }
            }
            CompiledEffect::SetScore { who, value } => {
                let v = value(&ctx);
                if let Some(s) = st.scores.as_mut() {
                    s[who.resolve(mover).index()] = v;
                }
            }
            CompiledEffect::ExtraTurn { who, same_piece } => {
                *extra = Some((who.resolve(mover), *same_piece));
            }
            CompiledEffect::If { condition, then, otherwise } => {
                let branch = if condition(&ctx) { Some(then) } else { otherwise.as_ref() };
                if let Some(b) = branch {
                    self.apply_effect(st, b, mover, anchor, extra);
                }
            }
        }
    }

    /// Whether the piece now at `cell` could make another move of `kind`.
    pub(crate) fn can_move_again(&self, st: &GameState, phase: usize, cell: usize, p: Player, kind: MoveKind) -> bool {
        let CompiledMechanic::Move { alts, .. } = &self.phases[phase].mechanic else {
            return false;
        };
        let Some((piece, owner)) = st.piece_at(cell) else { return false };
        owner == p
            && alts
                .iter()
                .any(|a| a.kind == kind && a.piece == piece && !self.targets(st, a, p, cell).is_empty())
    }
}

fn resolve_result(r: EndResult, mover: Player, st: &GameState) -> Outcome {
    match r {
        EndResult::Win(MoverOrBoth::Relative(who)) => Outcome::win(who.resolve(mover)),
        EndResult::Lose(MoverOrBoth::Relative(who)) => Outcome::win(who.resolve(mover).other()),
        EndResult::Win(MoverOrBoth::Both) | EndResult::Lose(MoverOrBoth::Both) | EndResult::Draw => Outcome::draw(),
        EndResult::ByScore => {
            let (a, b) = (st.score(Player::P1), st.score(Player::P2));
            match a.cmp(&b) {
                std::cmp::Ordering::Greater => Outcome::win(Player::P1),
                std::cmp::Ordering::Less => Outcome::win(Player::P2),
                std::cmp::Ordering::Equal => Outcome::draw(),
            }
        }
    }
}
