//! Which optional state attributes a game needs, found by scanning the
//! program for the constructs that read or write them.

use serde::Serialize;

use crate::dsl::ast::*;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StateLayout {
    pub scores: bool,
    pub passes: bool,
    pub must_move: bool,
    pub last_action: bool,
    pub transient: bool,
    pub phase_index: bool,
    pub connectivity: usize,
}

impl StateLayout {
    /// Names of the attributes carried besides board, mover and move counter.
    pub fn attributes(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags = [
            (self.scores, "scores"),
            (self.passes, "passes"),
            (self.must_move, "must_move"),
            (self.last_action, "last_action"),
            (self.transient, "transient_masks"),
            (self.phase_index, "phase_index"),
            (self.connectivity > 0, "connectivity"),
        ];
        for (on, name) in flags {
            if on {
                out.push(name);
            }
        }
        out
    }
}

pub fn scan(spec: &GameSpec) -> StateLayout {
    let mut l = StateLayout { phase_index: spec.phases.len() > 1, ..Default::default() };
    for phase in &spec.phases {
        l.passes |= phase.force_pass;
        if let Mechanic::Place(p) = &phase.mechanic {
            mask(&mut l, &p.destination);
            if let Some(r) = &p.result {
                predicate(&mut l, r);
            }
        }
        for e in phase.mechanic.effects() {
            match e {
                Effect::Do(a) => action(&mut l, a),
                Effect::If { condition, then, otherwise } => {
                    predicate(&mut l, condition);
                    action(&mut l, then);
                    if let Some(o) = otherwise {
                        action(&mut l, o);
                    }
                }
            }
        }
    }
    for r in &spec.end_rules {
        predicate(&mut l, &r.condition);
        if r.result == EndResult::ByScore {
            l.scores = true;
        }
    }
    l
}

fn action(l: &mut StateLayout, a: &EffectAction) {
    match a {
        EffectAction::Capture { mask: m, increment_score, .. } => {
            mask(l, m);
            l.scores |= increment_score.unwrap_or(false);
        }
        EffectAction::ExtraTurn { same_piece, .. } => l.must_move |= same_piece.unwrap_or(false),
        EffectAction::Flip { mask: m, .. } | EffectAction::Promote { mask: m, .. } => mask(l, m),
        EffectAction::IncrementScore { amount: f, .. } | EffectAction::SetScore { value: f, .. } => {
            l.scores = true;
            function(l, f);
        }
    }
}

fn multi(l: &mut StateLayout, m: &MultiMask) {
    match m {
        MultiMask::Single(m) => mask(l, m),
        MultiMask::List(v) => v.iter().for_each(|m| mask(l, m)),
        _ => {}
    }
}

fn mask(l: &mut StateLayout, m: &Mask) {
    match m {
        Mask::Adjacent { mask: m, .. } | Mask::Not(m) => mask(l, m),
        Mask::Captured | Mask::Hopped | Mask::Promoted => l.transient = true,
        Mask::PrevMove(_) => l.last_action = true,
        Mask::Line(f) => line(l, f),
        Mask::And(v) | Mask::Or(v) => v.iter().for_each(|m| mask(l, m)),
        _ => {}
    }
}

fn line(l: &mut StateLayout, f: &LineFn) {
    if let Some(x) = &f.exclude {
        multi(l, x);
    }
}

fn function(l: &mut StateLayout, f: &Function) {
    match f {
        Function::Add(v) | Function::Multiply(v) => v.iter().for_each(|f| function(l, f)),
        Function::Connected { masks, .. } => {
            l.connectivity += 1;
            multi(l, masks);
        }
        Function::Count(m) => mask(l, m),
        Function::Line(f) => line(l, f),
        Function::Pattern { exclude: Some(x), .. } => multi(l, x),
        Function::Score(_) => l.scores = true,
        Function::Subtract(a, b) => {
            function(l, a);
            function(l, b);
        }
        _ => {}
    }
}

fn predicate(l: &mut StateLayout, p: &Predicate) {
    match p {
        Predicate::ActionWas(..) | Predicate::CanMoveAgain(_) => l.last_action = true,
        Predicate::LastMoveIn(m) => {
            l.last_action = true;
            mask(l, m);
        }
        Predicate::Equals(v) => v.iter().for_each(|f| function(l, f)),
        Predicate::Exists(m) => mask(l, m),
        Predicate::Function(f) => function(l, f),
        Predicate::GreaterEqual(a, b) | Predicate::LessEqual(a, b) => {
            function(l, a);
            function(l, b);
        }
        Predicate::Passed(_) => l.passes = true,
        Predicate::And(v) | Predicate::Or(v) => v.iter().for_each(|p| predicate(l, p)),
        Predicate::Not(p) => predicate(l, p),
        _ => {}
    }
}
