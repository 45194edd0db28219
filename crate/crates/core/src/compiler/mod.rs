//! Turns a validated game program into an executable [`CompiledGame`].

pub mod codec;
pub mod connectivity;
pub mod expr;
pub mod layout;

use std::collections::HashMap;

use thiserror::Error;

use crate::dsl::ast::*;
use crate::dsl::{parse_game, validate, ParseError, ValidationReport};
use crate::topology::{CellMask, Dir, DirSet, Topology, TopologyError};
use codec::{ActionCodec, CodecKind};
use connectivity::Tracker;
use expr::{Builder, IntFn, MaskNode, PredFn};
use layout::StateLayout;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid game:\n{0}")]
    Validation(ValidationReport),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("unknown piece \"{0}\"")]
    UnknownPiece(String),
    #[error("relative directions and edges need set_forward")]
    MissingForward,
    #[error("{0}")]
    Invalid(String),
}

impl CompileError {
    pub fn kind(&self) -> &'static str {
        match self {
            CompileError::Parse(e) => e.kind(),
            CompileError::Validation(_) => "ValidationError",
            CompileError::Topology(TopologyError::MissingForwardAssignment(_)) | CompileError::MissingForward => {
                "MissingForwardAssignment"
            }
            CompileError::Topology(_) => "TopologyError",
            CompileError::UnknownPiece(_) | CompileError::Invalid(_) => "CompileError",
        }
    }
}

pub(crate) struct CompiledPlace {
    pub piece: usize,
    pub owner: MoverRef,
    pub dest: MaskNode,
    pub result: Option<PredFn>,
}

pub(crate) struct CompiledMove {
    pub kind: MoveKind,
    pub piece: usize,
    pub dirs: [DirSet; 2],
    pub over_piece: Option<usize>,
    pub hop_over: Option<PlayerRef>,
    pub capture: bool,
    pub distance: usize,
    pub priority: u64,
}

pub(crate) enum CompiledMechanic {
    Place(CompiledPlace),
    Move {
        alts: Vec<CompiledMove>,
        /// Distinct priorities, ascending.
        classes: Vec<u64>,
    },
}

pub(crate) enum CompiledEffect {
    Capture { mask: MaskNode, owners: Option<MoverOrBoth>, increment_score: bool },
    ExtraTurn { who: MoverRef, same_piece: bool },
    Flip { mask: MaskNode, owners: Option<MoverOrBoth> },
    IncrementScore { who: MoverRef, amount: IntFn },
    SetScore { who: MoverRef, value: IntFn },
    Promote { from: usize, to: usize, mask: MaskNode, owners: Option<MoverOrBoth> },
    If { condition: PredFn, then: Box<CompiledEffect>, otherwise: Option<Box<CompiledEffect>> },
}

pub(crate) struct CompiledPhase {
    pub kind: PhaseKind,
    pub order: Vec<Player>,
    pub force_pass: bool,
    pub mechanic: CompiledMechanic,
    pub effects: Vec<CompiledEffect>,
}

/// An executable game: topology, action codec, state layout and the rule
/// closures. Immutable and shareable across threads.
pub struct CompiledGame {
    pub name: String,
    pub spec: GameSpec,
    pub topology: Topology,
    pub pieces: Vec<String>,
    pub codec: ActionCodec,
    pub layout: StateLayout,
    pub(crate) phases: Vec<CompiledPhase>,
    pub(crate) end_rules: Vec<(PredFn, EndResult)>,
    pub(crate) start: Vec<(usize, Player, CellMask)>,
    pub(crate) trackers: Vec<Tracker>,
}

impl std::fmt::Debug for CompiledGame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompiledGame")
            .field("name", &self.name)
            .field("shape", &self.topology.shape)
            .field("codec", &self.codec)
            .field("layout", &self.layout)
            .finish()
    }
}

/// Parses, validates and compiles a game program.
pub fn compile_str(text: &str) -> Result<CompiledGame, CompileError> {
    compile(&parse_game(text)?)
}

/// Validates and compiles a parsed game.
pub fn compile(spec: &GameSpec) -> Result<CompiledGame, CompileError> {
    let topo = Topology::new(spec.equipment.board)?;
    let report = validate(spec, &topo);
    if !report.is_ok() {
        return Err(CompileError::Validation(report));
    }
    let mut b = Builder {
        spec,
        topo: &topo,
        pieces: spec.equipment.pieces.iter().enumerate().map(|(i, p)| (p.name.clone(), i)).collect(),
        regions: HashMap::new(),
        trackers: Vec::new(),
        phase: None,
    };
    if spec.equipment.pieces.len() > 127 {
        return Err(CompileError::Invalid("too many piece types".into()));
    }
    for r in &spec.equipment.regions {
        let m = b.cell_set(&r.cells)?;
        b.regions.insert(r.name.clone(), m);
    }
    let mut start = Vec::new();
    for s in &spec.start {
        let piece = b.piece(&s.piece)?;
        start.push((piece, s.player, b.cell_set(&s.cells)?));
    }
    let mut phases = Vec::new();
    for (i, phase) in spec.phases.iter().enumerate() {
        b.phase = Some(i);
        let mechanic = match &phase.mechanic {
            Mechanic::Place(p) => CompiledMechanic::Place(CompiledPlace {
                piece: b.piece(&p.piece)?,
                owner: p.owner.unwrap_or(MoverRef::Mover),
                dest: b.mask(&p.destination)?,
                result: p.result.as_ref().map(|r| b.predicate(r)).transpose()?,
            }),
            Mechanic::Move(m) => {
                let mut alts = Vec::new();
                for alt in &m.alternatives {
                    alts.push(compile_move(&mut b, alt)?);
                }
                let mut classes: Vec<u64> = alts.iter().map(|a| a.priority).collect();
                classes.sort_unstable();
                classes.dedup();
                CompiledMechanic::Move { alts, classes }
            }
        };
        let effects = phase.mechanic.effects().iter().map(|e| compile_effect(&mut b, e)).collect::<Result<_, _>>()?;
        phases.push(CompiledPhase {
            kind: phase.kind,
            order: phase.order.clone(),
            force_pass: phase.force_pass,
            mechanic,
            effects,
        });
    }
    b.phase = None;
    let end_rules =
        spec.end_rules.iter().map(|r| Ok((b.predicate(&r.condition)?, r.result))).collect::<Result<_, CompileError>>()?;
    if phases.is_empty() {
        return Err(CompileError::Invalid("game has no phases".into()));
    }
    let mut layout = layout::scan(spec);
    let trackers = std::mem::take(&mut b.trackers);
    layout.connectivity = trackers.len();
    let codec = choose_codec(spec, &topo, &phases, layout.passes);
    Ok(CompiledGame {
        name: spec.name.clone(),
        spec: spec.clone(),
        pieces: spec.equipment.pieces.iter().map(|p| p.name.clone()).collect(),
        topology: topo,
        codec,
        layout,
        phases,
        end_rules,
        start,
        trackers,
    })
}

fn compile_move(b: &mut Builder, m: &MoveType) -> Result<CompiledMove, CompileError> {
    let dirs = b.dirs(m.direction())?;
    let mut out = CompiledMove {
        kind: m.kind(),
        piece: b.piece(m.piece())?,
        dirs,
        over_piece: None,
        hop_over: None,
        capture: false,
        distance: usize::MAX,
        priority: m.priority().unwrap_or(0),
    };
    match m {
        MoveType::Hop(h) => {
            out.over_piece = h.over_piece.as_deref().map(|p| b.piece(p)).transpose()?;
            out.hop_over = h.hop_over;
            out.capture = h.capture.unwrap_or(false);
        }
        MoveType::Slide(s) => out.distance = s.distance.map_or(usize::MAX, |d| d as usize),
        MoveType::Step(_) => {}
    }
    Ok(out)
}

fn compile_action(b: &mut Builder, a: &EffectAction) -> Result<CompiledEffect, CompileError> {
    Ok(match a {
        EffectAction::Capture { mask, mover, increment_score } => CompiledEffect::Capture {
            mask: b.mask(mask)?,
            owners: *mover,
            increment_score: increment_score.unwrap_or(false),
        },
        EffectAction::ExtraTurn { who, same_piece } => {
            CompiledEffect::ExtraTurn { who: *who, same_piece: same_piece.unwrap_or(false) }
        }
        EffectAction::Flip { mask, mover } => CompiledEffect::Flip { mask: b.mask(mask)?, owners: *mover },
        EffectAction::IncrementScore { who, amount } => {
            CompiledEffect::IncrementScore { who: *who, amount: b.function(amount)? }
        }
        EffectAction::SetScore { who, value } => CompiledEffect::SetScore { who: *who, value: b.function(value)? },
        EffectAction::Promote { from, to, mask, mover } => CompiledEffect::Promote {
            from: b.piece(from)?,
            to: b.piece(to)?,
            mask: b.mask(mask)?,
            owners: *mover,
        },
    })
}

fn compile_effect(b: &mut Builder, e: &Effect) -> Result<CompiledEffect, CompileError> {
    match e {
        Effect::Do(a) => compile_action(b, a),
        Effect::If { condition, then, otherwise } => Ok(CompiledEffect::If {
            condition: b.predicate(condition)?,
            then: Box::new(compile_action(b, then)?),
            otherwise: otherwise.as_ref().map(|o| compile_action(b, o).map(Box::new)).transpose()?,
        }),
    }
}

/// Placement when every phase places; a direction codec when one player
/// steps a single piece; otherwise source/destination pairs.
fn choose_codec(spec: &GameSpec, topo: &Topology, phases: &[CompiledPhase], has_pass: bool) -> ActionCodec {
    let n = topo.num_cells;
    if phases.iter().all(|p| matches!(p.mechanic, CompiledMechanic::Place(_))) {
        return ActionCodec::new(CodecKind::Placement, n, vec![], has_pass);
    }
    let movers: std::collections::BTreeSet<Player> = phases.iter().flat_map(|p| p.order.iter().copied()).collect();
    let mut dirs = DirSet::EMPTY;
    let mut step_only = movers.len() == 1 && !has_pass && spec.equipment.pieces.len() == 1;
    for p in phases {
        match &p.mechanic {
            CompiledMechanic::Move { alts, .. } => {
                for a in alts {
                    step_only &= a.kind == MoveKind::Step;
                    if let Some(m) = movers.first() {
                        dirs = dirs.union(a.dirs[m.index()]);
                    }
                }
            }
            CompiledMechanic::Place(_) => step_only = false,
        }
    }
    if step_only {
        let agent = movers.first().copied().unwrap_or(Player::P1);
        let placed: usize = spec
            .start
            .iter()
            .filter(|s| s.player == agent)
            .map(|s| match &s.cells {
                CellSet::Indices(v) => v.len(),
                CellSet::Masks(_) => usize::MAX,
            })
            .fold(0, usize::saturating_add);
        if placed == 1 {
            let order: Vec<Dir> = Dir::ALL.into_iter().filter(|d| dirs.contains(*d)).collect();
            return ActionCodec::new(CodecKind::Gridworld, n, order, false);
        }
    }
    ActionCodec::new(CodecKind::Movement, n, vec![], has_pass)
}
