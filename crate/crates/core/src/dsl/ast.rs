//! Typed syntax tree for game programs.
//!
//! Every production of the game grammar has a node here. Optional grammar
//! arguments stay `Option` so that printing a parsed program reproduces the
//! same tree.

use serde::{Deserialize, Serialize};

pub use crate::topology::BoardShape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub const ALL: [Player; 2] = [Player::P1, Player::P2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Player {
        if i == 0 {
            Player::P1
        } else {
            Player::P2
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }
}

/// `mover` / `opponent`, resolved against the acting player at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoverRef {
    Mover,
    Opponent,
}

impl MoverRef {
    pub fn resolve(self, mover: Player) -> Player {
        match self {
            MoverRef::Mover => mover,
            MoverRef::Opponent => mover.other(),
        }
    }
}

/// `P1 | P2 | mover | opponent`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlayerRef {
    Player(Player),
    Relative(MoverRef),
}

impl PlayerRef {
    pub fn resolve(self, mover: Player) -> Player {
        match self {
            PlayerRef::Player(p) => p,
            PlayerRef::Relative(r) => r.resolve(mover),
        }
    }
}

/// `mover | opponent | both`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoverOrBoth {
    Relative(MoverRef),
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PieceOwner {
    Player(Player),
    Both,
}

/// Absolute facing used by `set_forward`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Facing {
    Up,
    Down,
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub name: String,
    pub players: PlayersSpec,
    pub equipment: Equipment,
    pub start: Vec<StartPlace>,
    pub phases: Vec<Phase>,
    pub end_rules: Vec<EndRule>,
    pub rendering: Vec<RenderingDetail>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayersSpec {
    pub count: u64,
    /// Forward facing of P1 and P2.
    pub forward: Option<[Facing; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equipment {
    pub board: BoardShape,
    pub pieces: Vec<PieceDef>,
    pub regions: Vec<RegionDef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PieceDef {
    pub name: String,
    pub owner: PieceOwner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionDef {
    pub name: String,
    pub cells: CellSet,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellSet {
    Indices(Vec<u64>),
    Masks(MultiMask),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartPlace {
    pub piece: String,
    pub player: Player,
    pub cells: CellSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    OnceThrough,
    Repeat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub kind: PhaseKind,
    pub order: Vec<Player>,
    pub mechanic: Mechanic,
    pub force_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mechanic {
    Place(PlaceRule),
    Move(MoveRule),
}

impl Mechanic {
    pub fn effects(&self) -> &[Effect] {
        match self {
            Mechanic::Place(p) => &p.effects,
            Mechanic::Move(m) => &m.effects,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaceRule {
    pub piece: String,
    pub owner: Option<MoverRef>,
    pub destination: Mask,
    pub result: Option<Predicate>,
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveRule {
    pub alternatives: Vec<MoveType>,
    /// Whether the alternatives were written inside `(or ...)`.
    pub or_form: bool,
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Hop,
    Slide,
    Step,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MoveType {
    Hop(HopRule),
    Slide(SlideRule),
    Step(StepRule),
}

impl MoveType {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveType::Hop(_) => MoveKind::Hop,
            MoveType::Slide(_) => MoveKind::Slide,
            MoveType::Step(_) => MoveKind::Step,
        }
    }

    pub fn piece(&self) -> &str {
        match self {
            MoveType::Hop(h) => &h.piece,
            MoveType::Slide(s) => &s.piece,
            MoveType::Step(s) => &s.piece,
        }
    }

    pub fn direction(&self) -> Option<&DirectionArg> {
        match self {
            MoveType::Hop(h) => h.direction.as_ref(),
            MoveType::Slide(s) => s.direction.as_ref(),
            MoveType::Step(s) => s.direction.as_ref(),
        }
    }

    pub fn priority(&self) -> Option<u64> {
        match self {
            MoveType::Hop(h) => h.priority,
            MoveType::Slide(s) => s.priority,
            MoveType::Step(s) => s.priority,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopRule {
    pub piece: String,
    pub direction: Option<DirectionArg>,
    /// Piece type that may be hopped over (`piece:`).
    pub over_piece: Option<String>,
    pub hop_over: Option<PlayerRef>,
    pub capture: Option<bool>,
    pub priority: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlideRule {
    pub piece: String,
    pub direction: Option<DirectionArg>,
    pub distance: Option<u64>,
    pub priority: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRule {
    pub piece: String,
    pub direction: Option<DirectionArg>,
    pub priority: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectionKw {
    Up,
    Down,
    Left,
    Right,
    UpLeft,
    UpRight,
    DownLeft,
    DownRight,
    Vertical,
    Horizontal,
    Orthogonal,
    Diagonal,
    BackDiagonal,
    ForwardDiagonal,
    Any,
    Forward,
    Backward,
    ForwardLeft,
    ForwardRight,
    BackwardLeft,
    BackwardRight,
}

impl DirectionKw {
    pub fn is_relative(self) -> bool {
        matches!(
            self,
            DirectionKw::Forward
                | DirectionKw::Backward
                | DirectionKw::ForwardLeft
                | DirectionKw::ForwardRight
                | DirectionKw::BackwardLeft
                | DirectionKw::BackwardRight
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DirectionArg {
    Single(DirectionKw),
    Multi(Vec<DirectionKw>),
}

impl DirectionArg {
    pub fn keywords(&self) -> &[DirectionKw] {
        match self {
            DirectionArg::Single(d) => std::slice::from_ref(d),
            DirectionArg::Multi(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
    Orthogonal,
    Diagonal,
    BackDiagonal,
    ForwardDiagonal,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKw {
    Top,
    Bottom,
    Left,
    Right,
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CustodialLength {
    Any,
    Exactly(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mask {
    Adjacent { mask: Box<Mask>, direction: Option<DirectionArg> },
    Captured,
    Center,
    Column(u64),
    Corners,
    CornerCustodial { piece: String, mover: Option<MoverOrBoth> },
    Custodial {
        piece: String,
        length: CustodialLength,
        mover: Option<MoverOrBoth>,
        orientation: Option<Orientation>,
    },
    Edge(EdgeKw),
    Empty,
    Hopped,
    Occupied(Option<MoverRef>),
    PrevMove(MoverRef),
    Promoted,
    Row(u64),
    Region(String),
    Line(LineFn),
    And(Vec<Mask>),
    Or(Vec<Mask>),
    Not(Box<Mask>),
}

/// Argument that may expand into several masks (`connected`, `exclude:`,
/// regions and start placements).
#[derive(Debug, Clone, PartialEq)]
pub enum MultiMask {
    Corners,
    Edges,
    EdgesNoCorners,
    Single(Box<Mask>),
    List(Vec<Mask>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineFn {
    pub piece: String,
    pub length: u64,
    pub orientation: Option<Orientation>,
    pub exact: Option<bool>,
    pub player: Option<PlayerRef>,
    pub exclude: Option<MultiMask>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternArg {
    /// Pattern `width` and cell offsets `i` at row `i / width`, column `i % width`.
    Offsets { width: u64, indices: Vec<u64> },
    Shape(BoardShape),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Function {
    Add(Vec<Function>),
    Connected {
        piece: String,
        masks: MultiMask,
        mover: Option<MoverOrBoth>,
        direction: Option<DirectionArg>,
    },
    Constant(u64),
    Count(Box<Mask>),
    Line(LineFn),
    Multiply(Vec<Function>),
    Pattern {
        piece: String,
        pattern: PatternArg,
        rotate: Option<bool>,
        player: Option<PlayerRef>,
        exclude: Option<MultiMask>,
    },
    Score(MoverRef),
    Subtract(Box<Function>, Box<Function>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    ActionWas(MoverRef, MoveKind),
    CanMoveAgain(MoveKind),
    Equals(Vec<Function>),
    Exists(Mask),
    FullBoard,
    Function(Function),
    GreaterEqual(Function, Function),
    LastMoveIn(Mask),
    LessEqual(Function, Function),
    MoverIs(Player),
    NoLegalActions,
    Passed(MoverOrBoth),
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
    Not(Box<Predicate>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EffectAction {
    Capture { mask: Mask, mover: Option<MoverOrBoth>, increment_score: Option<bool> },
    ExtraTurn { who: MoverRef, same_piece: Option<bool> },
    Flip { mask: Mask, mover: Option<MoverOrBoth> },
    IncrementScore { who: MoverRef, amount: Function },
    Promote { from: String, to: String, mask: Mask, mover: Option<MoverOrBoth> },
    SetScore { who: MoverRef, value: Function },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    Do(EffectAction),
    If { condition: Predicate, then: EffectAction, otherwise: Option<EffectAction> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndRule {
    pub condition: Predicate,
    pub result: EndResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndResult {
    Win(MoverOrBoth),
    Lose(MoverOrBoth),
    Draw,
    ByScore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceShape {
    Circle,
    Square,
    Triangle,
    Star,
    Diamond,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RenderingDetail {
    Color(Player, Color),
    Shape(String, PieceShape),
}
