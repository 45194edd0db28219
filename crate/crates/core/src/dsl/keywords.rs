//! Spelling of enumerated grammar keywords, shared by the parser and printer.

use super::ast::*;

macro_rules! keyword_table {
    ($ty:ty, $fn_str:ident, $fn_parse:ident, $all:ident, { $($variant:path => $text:literal),* $(,)? }) => {
        pub fn $fn_str(v: $ty) -> &'static str {
            match v {
                $($variant => $text,)*
            }
        }

        pub fn $fn_parse(s: &str) -> Option<$ty> {
            match s {
                $($text => Some($variant),)*
                _ => None,
            }
        }

        #[allow(dead_code)]
        pub const $all: &[&str] = &[$($text),*];
    };
}

keyword_table!(DirectionKw, direction_str, parse_direction, DIRECTIONS, {
    DirectionKw::Up => "up",
    DirectionKw::Down => "down",
    DirectionKw::Left => "left",
    DirectionKw::Right => "right",
    DirectionKw::UpLeft => "up_left",
    DirectionKw::UpRight => "up_right",
    DirectionKw::DownLeft => "down_left",
    DirectionKw::DownRight => "down_right",
    DirectionKw::Vertical => "vertical",
    DirectionKw::Horizontal => "horizontal",
    DirectionKw::Orthogonal => "orthogonal",
    DirectionKw::Diagonal => "diagonal",
    DirectionKw::BackDiagonal => "back_diagonal",
    DirectionKw::ForwardDiagonal => "forward_diagonal",
    DirectionKw::Any => "any",
    DirectionKw::Forward => "forward",
    DirectionKw::Backward => "backward",
    DirectionKw::ForwardLeft => "forward_left",
    DirectionKw::ForwardRight => "forward_right",
    DirectionKw::BackwardLeft => "backward_left",
    DirectionKw::BackwardRight => "backward_right",
});

keyword_table!(Orientation, orientation_str, parse_orientation, ORIENTATIONS, {
    Orientation::Vertical => "vertical",
    Orientation::Horizontal => "horizontal",
    Orientation::Orthogonal => "orthogonal",
    Orientation::Diagonal => "diagonal",
    Orientation::BackDiagonal => "back_diagonal",
    Orientation::ForwardDiagonal => "forward_diagonal",
    Orientation::Any => "any",
});

keyword_table!(EdgeKw, edge_str, parse_edge, EDGES, {
    EdgeKw::Top => "top",
    EdgeKw::Bottom => "bottom",
    EdgeKw::Left => "left",
    EdgeKw::Right => "right",
    EdgeKw::TopLeft => "top_left",
    EdgeKw::TopRight => "top_right",
    EdgeKw::BottomLeft => "bottom_left",
    EdgeKw::BottomRight => "bottom_right",
    EdgeKw::Forward => "forward",
    EdgeKw::Backward => "backward",
});

keyword_table!(Facing, facing_str, parse_facing, FACINGS, {
    Facing::Up => "up",
    Facing::Down => "down",
    Facing::Left => "left",
    Facing::Right => "right",
});

keyword_table!(Player, player_str, parse_player, PLAYERS, {
    Player::P1 => "P1",
    Player::P2 => "P2",
});

keyword_table!(MoverRef, mover_str, parse_mover, MOVERS, {
    MoverRef::Mover => "mover",
    MoverRef::Opponent => "opponent",
});

keyword_table!(MoveKind, move_kind_str, parse_move_kind, MOVE_KINDS, {
    MoveKind::Hop => "hop",
    MoveKind::Slide => "slide",
    MoveKind::Step => "step",
});

keyword_table!(Color, color_str, parse_color, COLORS, {
    Color::White => "white",
    Color::Black => "black",
});

keyword_table!(PieceShape, piece_shape_str, parse_piece_shape, PIECE_SHAPES, {
    PieceShape::Circle => "circle",
    PieceShape::Square => "square",
    PieceShape::Triangle => "triangle",
    PieceShape::Star => "star",
    PieceShape::Diamond => "diamond",
});

pub fn player_ref_str(p: PlayerRef) -> &'static str {
    match p {
        PlayerRef::Player(p) => player_str(p),
        PlayerRef::Relative(m) => mover_str(m),
    }
}

pub fn parse_player_ref(s: &str) -> Option<PlayerRef> {
    parse_player(s).map(PlayerRef::Player).or_else(|| parse_mover(s).map(PlayerRef::Relative))
}

pub fn mover_or_both_str(m: MoverOrBoth) -> &'static str {
    match m {
        MoverOrBoth::Relative(m) => mover_str(m),
        MoverOrBoth::Both => "both",
    }
}

pub fn parse_mover_or_both(s: &str) -> Option<MoverOrBoth> {
    if s == "both" {
        Some(MoverOrBoth::Both)
    } else {
        parse_mover(s).map(MoverOrBoth::Relative)
    }
}

pub const MASK_HEADS: &[&str] = &[
    "adjacent",
    "captured",
    "center",
    "column",
    "corners",
    "corner_custodial",
    "custodial",
    "edge",
    "empty",
    "hopped",
    "occupied",
    "prev_move",
    "promoted",
    "row",
    "region",
    "line",
    "and",
    "or",
    "not",
];

pub const FUNCTION_HEADS: &[&str] =
    &["add", "connected", "count", "line", "multiply", "pattern", "score", "subtract"];

pub const PREDICATE_HEADS: &[&str] = &[
    "action_was",
    "can_move_again",
    "=",
    "exists",
    "full_board",
    ">=",
    "last_move_in",
    "<=",
    "mover_is",
    "no_legal_actions",
    "passed",
    "and",
    "or",
    "not",
];

pub const EFFECT_HEADS: &[&str] = &["capture", "extra_turn", "flip", "increment_score", "promote", "set_score"];
