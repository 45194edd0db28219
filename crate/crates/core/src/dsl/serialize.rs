//! Canonical pretty printer. `parse_game(&serialize(&g)) == g` for every
//! parsed program, and printing is a fixed point after one pass.

use super::ast::*;
use super::keywords::*;
use crate::topology::BoardShape;

const WIDTH: usize = 88;
const INDENT: usize = 4;

enum S {
    Atom(String),
    List(Vec<S>),
    Key(&'static str, Box<S>),
}

fn atom(s: impl Into<String>) -> S {
    S::Atom(s.into())
}

fn quoted(s: &str) -> S {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    S::Atom(out)
}

fn form(head: &str, args: Vec<S>) -> S {
    let mut items = Vec::with_capacity(args.len() + 1);
    items.push(atom(head));
    items.extend(args);
    S::List(items)
}

fn key(name: &'static str, value: S) -> S {
    S::Key(name, Box::new(value))
}

impl S {
    fn flat(&self, out: &mut String) {
        match self {
            S::Atom(a) => out.push_str(a),
            S::Key(k, v) => {
                out.push_str(k);
                out.push(':');
                v.flat(out);
            }
            S::List(items) => {
                out.push('(');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    item.flat(out);
                }
                out.push(')');
            }
        }
    }

    fn flat_string(&self) -> String {
        let mut s = String::new();
        self.flat(&mut s);
        s
    }

    fn pretty(&self, indent: usize, out: &mut String) {
        let flat = self.flat_string();
        let items = match self {
            S::List(items) if indent + flat.len() > WIDTH && items.len() > 1 => items,
            _ => {
                out.push_str(&flat);
                return;
            }
        };
        // Keep the head and any leading atoms on the first line.
        out.push('(');
        let mut split = items.len();
        for (i, item) in items.iter().enumerate() {
            if i > 0 && !matches!(item, S::Atom(_)) {
                split = i;
                break;
            }
            if i > 0 {
                out.push(' ');
            }
            item.flat(out);
        }
        for item in &items[split..] {
            out.push('\n');
            out.extend(std::iter::repeat_n(' ', indent + INDENT));
            item.pretty(indent + INDENT, out);
        }
        out.push(')');
    }
}

/// Prints `spec` in canonical layout.
pub fn serialize(spec: &GameSpec) -> String {
    let mut out = String::new();
    game(spec).pretty(0, &mut out);
    out.push('\n');
    out
}

/// Single-line rendering of one mask, used in diagnostics.
pub fn mask_to_string(m: &Mask) -> String {
    mask(m).flat_string()
}

/// Single-line rendering of one predicate, used in diagnostics.
pub fn predicate_to_string(p: &Predicate) -> String {
    predicate(p).flat_string()
}

fn game(g: &GameSpec) -> S {
    let mut rules = Vec::new();
    if !g.start.is_empty() {
        rules.push(form(
            "start",
            g.start
                .iter()
                .map(|s| form("place", vec![quoted(&s.piece), atom(player_str(s.player)), cell_set(&s.cells)]))
                .collect(),
        ));
    }
    rules.push(form("play", g.phases.iter().map(phase).collect()));
    rules.push(form(
        "end",
        g.end_rules.iter().map(|r| form("if", vec![predicate(&r.condition), end_result(r.result)])).collect(),
    ));

    let mut items = vec![quoted(&g.name), players(&g.players), equipment(&g.equipment), form("rules", rules)];
    if !g.rendering.is_empty() {
        items.push(form("rendering", g.rendering.iter().map(rendering_detail).collect()));
    }
    form("game", items)
}

fn players(p: &PlayersSpec) -> S {
    let mut args = vec![atom(p.count.to_string())];
    if let Some([a, b]) = p.forward {
        args.push(form(
            "set_forward",
            vec![
                S::List(vec![atom("P1"), atom(facing_str(a))]),
                S::List(vec![atom("P2"), atom(facing_str(b))]),
            ],
        ));
    }
    form("players", args)
}

fn shape(b: &BoardShape) -> S {
    match *b {
        BoardShape::Square(n) => form("square", vec![atom(n.to_string())]),
        BoardShape::Rectangle(r, c) => form("rectangle", vec![atom(r.to_string()), atom(c.to_string())]),
        BoardShape::Hexagon(d) => form("hexagon", vec![atom(d.to_string())]),
        BoardShape::HexRectangle(r, c) => form("hex_rectangle", vec![atom(r.to_string()), atom(c.to_string())]),
    }
}

fn equipment(e: &Equipment) -> S {
    let pieces = e
        .pieces
        .iter()
        .map(|p| {
            let owner = match p.owner {
                PieceOwner::Both => "both",
                PieceOwner::Player(pl) => player_str(pl),
            };
            S::List(vec![quoted(&p.name), atom(owner)])
        })
        .collect();
    let mut items = vec![form("board", vec![shape(&e.board)]), form("pieces", pieces)];
    if !e.regions.is_empty() {
        items.push(form(
            "regions",
            e.regions.iter().map(|r| S::List(vec![quoted(&r.name), cell_set(&r.cells)])).collect(),
        ));
    }
    form("equipment", items)
}

fn indices(v: &[u64]) -> S {
    S::List(v.iter().map(|i| atom(i.to_string())).collect())
}

fn cell_set(c: &CellSet) -> S {
    match c {
        CellSet::Indices(v) => indices(v),
        CellSet::Masks(m) => multi_mask(m),
    }
}

fn multi_mask(m: &MultiMask) -> S {
    match m {
        MultiMask::Corners => form("corners", vec![]),
        MultiMask::Edges => form("edges", vec![]),
        MultiMask::EdgesNoCorners => form("edgesNoCorners", vec![]),
        MultiMask::Single(m) => mask(m),
        MultiMask::List(v) => S::List(v.iter().map(mask).collect()),
    }
}

fn phase(p: &Phase) -> S {
    let head = match p.kind {
        PhaseKind::Repeat => "repeat",
        PhaseKind::OnceThrough => "once_through",
    };
    let mut args = vec![S::List(p.order.iter().map(|pl| atom(player_str(*pl))).collect()), mechanic(&p.mechanic)];
    if p.force_pass {
        args.push(form("force_pass", vec![]));
    }
    form(head, args)
}

fn mechanic(m: &Mechanic) -> S {
    match m {
        Mechanic::Place(p) => {
            let mut args = vec![quoted(&p.piece)];
            if let Some(o) = p.owner {
                args.push(atom(mover_str(o)));
            }
            args.push(form("destination", vec![mask(&p.destination)]));
            if let Some(r) = &p.result {
                args.push(form("result", vec![predicate(r)]));
            }
            if !p.effects.is_empty() {
                args.push(effects(&p.effects));
            }
            form("place", args)
        }
        Mechanic::Move(m) => {
            let def = if m.or_form {
                form("or", m.alternatives.iter().map(move_type).collect())
            } else {
                move_type(&m.alternatives[0])
            };
            let mut args = vec![def];
            if !m.effects.is_empty() {
                args.push(effects(&m.effects));
            }
            form("move", args)
        }
    }
}

fn direction_arg(d: &DirectionArg) -> S {
    match d {
        DirectionArg::Single(k) => atom(direction_str(*k)),
        DirectionArg::Multi(v) => S::List(v.iter().map(|k| atom(direction_str(*k))).collect()),
    }
}

fn boolean(b: bool) -> S {
    atom(if b { "true" } else { "false" })
}

fn move_type(m: &MoveType) -> S {
    let mut args = vec![quoted(m.piece())];
    if let Some(d) = m.direction() {
        args.push(key("direction", direction_arg(d)));
    }
    let head = match m {
        MoveType::Hop(h) => {
            if let Some(p) = &h.over_piece {
                args.push(key("piece", quoted(p)));
            }
            if let Some(p) = h.hop_over {
                args.push(key("hop_over", atom(player_ref_str(p))));
            }
            if let Some(c) = h.capture {
                args.push(key("capture", boolean(c)));
            }
            "hop"
        }
        MoveType::Slide(s) => {
            if let Some(d) = s.distance {
                args.push(key("distance", atom(d.to_string())));
            }
            "slide"
        }
        MoveType::Step(_) => "step",
    };
    if let Some(p) = m.priority() {
        args.push(key("priority", atom(p.to_string())));
    }
    form(head, args)
}

fn effects(v: &[Effect]) -> S {
    form("effects", v.iter().map(effect).collect())
}

fn effect(e: &Effect) -> S {
    match e {
        Effect::Do(a) => effect_action(a),
        Effect::If { condition, then, otherwise } => {
            let mut args = vec![predicate(condition), effect_action(then)];
            if let Some(o) = otherwise {
                args.push(atom("else"));
                args.push(effect_action(o));
            }
            form("if", args)
        }
    }
}

fn mover_kw(args: &mut Vec<S>, m: Option<MoverOrBoth>) {
    if let Some(m) = m {
        args.push(key("mover", atom(mover_or_both_str(m))));
    }
}

fn effect_action(a: &EffectAction) -> S {
    match a {
        EffectAction::Capture { mask: m, mover, increment_score } => {
            let mut args = vec![mask(m)];
            mover_kw(&mut args, *mover);
            if let Some(b) = increment_score {
                args.push(key("increment_score", boolean(*b)));
            }
            form("capture", args)
        }
        EffectAction::ExtraTurn { who, same_piece } => {
            let mut args = vec![atom(mover_str(*who))];
            if let Some(b) = same_piece {
                args.push(key("same_piece", boolean(*b)));
            }
            form("extra_turn", args)
        }
        EffectAction::Flip { mask: m, mover } => {
            let mut args = vec![mask(m)];
            mover_kw(&mut args, *mover);
            form("flip", args)
        }
        EffectAction::IncrementScore { who, amount } => {
            form("increment_score", vec![atom(mover_str(*who)), function(amount)])
        }
        EffectAction::Promote { from, to, mask: m, mover } => {
            let mut args = vec![quoted(from), quoted(to), mask(m)];
            mover_kw(&mut args, *mover);
            form("promote", args)
        }
        EffectAction::SetScore { who, value } => form("set_score", vec![atom(mover_str(*who)), function(value)]),
    }
}

fn end_result(r: EndResult) -> S {
    match r {
        EndResult::Win(w) => S::List(vec![atom(mover_or_both_str(w)), atom("win")]),
        EndResult::Lose(w) => S::List(vec![atom(mover_or_both_str(w)), atom("lose")]),
        EndResult::Draw => form("draw", vec![]),
        EndResult::ByScore => form("by_score", vec![]),
    }
}

fn rendering_detail(d: &RenderingDetail) -> S {
    match d {
        RenderingDetail::Color(p, c) => form("color", vec![atom(player_str(*p)), atom(color_str(*c))]),
        RenderingDetail::Shape(piece, s) => form("shape", vec![quoted(piece), atom(piece_shape_str(*s))]),
    }
}

fn line_args(l: &LineFn) -> Vec<S> {
    let mut args = vec![quoted(&l.piece), atom(l.length.to_string())];
    if let Some(o) = l.orientation {
        args.push(key("orientation", atom(orientation_str(o))));
    }
    if let Some(e) = l.exact {
        args.push(key("exact", boolean(e)));
    }
    if let Some(p) = l.player {
        args.push(key("player", atom(player_ref_str(p))));
    }
    if let Some(x) = &l.exclude {
        args.push(key("exclude", multi_mask(x)));
    }
    args
}

fn mask(m: &Mask) -> S {
    match m {
        Mask::Adjacent { mask: inner, direction } => {
            let mut args = vec![mask(inner)];
            if let Some(d) = direction {
                args.push(key("direction", direction_arg(d)));
            }
            form("adjacent", args)
        }
        Mask::Captured => form("captured", vec![]),
        Mask::Center => form("center", vec![]),
        Mask::Column(i) => form("column", vec![atom(i.to_string())]),
        Mask::Corners => form("corners", vec![]),
        Mask::CornerCustodial { piece, mover } => {
            let mut args = vec![quoted(piece)];
            mover_kw(&mut args, *mover);
            form("corner_custodial", args)
        }
        Mask::Custodial { piece, length, mover, orientation } => {
            let len = match length {
                CustodialLength::Any => atom("any"),
                CustodialLength::Exactly(n) => atom(n.to_string()),
            };
            let mut args = vec![quoted(piece), len];
            mover_kw(&mut args, *mover);
            if let Some(o) = orientation {
                args.push(key("orientation", atom(orientation_str(*o))));
            }
            form("custodial", args)
        }
        Mask::Edge(e) => form("edge", vec![atom(edge_str(*e))]),
        Mask::Empty => form("empty", vec![]),
        Mask::Hopped => form("hopped", vec![]),
        Mask::Occupied(who) => form("occupied", who.iter().map(|w| atom(mover_str(*w))).collect()),
        Mask::PrevMove(who) => form("prev_move", vec![atom(mover_str(*who))]),
        Mask::Promoted => form("promoted", vec![]),
        Mask::Row(i) => form("row", vec![atom(i.to_string())]),
        Mask::Region(r) => form("region", vec![quoted(r)]),
        Mask::Line(l) => form("line", line_args(l)),
        Mask::And(v) => form("and", v.iter().map(mask).collect()),
        Mask::Or(v) => form("or", v.iter().map(mask).collect()),
        Mask::Not(inner) => form("not", vec![mask(inner)]),
    }
}

fn function(f: &Function) -> S {
    match f {
        Function::Add(v) => form("add", v.iter().map(function).collect()),
        Function::Connected { piece, masks, mover, direction } => {
            let mut args = vec![quoted(piece), multi_mask(masks)];
            mover_kw(&mut args, *mover);
            if let Some(d) = direction {
                args.push(key("direction", direction_arg(d)));
            }
            form("connected", args)
        }
        Function::Constant(n) => atom(n.to_string()),
        Function::Count(m) => form("count", vec![mask(m)]),
        Function::Line(l) => form("line", line_args(l)),
        Function::Multiply(v) => form("multiply", v.iter().map(function).collect()),
        Function::Pattern { piece, pattern, rotate, player, exclude } => {
            let pat = match pattern {
                PatternArg::Offsets { width, indices: idx } => S::List(vec![atom(width.to_string()), indices(idx)]),
                PatternArg::Shape(s) => shape(s),
            };
            let mut args = vec![quoted(piece), pat];
            if let Some(r) = rotate {
                args.push(key("rotate", boolean(*r)));
            }
            if let Some(p) = player {
                args.push(key("player", atom(player_ref_str(*p))));
            }
            if let Some(x) = exclude {
                args.push(key("exclude", multi_mask(x)));
            }
            form("pattern", args)
        }
        Function::Score(who) => form("score", vec![atom(mover_str(*who))]),
        Function::Subtract(a, b) => form("subtract", vec![function(a), function(b)]),
    }
}

fn predicate(p: &Predicate) -> S {
    match p {
        Predicate::ActionWas(who, kind) => form("action_was", vec![atom(mover_str(*who)), atom(move_kind_str(*kind))]),
        Predicate::CanMoveAgain(kind) => form("can_move_again", vec![atom(move_kind_str(*kind))]),
        Predicate::Equals(v) => form("=", v.iter().map(function).collect()),
        Predicate::Exists(m) => form("exists", vec![mask(m)]),
        Predicate::FullBoard => form("full_board", vec![]),
        Predicate::Function(f) => function(f),
        Predicate::GreaterEqual(a, b) => form(">=", vec![function(a), function(b)]),
        Predicate::LastMoveIn(m) => form("last_move_in", vec![mask(m)]),
        Predicate::LessEqual(a, b) => form("<=", vec![function(a), function(b)]),
        Predicate::MoverIs(pl) => form("mover_is", vec![atom(player_str(*pl))]),
        Predicate::NoLegalActions => form("no_legal_actions", vec![]),
        Predicate::Passed(w) => form("passed", vec![atom(mover_or_both_str(*w))]),
        Predicate::And(v) => form("and", v.iter().map(predicate).collect()),
        Predicate::Or(v) => form("or", v.iter().map(predicate).collect()),
        Predicate::Not(inner) => form("not", vec![predicate(inner)]),
    }
}

impl std::fmt::Display for GameSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serialize(self))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_game;
    use super::*;

    #[test]
    fn round_trip_small_program() {
        let text = r#"(game "T" (players 2 (set_forward (P1 up) (P2 down)))
            (equipment (board (square 4)) (pieces ("a" both) ("b" P1)) (regions ("r" (0 1 2)) ("s" ((row 0) (edge left)))))
            (rules (start (place "a" P1 (0 1)) (place "b" P1 (corners)))
              (play (repeat (P1 P2) (move (or (hop "a" direction:(forward_left forward_right) hop_over:opponent capture:true priority:0)
                                              (slide "b" direction:orthogonal distance:2))
                     (effects (if (action_was mover hop) (extra_turn mover same_piece:true) else (set_score mover 3))))))
              (end (if (>= (score mover) (add 2 (count (occupied opponent)))) (mover win))
                   (if (line "a" 3 orientation:diagonal exact:true player:P1 exclude:(edges)) (both lose))
                   (if (full_board) (draw)))))"#;
        let g = parse_game(text).unwrap();
        let printed = serialize(&g);
        let again = parse_game(&printed).unwrap();
        assert_eq!(g, again);
        assert_eq!(printed, serialize(&again));
    }

    #[test]
    fn long_forms_break_lines() {
        let g = parse_game(
            r#"(game "Tic-Tac-Toe" (players 2) (equipment (board (square 3)) (pieces ("stone" both)))
               (rules (play (repeat (P1 P2) (place "stone" (destination (empty)))))
                      (end (if (line "stone" 3) (mover win)) (if (full_board) (draw)))))"#,
        )
        .unwrap();
        let text = serialize(&g);
        assert!(text.contains("(line \"stone\" 3)"));
        assert!(text.lines().count() > 3);
        assert!(text.lines().all(|l| l.len() <= WIDTH + 40));
    }
}
