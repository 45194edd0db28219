//! Recursive descent from the s-expression tree into [`GameSpec`].
//!
//! Keyword arguments (`direction:`, `priority:` ...) may appear in any order
//! but only after all positional arguments of a form.

use super::ast::*;
use super::keywords::*;
use super::sexp::{self, Atom, Node, Pos};
use super::ParseError;
use crate::topology::BoardShape;

type Result<T> = std::result::Result<T, ParseError>;

fn syntax(pos: Pos, expected: &[&str], found: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        column: pos.column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.into(),
    }
}

fn arity(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Arity { line: pos.line, column: pos.column, message: message.into() }
}

fn unknown(pos: Pos, keyword: &str, context: &str) -> ParseError {
    ParseError::UnknownKeyword {
        line: pos.line,
        column: pos.column,
        keyword: keyword.to_string(),
        context: context.to_string(),
    }
}

/// A list form `(head args... key:value...)` being consumed left to right.
struct Form<'a> {
    head: &'a str,
    pos: Pos,
    positional: Vec<&'a Node>,
    at: usize,
    keywords: Vec<(&'a str, &'a Node, Pos, bool)>,
}

impl<'a> Form<'a> {
    fn from_items(head: &'a str, pos: Pos, items: &'a [Node]) -> Result<Self> {
        let mut positional = Vec::new();
        let mut keywords: Vec<(&'a str, &'a Node, Pos, bool)> = Vec::new();
        for item in items {
            match item {
                Node::Keyword { name, value, pos: kpos } => {
                    if keywords.iter().any(|(n, ..)| *n == name.as_str()) {
                        return Err(arity(*kpos, format!("duplicate keyword argument `{name}:` in `({head} ...)`")));
                    }
                    keywords.push((name.as_str(), value.as_ref(), *kpos, false));
                }
                other => {
                    if !keywords.is_empty() {
                        return Err(arity(
                            other.pos(),
                            format!("positional argument {} after keyword arguments in `({head} ...)`", other.describe()),
                        ));
                    }
                    positional.push(other);
                }
            }
        }
        Ok(Form { head, pos, positional, at: 0, keywords })
    }

    fn peek(&self) -> Option<&'a Node> {
        self.positional.get(self.at).copied()
    }

    fn next(&mut self) -> Option<&'a Node> {
        let n = self.peek();
        if n.is_some() {
            self.at += 1;
        }
        n
    }

    fn require(&mut self, what: &str) -> Result<&'a Node> {
        self.next().ok_or_else(|| arity(self.pos, format!("`({} ...)` is missing {what}", self.head)))
    }

    fn keyword(&mut self, name: &str) -> Option<&'a Node> {
        self.keywords.iter_mut().find(|(n, ..)| *n == name).map(|entry| {
            entry.3 = true;
            entry.1
        })
    }

    fn finish(self) -> Result<()> {
        if let Some(extra) = self.positional.get(self.at) {
            return Err(arity(extra.pos(), format!("unexpected {} in `({} ...)`", extra.describe(), self.head)));
        }
        if let Some((name, _, pos, _)) = self.keywords.iter().find(|k| !k.3) {
            return Err(unknown(*pos, &format!("{name}:"), &format!("arguments of `{}`", self.head)));
        }
        Ok(())
    }

    /// Remaining positional arguments (consumes them).
    fn rest(&mut self) -> Vec<&'a Node> {
        let rest = self.positional[self.at..].to_vec();
        self.at = self.positional.len();
        rest
    }
}

fn open_form<'a>(node: &'a Node, expected: &str) -> Result<Form<'a>> {
    match node {
        Node::List { items, pos } => match items.first() {
            Some(Node::Atom { atom: Atom::Ident(head), .. }) => Form::from_items(head, *pos, &items[1..]),
            Some(other) => Err(syntax(other.pos(), &[expected], other.describe())),
            None => Err(syntax(*pos, &[expected], "`()`")),
        },
        other => Err(syntax(other.pos(), &[expected], other.describe())),
    }
}

fn expect_form<'a>(node: &'a Node, head: &str) -> Result<Form<'a>> {
    let expected = format!("`({head} ...)`");
    let form = open_form(node, &expected)?;
    if form.head != head {
        return Err(syntax(node.pos(), &[&expected], node.describe()));
    }
    Ok(form)
}

fn head_of(node: &Node) -> Option<&str> {
    match node {
        Node::List { items, .. } => items.first().and_then(Node::ident),
        _ => None,
    }
}

fn list_items<'a>(node: &'a Node, expected: &str) -> Result<&'a [Node]> {
    match node {
        Node::List { items, .. } => Ok(items),
        other => Err(syntax(other.pos(), &[expected], other.describe())),
    }
}

fn string(node: &Node, what: &str) -> Result<String> {
    match node {
        Node::Atom { atom: Atom::Str(s), .. } => Ok(s.clone()),
        other => Err(syntax(other.pos(), &[what], other.describe())),
    }
}

fn nonneg_int(node: &Node) -> Result<u64> {
    match node {
        Node::Atom { atom: Atom::Int(i), .. } => Ok(*i),
        other => Err(syntax(other.pos(), &["non-negative integer"], other.describe())),
    }
}

fn positive_int(node: &Node) -> Result<u64> {
    match node {
        Node::Atom { atom: Atom::Int(i), .. } if *i > 0 => Ok(*i),
        other => Err(syntax(other.pos(), &["positive integer"], other.describe())),
    }
}

fn odd_int(node: &Node) -> Result<u64> {
    match node {
        Node::Atom { atom: Atom::Int(i), .. } if i % 2 == 1 => Ok(*i),
        other => Err(syntax(other.pos(), &["odd integer"], other.describe())),
    }
}

fn keyword_of<T>(node: &Node, context: &str, table: &[&str], parse: impl Fn(&str) -> Option<T>) -> Result<T> {
    match node {
        Node::Atom { atom: Atom::Ident(s), pos } => parse(s).ok_or_else(|| unknown(*pos, s, context)),
        other => {
            let expected: Vec<String> = table.iter().map(|t| format!("`{t}`")).collect();
            let expected: Vec<&str> = expected.iter().map(String::as_str).collect();
            Err(syntax(other.pos(), &expected, other.describe()))
        }
    }
}

fn boolean(node: &Node) -> Result<bool> {
    keyword_of(node, "boolean", &["true", "false"], |s| match s {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    })
}

fn player(node: &Node) -> Result<Player> {
    keyword_of(node, "player", PLAYERS, parse_player)
}

fn mover_ref(node: &Node) -> Result<MoverRef> {
    keyword_of(node, "mover reference", MOVERS, parse_mover)
}

fn player_ref(node: &Node) -> Result<PlayerRef> {
    keyword_of(node, "player reference", &["P1", "P2", "mover", "opponent"], parse_player_ref)
}

fn mover_or_both(node: &Node) -> Result<MoverOrBoth> {
    keyword_of(node, "mover reference", &["mover", "opponent", "both"], parse_mover_or_both)
}

fn opt<T>(node: Option<&Node>, f: impl Fn(&Node) -> Result<T>) -> Result<Option<T>> {
    node.map(f).transpose()
}

/// Parses game-description text into a [`GameSpec`].
pub fn parse_game(text: &str) -> Result<GameSpec> {
    let root = sexp::read(text)?;
    game(&root)
}

fn game(node: &Node) -> Result<GameSpec> {
    let mut f = expect_form(node, "game")?;
    let name = string(f.require("a game name")?, "game name string")?;
    let players = players(f.require("`(players ...)`")?)?;
    let equipment = equipment(f.require("`(equipment ...)`")?)?;
    let (start, phases, end_rules) = rules(f.require("`(rules ...)`")?)?;
    let rendering = match f.next() {
        Some(n) => rendering(n)?,
        None => Vec::new(),
    };
    f.finish()?;
    Ok(GameSpec { name, players, equipment, start, phases, end_rules, rendering })
}

fn players(node: &Node) -> Result<PlayersSpec> {
    let mut f = expect_form(node, "players")?;
    let count = positive_int(f.require("a player count")?)?;
    let forward = match f.next() {
        Some(n) => {
            let mut sf = expect_form(n, "set_forward")?;
            let a = facing_assignment(sf.require("a P1 assignment")?, Player::P1)?;
            let b = facing_assignment(sf.require("a P2 assignment")?, Player::P2)?;
            sf.finish()?;
            Some([a, b])
        }
        None => None,
    };
    f.finish()?;
    Ok(PlayersSpec { count, forward })
}

fn facing_assignment(node: &Node, who: Player) -> Result<Facing> {
    let expected = format!("`({} <facing>)`", player_str(who));
    let items = list_items(node, &expected)?;
    match items {
        [p, d] => {
            let got = player(p)?;
            if got != who {
                return Err(syntax(p.pos(), &[&format!("`{}`", player_str(who))], p.describe()));
            }
            keyword_of(d, "facing", FACINGS, parse_facing)
        }
        _ => Err(arity(node.pos(), format!("forward assignment must be {expected}"))),
    }
}

fn equipment(node: &Node) -> Result<Equipment> {
    let mut f = expect_form(node, "equipment")?;
    let mut bf = expect_form(f.require("`(board ...)`")?, "board")?;
    let board = shape(bf.require("a board shape")?)?;
    bf.finish()?;
    let mut pf = expect_form(f.require("`(pieces ...)`")?, "pieces")?;
    let defs = pf.rest();
    if defs.is_empty() {
        return Err(arity(pf.pos, "`(pieces ...)` needs at least one piece definition"));
    }
    let pieces = defs.into_iter().map(piece_def).collect::<Result<Vec<_>>>()?;
    pf.finish()?;
    let regions = match f.next() {
        Some(n) => {
            let mut rf = expect_form(n, "regions")?;
            let defs = rf.rest();
            if defs.is_empty() {
                return Err(arity(rf.pos, "`(regions ...)` needs at least one region definition"));
            }
            let regions = defs.into_iter().map(region_def).collect::<Result<Vec<_>>>()?;
            rf.finish()?;
            regions
        }
        None => Vec::new(),
    };
    f.finish()?;
    Ok(Equipment { board, pieces, regions })
}

fn shape(node: &Node) -> Result<BoardShape> {
    let mut f = open_form(node, "board shape")?;
    let shape = match f.head {
        "square" => BoardShape::Square(positive_int(f.require("a size")?)?),
        "rectangle" => {
            let rows = positive_int(f.require("a row count")?)?;
            BoardShape::Rectangle(rows, positive_int(f.require("a column count")?)?)
        }
        "hexagon" => BoardShape::Hexagon(odd_int(f.require("an odd diameter")?)?),
        "hex_rectangle" => {
            let rows = positive_int(f.require("a row count")?)?;
            BoardShape::HexRectangle(rows, positive_int(f.require("a column count")?)?)
        }
        other => return Err(unknown(node.pos(), other, "board shape")),
    };
    f.finish()?;
    Ok(shape)
}

fn piece_def(node: &Node) -> Result<PieceDef> {
    let items = list_items(node, "`(\"name\" owner)`")?;
    match items {
        [name, owner] => {
            let name = string(name, "piece name string")?;
            let owner = keyword_of(owner, "piece owner", &["P1", "P2", "both"], |s| {
                if s == "both" {
                    Some(PieceOwner::Both)
                } else {
                    parse_player(s).map(PieceOwner::Player)
                }
            })?;
            Ok(PieceDef { name, owner })
        }
        _ => Err(arity(node.pos(), "piece definition must be `(\"name\" P1|P2|both)`")),
    }
}

fn region_def(node: &Node) -> Result<RegionDef> {
    let items = list_items(node, "`(\"name\" cells)`")?;
    match items {
        [name, cells] => Ok(RegionDef { name: string(name, "region name string")?, cells: cell_set(cells)? }),
        _ => Err(arity(node.pos(), "region definition must be `(\"name\" cells)`")),
    }
}

fn indices(node: &Node) -> Result<Vec<u64>> {
    let items = list_items(node, "index list")?;
    if items.is_empty() {
        return Err(syntax(node.pos(), &["non-negative integer"], "`)`"));
    }
    items.iter().map(nonneg_int).collect()
}

fn cell_set(node: &Node) -> Result<CellSet> {
    match node {
        Node::List { items, .. } if matches!(items.first(), Some(Node::Atom { atom: Atom::Int(_), .. })) => {
            Ok(CellSet::Indices(indices(node)?))
        }
        _ => Ok(CellSet::Masks(multi_mask(node)?)),
    }
}

fn multi_mask(node: &Node) -> Result<MultiMask> {
    match node {
        Node::List { items, pos } => match items.first() {
            Some(Node::List { .. }) => Ok(MultiMask::List(items.iter().map(mask).collect::<Result<_>>()?)),
            Some(Node::Atom { atom: Atom::Ident(head), .. }) => {
                let special = match head.as_str() {
                    "corners" => Some(MultiMask::Corners),
                    "edges" => Some(MultiMask::Edges),
                    "edgesNoCorners" => Some(MultiMask::EdgesNoCorners),
                    _ => None,
                };
                match special {
                    Some(m) => {
                        Form::from_items(head, *pos, &items[1..])?.finish()?;
                        Ok(m)
                    }
                    None => Ok(MultiMask::Single(Box::new(mask(node)?))),
                }
            }
            Some(other) => Err(syntax(other.pos(), &["mask"], other.describe())),
            None => Err(syntax(*pos, &["mask"], "`()`")),
        },
        other => Err(syntax(other.pos(), &["mask"], other.describe())),
    }
}

fn rules(node: &Node) -> Result<(Vec<StartPlace>, Vec<Phase>, Vec<EndRule>)> {
    let mut f = expect_form(node, "rules")?;
    let mut start = Vec::new();
    if f.peek().and_then(head_of) == Some("start") {
        let mut sf = expect_form(f.next().unwrap(), "start")?;
        let places = sf.rest();
        if places.is_empty() {
            return Err(arity(sf.pos, "`(start ...)` needs at least one rule"));
        }
        for p in places {
            let mut pf = expect_form(p, "place")?;
            let piece = string(pf.require("a piece name")?, "piece name string")?;
            let player = player(pf.require("a player")?)?;
            let cells = cell_set(pf.require("cells")?)?;
            pf.finish()?;
            start.push(StartPlace { piece, player, cells });
        }
        sf.finish()?;
    }
    let mut pf = expect_form(f.require("`(play ...)`")?, "play")?;
    let phase_nodes = pf.rest();
    if phase_nodes.is_empty() {
        return Err(arity(pf.pos, "`(play ...)` needs at least one phase"));
    }
    let phases = phase_nodes.into_iter().map(phase).collect::<Result<Vec<_>>>()?;
    pf.finish()?;
    let mut ef = expect_form(f.require("`(end ...)`")?, "end")?;
    let end_nodes = ef.rest();
    if end_nodes.is_empty() {
        return Err(arity(ef.pos, "`(end ...)` needs at least one rule"));
    }
    let end_rules = end_nodes.into_iter().map(end_rule).collect::<Result<Vec<_>>>()?;
    ef.finish()?;
    f.finish()?;
    Ok((start, phases, end_rules))
}

fn phase(node: &Node) -> Result<Phase> {
    let mut f = open_form(node, "`(repeat ...)` or `(once_through ...)`")?;
    let kind = match f.head {
        "repeat" => PhaseKind::Repeat,
        "once_through" => PhaseKind::OnceThrough,
        other => return Err(unknown(node.pos(), other, "play phase")),
    };
    let order_node = f.require("a mover order")?;
    let order_items = list_items(order_node, "mover order list")?;
    if order_items.is_empty() {
        return Err(syntax(order_node.pos(), &["`P1`", "`P2`"], "`)`"));
    }
    let order = order_items.iter().map(player).collect::<Result<Vec<_>>>()?;
    let mechanic = mechanic(f.require("a play mechanic")?)?;
    let force_pass = match f.next() {
        Some(n) => {
            expect_form(n, "force_pass")?.finish()?;
            true
        }
        None => false,
    };
    f.finish()?;
    Ok(Phase { kind, order, mechanic, force_pass })
}

fn mechanic(node: &Node) -> Result<Mechanic> {
    let mut f = open_form(node, "`(place ...)` or `(move ...)`")?;
    let m = match f.head {
        "place" => {
            let piece = string(f.require("a piece name")?, "piece name string")?;
            let owner = match f.peek() {
                Some(n @ Node::Atom { atom: Atom::Ident(_), .. }) => {
                    f.next();
                    Some(mover_ref(n)?)
                }
                _ => None,
            };
            let mut df = expect_form(f.require("`(destination ...)`")?, "destination")?;
            let destination = mask(df.require("a mask")?)?;
            df.finish()?;
            let result = if f.peek().and_then(head_of) == Some("result") {
                let mut rf = expect_form(f.next().unwrap(), "result")?;
                let p = predicate(rf.require("a predicate")?)?;
                rf.finish()?;
                Some(p)
            } else {
                None
            };
            let effects = match f.next() {
                Some(n) => effects(n)?,
                None => Vec::new(),
            };
            Mechanic::Place(PlaceRule { piece, owner, destination, result, effects })
        }
        "move" => {
            let def = f.require("a move type")?;
            let (alternatives, or_form) = if head_of(def) == Some("or") {
                let mut of = expect_form(def, "or")?;
                let alts = of.rest();
                if alts.is_empty() {
                    return Err(arity(of.pos, "`(or ...)` needs at least one move type"));
                }
                let alts = alts.into_iter().map(move_type).collect::<Result<Vec<_>>>()?;
                of.finish()?;
                (alts, true)
            } else {
                (vec![move_type(def)?], false)
            };
            let effects = match f.next() {
                Some(n) => effects(n)?,
                None => Vec::new(),
            };
            Mechanic::Move(MoveRule { alternatives, or_form, effects })
        }
        other => return Err(unknown(node.pos(), other, "play mechanic")),
    };
    f.finish()?;
    Ok(m)
}

fn direction_arg(node: &Node) -> Result<DirectionArg> {
    match node {
        Node::List { items, pos } => {
            if items.is_empty() {
                return Err(syntax(*pos, &["direction"], "`()`"));
            }
            Ok(DirectionArg::Multi(
                items.iter().map(|n| keyword_of(n, "direction", DIRECTIONS, parse_direction)).collect::<Result<_>>()?,
            ))
        }
        n => Ok(DirectionArg::Single(keyword_of(n, "direction", DIRECTIONS, parse_direction)?)),
    }
}

fn move_type(node: &Node) -> Result<MoveType> {
    let mut f = open_form(node, "`(hop ...)`, `(slide ...)` or `(step ...)`")?;
    let piece = string(f.require("a piece name")?, "piece name string")?;
    let direction = opt(f.keyword("direction"), direction_arg)?;
    let priority = opt(f.keyword("priority"), nonneg_int)?;
    let m = match f.head {
        "hop" => MoveType::Hop(HopRule {
            piece,
            direction,
            over_piece: opt(f.keyword("piece"), |n| string(n, "piece name string"))?,
            hop_over: opt(f.keyword("hop_over"), player_ref)?,
            capture: opt(f.keyword("capture"), boolean)?,
            priority,
        }),
        "slide" => MoveType::Slide(SlideRule {
            piece,
            direction,
            distance: opt(f.keyword("distance"), positive_int)?,
            priority,
        }),
        "step" => MoveType::Step(StepRule { piece, direction, priority }),
        other => return Err(unknown(node.pos(), other, "move type")),
    };
    f.finish()?;
    Ok(m)
}

fn effects(node: &Node) -> Result<Vec<Effect>> {
    let mut f = expect_form(node, "effects")?;
    let items = f.rest();
    if items.is_empty() {
        return Err(arity(f.pos, "`(effects ...)` needs at least one effect"));
    }
    let out = items.into_iter().map(effect).collect::<Result<Vec<_>>>()?;
    f.finish()?;
    Ok(out)
}

fn effect(node: &Node) -> Result<Effect> {
    if head_of(node) == Some("if") {
        let mut f = expect_form(node, "if")?;
        let condition = predicate(f.require("a condition")?)?;
        let then = effect_action(f.require("an effect")?)?;
        let otherwise = match f.next() {
            Some(kw) => {
                if kw.ident() != Some("else") {
                    return Err(syntax(kw.pos(), &["`else`"], kw.describe()));
                }
                Some(effect_action(f.require("an effect after `else`")?)?)
            }
            None => None,
        };
        f.finish()?;
        Ok(Effect::If { condition, then, otherwise })
    } else {
        Ok(Effect::Do(effect_action(node)?))
    }
}

fn effect_action(node: &Node) -> Result<EffectAction> {
    let mut f = open_form(node, "effect")?;
    let e = match f.head {
        "capture" => EffectAction::Capture {
            mask: mask(f.require("a mask")?)?,
            mover: opt(f.keyword("mover"), mover_or_both)?,
            increment_score: opt(f.keyword("increment_score"), boolean)?,
        },
        "extra_turn" => EffectAction::ExtraTurn {
            who: mover_ref(f.require("a mover reference")?)?,
            same_piece: opt(f.keyword("same_piece"), boolean)?,
        },
        "flip" => EffectAction::Flip { mask: mask(f.require("a mask")?)?, mover: opt(f.keyword("mover"), mover_or_both)? },
        "increment_score" => EffectAction::IncrementScore {
            who: mover_ref(f.require("a mover reference")?)?,
            amount: function(f.require("a function")?)?,
        },
        "promote" => EffectAction::Promote {
            from: string(f.require("a piece name")?, "piece name string")?,
            to: string(f.require("a piece name")?, "piece name string")?,
            mask: mask(f.require("a mask")?)?,
            mover: opt(f.keyword("mover"), mover_or_both)?,
        },
        "set_score" => EffectAction::SetScore {
            who: mover_ref(f.require("a mover reference")?)?,
            value: function(f.require("a function")?)?,
        },
        other => return Err(unknown(node.pos(), other, "effect")),
    };
    f.finish()?;
    Ok(e)
}

fn end_rule(node: &Node) -> Result<EndRule> {
    let mut f = expect_form(node, "if")?;
    let condition = predicate(f.require("a condition")?)?;
    let result = end_result(f.require("a result")?)?;
    f.finish()?;
    Ok(EndRule { condition, result })
}

fn end_result(node: &Node) -> Result<EndResult> {
    let items = list_items(node, "end result")?;
    match items {
        [single] => match single.ident() {
            Some("draw") => Ok(EndResult::Draw),
            Some("by_score") => Ok(EndResult::ByScore),
            Some(other) => Err(unknown(single.pos(), other, "end result")),
            None => Err(syntax(single.pos(), &["`draw`", "`by_score`"], single.describe())),
        },
        [who, what] => {
            let who = mover_or_both(who)?;
            match what.ident() {
                Some("win") => Ok(EndResult::Win(who)),
                Some("lose") => Ok(EndResult::Lose(who)),
                Some(other) => Err(unknown(what.pos(), other, "end result")),
                None => Err(syntax(what.pos(), &["`win`", "`lose`"], what.describe())),
            }
        }
        _ => Err(arity(node.pos(), "end result must be `(who win)`, `(who lose)`, `(draw)` or `(by_score)`")),
    }
}

fn rendering(node: &Node) -> Result<Vec<RenderingDetail>> {
    let mut f = expect_form(node, "rendering")?;
    let items = f.rest();
    if items.is_empty() {
        return Err(arity(f.pos, "`(rendering ...)` needs at least one detail"));
    }
    let mut out = Vec::new();
    for item in items {
        let mut d = open_form(item, "`(color ...)` or `(shape ...)`")?;
        out.push(match d.head {
            "color" => {
                let p = player(d.require("a player")?)?;
                RenderingDetail::Color(p, keyword_of(d.require("a color")?, "color", COLORS, parse_color)?)
            }
            "shape" => {
                let piece = string(d.require("a piece name")?, "piece name string")?;
                RenderingDetail::Shape(
                    piece,
                    keyword_of(d.require("a piece shape")?, "piece shape", PIECE_SHAPES, parse_piece_shape)?,
                )
            }
            other => return Err(unknown(item.pos(), other, "rendering detail")),
        });
        d.finish()?;
    }
    f.finish()?;
    Ok(out)
}

fn children<T>(f: &mut Form<'_>, min: usize, each: impl Fn(&Node) -> Result<T>) -> Result<Vec<T>> {
    let items = f.rest();
    if items.len() < min {
        return Err(arity(f.pos, format!("`({} ...)` needs at least {min} argument(s)", f.head)));
    }
    items.into_iter().map(each).collect()
}

pub(crate) fn mask(node: &Node) -> Result<Mask> {
    let mut f = open_form(node, "mask")?;
    let m = match f.head {
        "adjacent" => Mask::Adjacent {
            mask: Box::new(mask(f.require("a mask")?)?),
            direction: opt(f.keyword("direction"), direction_arg)?,
        },
        "captured" => Mask::Captured,
        "center" => Mask::Center,
        "column" => Mask::Column(nonneg_int(f.require("a column index")?)?),
        "corners" => Mask::Corners,
        "corner_custodial" => Mask::CornerCustodial {
            piece: string(f.require("a piece name")?, "piece name string")?,
            mover: opt(f.keyword("mover"), mover_or_both)?,
        },
        "custodial" => {
            let piece = string(f.require("a piece name")?, "piece name string")?;
            let len_node = f.require("a length")?;
            let length = match len_node {
                Node::Atom { atom: Atom::Ident(s), pos } => {
                    if s == "any" {
                        CustodialLength::Any
                    } else {
                        return Err(unknown(*pos, s, "custodial length"));
                    }
                }
                n => CustodialLength::Exactly(positive_int(n)?),
            };
            Mask::Custodial {
                piece,
                length,
                mover: opt(f.keyword("mover"), mover_or_both)?,
                orientation: opt(f.keyword("orientation"), |n| {
                    keyword_of(n, "orientation", ORIENTATIONS, parse_orientation)
                })?,
            }
        }
        "edge" => Mask::Edge(keyword_of(f.require("an edge")?, "edge", EDGES, parse_edge)?),
        "empty" => Mask::Empty,
        "hopped" => Mask::Hopped,
        "occupied" => Mask::Occupied(opt(f.next(), mover_ref)?),
        "prev_move" => Mask::PrevMove(mover_ref(f.require("a mover reference")?)?),
        "promoted" => Mask::Promoted,
        "row" => Mask::Row(nonneg_int(f.require("a row index")?)?),
        "region" => Mask::Region(string(f.require("a region name")?, "region name string")?),
        "line" => Mask::Line(line_fn(&mut f)?),
        "and" => Mask::And(children(&mut f, 1, mask)?),
        "or" => Mask::Or(children(&mut f, 1, mask)?),
        "not" => Mask::Not(Box::new(mask(f.require("a mask")?)?)),
        other => return Err(unknown(node.pos(), other, "mask")),
    };
    f.finish()?;
    Ok(m)
}

fn line_fn(f: &mut Form<'_>) -> Result<LineFn> {
    Ok(LineFn {
        piece: string(f.require("a piece name")?, "piece name string")?,
        length: positive_int(f.require("a line length")?)?,
        orientation: opt(f.keyword("orientation"), |n| keyword_of(n, "orientation", ORIENTATIONS, parse_orientation))?,
        exact: opt(f.keyword("exact"), boolean)?,
        player: opt(f.keyword("player"), player_ref)?,
        exclude: opt(f.keyword("exclude"), multi_mask)?,
    })
}

pub(crate) fn function(node: &Node) -> Result<Function> {
    if let Node::Atom { atom: Atom::Int(_), .. } = node {
        return Ok(Function::Constant(positive_int(node)?));
    }
    let mut f = open_form(node, "function")?;
    let out = match f.head {
        "add" => Function::Add(children(&mut f, 1, function)?),
        "multiply" => Function::Multiply(children(&mut f, 1, function)?),
        "subtract" => {
            let a = function(f.require("two functions")?)?;
            let b = function(f.require("two functions")?)?;
            Function::Subtract(Box::new(a), Box::new(b))
        }
        "count" => Function::Count(Box::new(mask(f.require("a mask")?)?)),
        "score" => Function::Score(mover_ref(f.require("a mover reference")?)?),
        "connected" => Function::Connected {
            piece: string(f.require("a piece name")?, "piece name string")?,
            masks: multi_mask(f.require("masks")?)?,
            mover: opt(f.keyword("mover"), mover_or_both)?,
            direction: opt(f.keyword("direction"), direction_arg)?,
        },
        "line" => Function::Line(line_fn(&mut f)?),
        "pattern" => {
            let piece = string(f.require("a piece name")?, "piece name string")?;
            let pat_node = f.require("a pattern or shape")?;
            let pattern = match pat_node {
                Node::List { items, .. } if matches!(items.first(), Some(Node::Atom { atom: Atom::Int(_), .. })) => {
                    match items.as_slice() {
                        [w, idx] => PatternArg::Offsets { width: positive_int(w)?, indices: indices(idx)? },
                        _ => return Err(arity(pat_node.pos(), "pattern must be `(width (indices...))`")),
                    }
                }
                n => PatternArg::Shape(shape(n)?),
            };
            Function::Pattern {
                piece,
                pattern,
                rotate: opt(f.keyword("rotate"), boolean)?,
                player: opt(f.keyword("player"), player_ref)?,
                exclude: opt(f.keyword("exclude"), multi_mask)?,
            }
        }
        other => return Err(unknown(node.pos(), other, "function")),
    };
    f.finish()?;
    Ok(out)
}

pub(crate) fn predicate(node: &Node) -> Result<Predicate> {
    let head = match node {
        Node::Atom { atom: Atom::Int(_), .. } => return Ok(Predicate::Function(function(node)?)),
        _ => head_of(node),
    };
    if let Some(h) = head {
        if FUNCTION_HEADS.contains(&h) {
            return Ok(Predicate::Function(function(node)?));
        }
    }
    let mut f = open_form(node, "predicate")?;
    let p = match f.head {
        "action_was" => {
            let who = mover_ref(f.require("a mover reference")?)?;
            Predicate::ActionWas(who, keyword_of(f.require("a move type")?, "move type", MOVE_KINDS, parse_move_kind)?)
        }
        "can_move_again" => {
            Predicate::CanMoveAgain(keyword_of(f.require("a move type")?, "move type", MOVE_KINDS, parse_move_kind)?)
        }
        "=" => Predicate::Equals(children(&mut f, 1, function)?),
        "exists" => Predicate::Exists(mask(f.require("a mask")?)?),
        "full_board" => Predicate::FullBoard,
        ">=" => {
            let a = function(f.require("two functions")?)?;
            Predicate::GreaterEqual(a, function(f.require("two functions")?)?)
        }
        "<=" => {
            let a = function(f.require("two functions")?)?;
            Predicate::LessEqual(a, function(f.require("two functions")?)?)
        }
        "last_move_in" => Predicate::LastMoveIn(mask(f.require("a mask")?)?),
        "mover_is" => Predicate::MoverIs(player(f.require("a player")?)?),
        "no_legal_actions" => Predicate::NoLegalActions,
        "passed" => Predicate::Passed(mover_or_both(f.require("a mover reference")?)?),
        "and" => Predicate::And(children(&mut f, 1, predicate)?),
        "or" => Predicate::Or(children(&mut f, 1, predicate)?),
        "not" => Predicate::Not(Box::new(predicate(f.require("a predicate")?)?)),
        other => return Err(unknown(node.pos(), other, "predicate")),
    };
    f.finish()?;
    Ok(p)
}
