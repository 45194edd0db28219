//! Tokenizer and s-expression reader for game description text.
//!
//! The reader produces an untyped tree of lists, atoms and `key:value`
//! pairs; the typed AST is built from that tree by [`super::parser`].

use std::fmt;

use super::ParseError;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Str(String),
    Int(u64),
    Ident(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Atom { atom: Atom, pos: Pos },
    List { items: Vec<Node>, pos: Pos },
    /// `name:value`
    Keyword { name: String, value: Box<Node>, pos: Pos },
}

impl Node {
    pub fn pos(&self) -> Pos {
        match self {
            Node::Atom { pos, .. } | Node::List { pos, .. } | Node::Keyword { pos, .. } => *pos,
        }
    }

    pub fn ident(&self) -> Option<&str> {
        match self {
            Node::Atom { atom: Atom::Ident(s), .. } => Some(s),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Node::Atom { atom: Atom::Str(s), .. } => format!("string {s:?}"),
            Node::Atom { atom: Atom::Int(i), .. } => format!("integer {i}"),
            Node::Atom { atom: Atom::Ident(s), .. } => format!("`{s}`"),
            Node::List { items, .. } => match items.first().and_then(Node::ident) {
                Some(head) => format!("`({head} ...)`"),
                None => "a list".to_string(),
            },
            Node::Keyword { name, .. } => format!("`{name}:`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Str(String),
    Int(u64),
    Ident(String),
    Key(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Key(s) => format!("`{s}:`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn syntax(pos: Pos, expected: &[&str], found: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        column: pos.column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c.is_whitespace() {
            bump!();
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
        } else if c == '(' {
            toks.push((Tok::Open, pos));
            bump!();
        } else if c == ')' {
            toks.push((Tok::Close, pos));
            bump!();
        } else if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(syntax(Pos { line, column: col }, &["`\"`"], "end of input")),
                    Some('"') => {
                        bump!();
                        break;
                    }
                    Some('\\') => {
                        bump!();
                        match chars.get(i) {
                            Some(&e @ ('"' | '\\')) => {
                                s.push(e);
                                bump!();
                            }
                            Some('n') => {
                                s.push('\n');
                                bump!();
                            }
                            other => {
                                return Err(syntax(
                                    Pos { line, column: col },
                                    &["escape sequence"],
                                    other.map(|c| format!("`{c}`")).unwrap_or_else(|| "end of input".into()),
                                ))
                            }
                        }
                    }
                    Some(&ch) => {
                        s.push(ch);
                        bump!();
                    }
                }
            }
            toks.push((Tok::Str(s), pos));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            if i < chars.len() && is_ident_start(chars[i]) {
                return Err(syntax(Pos { line, column: col }, &["delimiter after number"], format!("`{}`", chars[i])));
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits
                .parse::<u64>()
                .map_err(|_| syntax(pos, &["integer that fits in 64 bits"], digits.clone()))?;
            toks.push((Tok::Int(value), pos));
        } else if is_ident_start(c) || c == '?' {
            let start = i;
            bump!();
            while i < chars.len() && is_ident_char(chars[i]) {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            if word.starts_with('?') {
                return Err(ParseError::Arity {
                    line: pos.line,
                    column: pos.column,
                    message: format!("variable `{word}` is not supported"),
                });
            }
            if chars.get(i) == Some(&':') {
                bump!();
                toks.push((Tok::Key(word), pos));
            } else {
                toks.push((Tok::Ident(word), pos));
            }
        } else if c == '=' || c == '>' || c == '<' {
            let start = i;
            bump!();
            if i < chars.len() && chars[i] == '=' && c != '=' {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            if word == ">" || word == "<" {
                return Err(syntax(pos, &["`>=`", "`<=`"], format!("`{word}`")));
            }
            toks.push((Tok::Ident(word), pos));
        } else {
            return Err(syntax(pos, &["`(`", "`)`", "string", "integer", "identifier"], format!("`{c}`")));
        }
    }
    toks.push((Tok::Eof, Pos { line, column: col }));
    Ok(toks)
}

struct Reader {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Reader {
    fn peek(&self) -> &(Tok, Pos) {
        &self.toks[self.at]
    }

    fn node(&mut self) -> Result<Node, ParseError> {
        let (tok, pos) = self.toks[self.at].clone();
        self.at += 1;
        match tok {
            Tok::Open => {
                let mut items = Vec::new();
                loop {
                    match &self.peek().0 {
                        Tok::Close => {
                            self.at += 1;
                            return Ok(Node::List { items, pos });
                        }
                        Tok::Eof => {
                            let p = self.peek().1;
                            return Err(syntax(p, &["`)`"], "end of input"));
                        }
                        _ => items.push(self.node()?),
                    }
                }
            }
            Tok::Close | Tok::Eof => Err(syntax(pos, &["`(`", "atom"], tok.describe())),
            Tok::Str(s) => Ok(Node::Atom { atom: Atom::Str(s), pos }),
            Tok::Int(i) => Ok(Node::Atom { atom: Atom::Int(i), pos }),
            Tok::Ident(s) => Ok(Node::Atom { atom: Atom::Ident(s), pos }),
            Tok::Key(name) => {
                if matches!(self.peek().0, Tok::Close | Tok::Eof) {
                    let (t, p) = self.peek().clone();
                    return Err(syntax(p, &[&format!("value for `{name}:`")], t.describe()));
                }
                let value = self.node()?;
                if let Node::Keyword { pos: vp, name: inner, .. } = &value {
                    return Err(syntax(*vp, &[&format!("value for `{name}:`")], format!("`{inner}:`")));
                }
                Ok(Node::Keyword { name, value: Box::new(value), pos })
            }
        }
    }
}

/// Reads exactly one top-level form from `text`.
pub fn read(text: &str) -> Result<Node, ParseError> {
    let toks = tokenize(text)?;
    let mut reader = Reader { toks, at: 0 };
    if reader.peek().0 != Tok::Open {
        let (t, p) = reader.peek().clone();
        return Err(syntax(p, &["`(`"], t.describe()));
    }
    let node = reader.node()?;
    let (t, p) = reader.peek().clone();
    if t != Tok::Eof {
        return Err(syntax(p, &["end of input"], t.describe()));
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_keywords() {
        let node = read("(a \"b\" 3 key:(x y) // trailing\n)").unwrap();
        let Node::List { items, .. } = node else { panic!() };
        assert_eq!(items.len(), 4);
        assert!(matches!(&items[3], Node::Keyword { name, .. } if name == "key"));
    }

    #[test]
    fn unbalanced_reports_end_of_input() {
        let err = read("(game \"X\" (players 2)").unwrap_err();
        match err {
            ParseError::Syntax { line, expected, found, .. } => {
                assert_eq!(line, 1);
                assert_eq!(expected, vec!["`)`".to_string()]);
                assert_eq!(found, "end of input");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn positions_track_lines() {
        let err = read("(a\n  (b\n   ]))").unwrap_err();
        let ParseError::Syntax { line, column, .. } = err else { panic!() };
        assert_eq!((line, column), (3, 4));
    }

    #[test]
    fn comparison_operators_are_idents() {
        let node = read("(>= (score mover) 10)").unwrap();
        let Node::List { items, .. } = node else { panic!() };
        assert_eq!(items[0].ident(), Some(">="));
    }

    #[test]
    fn variables_rejected() {
        assert!(matches!(read("(a ?x)"), Err(ParseError::Arity { .. })));
    }
}
