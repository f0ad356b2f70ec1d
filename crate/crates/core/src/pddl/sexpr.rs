//! Minimal s-expression reader with source positions.
//!
//! PDDL is case-insensitive, so every symbol is lowercased on the way in.
//! Comments start with `;` and run to the end of the line.

use super::PddlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Symbol(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Symbol(..) => None,
        }
    }

    /// Head symbol of a list, e.g. `and` for `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|items| items.first())
            .and_then(Sexp::as_symbol)
    }
}

pub fn syntax(pos: Pos, msg: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

/// Read every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, PddlError> {
    let mut reader = Reader::new(text);
    let mut out = Vec::new();
    loop {
        reader.skip_trivia();
        if reader.peek().is_none() {
            return Ok(out);
        }
        out.push(reader.read()?);
    }
}

/// Read exactly one top-level expression.
pub fn parse_one(text: &str) -> Result<Sexp, PddlError> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(syntax(Pos { line: 1, col: 1 }, "empty input")),
        _ => Err(syntax(all[1].pos(), "unexpected trailing expression")),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, PddlError> {
        self.skip_trivia();
        let start = self.pos();
        match self.peek() {
            None => Err(syntax(start, "unexpected end of input")),
            Some(')') => Err(syntax(start, "unbalanced ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(syntax(start, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut sym = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.push(c.to_ascii_lowercase());
                    self.bump();
                }
                Ok(Sexp::Symbol(sym, start))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let s = parse_one("(a (B c)\n  ; note\n  d)").unwrap();
        let items = s.as_list().unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[1].head(), Some("b"));
        assert_eq!(items[2].pos(), Pos { line: 3, col: 3 });
    }

    #[test]
    fn unclosed_paren_reports_opening_position() {
        match parse_one("\n  (a (b)") {
            Err(PddlError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stray_close_paren_is_an_error() {
        assert!(parse_all("(a))").is_err());
    }
}
