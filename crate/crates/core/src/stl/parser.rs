//! Recursive-descent parser for the textual formula grammar:
//!
//! ```text
//! phi  := pred | "!" phi | phi "&&" phi | phi "||" phi
//!       | ("F" | "G") "[" term "," term ")" phi | "(" phi ")"
//! pred := ident ("<" | ">=") term
//! term := number | "$" ident
//! ```
//!
//! `!` binds tighter than `&&`, which binds tighter than `||`; both binary
//! operators associate to the left. A temporal operator applies to the
//! unary term that immediately follows it.

use super::formula::{Comparator, Formula, Interval, Term};
use super::StlError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Param(String),
    Num(f64),
    Bang,
    AndAnd,
    OrOr,
    LParen,
    RParen,
    LBracket,
    Comma,
    Lt,
    Ge,
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> StlError {
        StlError::Syntax {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.offset();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        let end = self.offset();
        self.src[start..end].to_owned()
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, Pos)>, StlError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let pos = Pos {
                line: self.line,
                col: self.col,
            };
            let Some(c) = self.peek() else {
                out.push((Tok::Eof, pos));
                return Ok(out);
            };
            let tok = match c {
                '!' => {
                    self.bump();
                    Tok::Bang
                }
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                '[' => {
                    self.bump();
                    Tok::LBracket
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '&' | '|' => {
                    self.bump();
                    if self.peek() != Some(c) {
                        return Err(self.error(pos, format!("expected '{c}{c}'")));
                    }
                    self.bump();
                    if c == '&' {
                        Tok::AndAnd
                    } else {
                        Tok::OrOr
                    }
                }
                '<' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        return Err(self.error(pos, "unknown comparator '<='; use '<' or '>='"));
                    }
                    Tok::Lt
                }
                '>' => {
                    self.bump();
                    if self.peek() != Some('=') {
                        return Err(self.error(pos, "unknown comparator '>'; use '<' or '>='"));
                    }
                    self.bump();
                    Tok::Ge
                }
                '=' => return Err(self.error(pos, "unknown comparator '='; use '<' or '>='")),
                '$' => {
                    self.bump();
                    let name = self.ident();
                    if name.is_empty() || name.starts_with(|c: char| c.is_ascii_digit()) {
                        return Err(self.error(pos, "expected parameter name after '$'"));
                    }
                    Tok::Param(name)
                }
                c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                    let start = self.offset();
                    self.bump();
                    while let Some(c) = self.peek() {
                        let prev = self.src[..self.offset()].chars().last();
                        let exponent_sign =
                            (c == '-' || c == '+') && matches!(prev, Some('e') | Some('E'));
                        if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exponent_sign {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let text = &self.src[start..self.offset()];
                    let v: f64 = text
                        .parse()
                        .map_err(|_| self.error(pos, format!("malformed number '{text}'")))?;
                    Tok::Num(v)
                }
                c if c.is_ascii_alphabetic() || c == '_' => Tok::Ident(self.ident()),
                other => return Err(self.error(pos, format!("unexpected character '{other}'"))),
            };
            out.push((tok, pos));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> StlError {
        let p = self.pos();
        StlError::Syntax {
            line: p.line,
            col: p.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), StlError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn or_expr(&mut self) -> Result<Formula<Term>, StlError> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::OrOr {
            self.next();
            let rhs = self.and_expr()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Formula<Term>, StlError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::AndAnd {
            self.next();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula<Term>, StlError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.next();
                let inner = self.or_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(op) if (op == "F" || op == "G") && *self.peek2() == Tok::LBracket => {
                self.next();
                let interval = self.interval()?;
                let body = Box::new(self.unary()?);
                Ok(if op == "F" {
                    Formula::Finally(interval, body)
                } else {
                    Formula::Globally(interval, body)
                })
            }
            Tok::Ident(_) => self.predicate(),
            other => Err(self.error(format!("expected a formula, found {}", describe(&other)))),
        }
    }

    fn interval(&mut self) -> Result<Interval<Term>, StlError> {
        let open = self.pos();
        self.expect(Tok::LBracket, "'['")?;
        let start = self.term()?;
        self.expect(Tok::Comma, "','")?;
        let end = self.term()?;
        self.expect(Tok::RParen, "')' closing the interval")?;
        if let (Term::Const(a), Term::Const(b)) = (&start, &end) {
            if !(*a >= 0.0 && a < b) {
                return Err(StlError::MalformedInterval {
                    line: open.line,
                    col: open.col,
                    start: *a,
                    end: *b,
                });
            }
        }
        Ok(Interval { start, end })
    }

    fn predicate(&mut self) -> Result<Formula<Term>, StlError> {
        let Tok::Ident(channel) = self.next() else {
            unreachable!("checked by caller")
        };
        let cmp = match self.peek() {
            Tok::Lt => Comparator::Lt,
            Tok::Ge => Comparator::Ge,
            other => {
                return Err(self.error(format!(
                    "expected comparator '<' or '>=' after '{channel}', found {}",
                    describe(other)
                )))
            }
        };
        self.next();
        let threshold = self.term()?;
        Ok(Formula::Predicate {
            channel,
            cmp,
            threshold,
        })
    }

    fn term(&mut self) -> Result<Term, StlError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.next();
                Ok(Term::Const(v))
            }
            Tok::Param(name) => {
                self.next();
                Ok(Term::Param(name))
            }
            other => Err(self.error(format!(
                "expected number or $parameter, found {}",
                describe(&other)
            ))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Param(s) => format!("'${s}'"),
        Tok::Num(v) => format!("'{v}'"),
        Tok::Bang => "'!'".into(),
        Tok::AndAnd => "'&&'".into(),
        Tok::OrOr => "'||'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBracket => "'['".into(),
        Tok::Comma => "','".into(),
        Tok::Lt => "'<'".into(),
        Tok::Ge => "'>='".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses formula text into a (possibly parametric) AST.
pub fn parse_formula(text: &str) -> Result<Formula<Term>, StlError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut parser = Parser { toks, at: 0 };
    let phi = parser.or_expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(format!("unexpected {}", describe(parser.peek()))));
    }
    Ok(phi)
}
