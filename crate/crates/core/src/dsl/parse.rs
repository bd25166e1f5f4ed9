use std::collections::BTreeSet;
use std::fmt;

use super::{Literal, SequenceExpr};
use crate::dd::Dd;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    Syntax { found: String, expected: Vec<String> },
    UnknownIdentifier { name: String },
}

/// Parse failure at a byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "syntax error at byte 0: empty expression"),
            ParseErrorKind::Syntax { found, expected } => write!(
                f,
                "syntax error at byte {}: found {found}, expected one of {}",
                self.offset,
                expected.join(", ")
            ),
            ParseErrorKind::UnknownIdentifier { name } => {
                write!(f, "unknown identifier '{name}' at byte {} (only n and ln are defined)", self.offset)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Var,
    Ln,
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Invalid(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(s) => format!("number '{s}'"),
            Tok::Var => "'n'".into(),
            Tok::Ln => "'ln'".into(),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Invalid(c) => format!("character '{c}'"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Vec<(usize, Tok)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                out.push((start, Tok::Number(text[start..i].to_string())));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let tok = match &text[start..i] {
                    "n" => Tok::Var,
                    "ln" => Tok::Ln,
                    other => Tok::Ident(other.to_string()),
                };
                out.push((start, tok));
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                i += ch.len_utf8();
                out.push((start, Tok::Invalid(ch)));
                continue;
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    out
}

/// Decimal literal (`12`, `1.5`, `.25`, `3.`) to double-double.
pub(super) fn decimal_to_dd(text: &str) -> Option<Dd> {
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let ten = Dd::from(10.0);
    let mut m = Dd::ZERO;
    for b in int.bytes().chain(frac.bytes()) {
        m = m * ten + Dd::from(f64::from(b - b'0'));
    }
    if frac.is_empty() {
        Some(m)
    } else {
        Some(m / ten.powi(frac.len() as i64))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    expected: BTreeSet<&'static str>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> PResult<&Tok> {
        let (offset, tok) = &self.toks[self.pos];
        if let Tok::Ident(name) = tok {
            return Err(ParseError { offset: *offset, kind: ParseErrorKind::UnknownIdentifier { name: name.clone() } });
        }
        Ok(tok)
    }

    fn advance(&mut self) -> Tok {
        let tok = self.toks[self.pos].1.clone();
        self.pos += 1;
        self.expected.clear();
        tok
    }

    /// Consumes `tok` if it is next; otherwise records it as expected here.
    fn eat(&mut self, tok: Tok, name: &'static str) -> PResult<bool> {
        if *self.peek()? == tok {
            self.advance();
            Ok(true)
        } else {
            self.expected.insert(name);
            Ok(false)
        }
    }

    fn error(&self) -> ParseError {
        let (offset, tok) = &self.toks[self.pos];
        ParseError {
            offset: *offset,
            kind: ParseErrorKind::Syntax {
                found: tok.describe(),
                expected: self.expected.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    fn expr(&mut self) -> PResult<SequenceExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(Tok::Plus, "'+'")? {
                lhs = SequenceExpr::add(lhs, self.term()?);
            } else if self.eat(Tok::Minus, "'-'")? {
                lhs = SequenceExpr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<SequenceExpr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(Tok::Star, "'*'")? {
                lhs = SequenceExpr::mul(lhs, self.factor()?);
            } else if self.eat(Tok::Slash, "'/'")? {
                lhs = SequenceExpr::div(lhs, self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> PResult<SequenceExpr> {
        let base = self.atom()?;
        if self.eat(Tok::Caret, "'^'")? {
            Ok(SequenceExpr::pow(base, self.factor()?))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> PResult<SequenceExpr> {
        if let Tok::Number(text) = self.peek()? {
            let offset = self.toks[self.pos].0;
            let lit = Literal::new(text.clone()).ok_or_else(|| ParseError {
                offset,
                kind: ParseErrorKind::Syntax {
                    found: format!("malformed number '{text}'"),
                    expected: vec!["number".into()],
                },
            })?;
            self.advance();
            return Ok(SequenceExpr::Number(lit));
        }
        self.expected.insert("number");
        if self.eat(Tok::Var, "'n'")? {
            return Ok(SequenceExpr::Var);
        }
        if self.eat(Tok::Ln, "'ln'")? {
            if !self.eat(Tok::LParen, "'('")? {
                return Err(self.error());
            }
            let inner = self.expr()?;
            return self.close(SequenceExpr::ln(inner));
        }
        if self.eat(Tok::LParen, "'('")? {
            let inner = self.expr()?;
            return self.close(inner);
        }
        if self.eat(Tok::Minus, "'-'")? {
            return Ok(SequenceExpr::neg(self.atom()?));
        }
        Err(self.error())
    }

    fn close(&mut self, e: SequenceExpr) -> PResult<SequenceExpr> {
        if self.eat(Tok::RParen, "')'")? {
            Ok(e)
        } else {
            Err(self.error())
        }
    }
}

/// Parses a sequence formula; see the module docs for the grammar.
pub fn parse_sequence(text: &str) -> Result<SequenceExpr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError { offset: 0, kind: ParseErrorKind::Empty });
    }
    let mut p = Parser { toks: lex(text), pos: 0, expected: BTreeSet::new() };
    let e = p.expr()?;
    if !p.eat(Tok::End, "end of input")? {
        return Err(p.error());
    }
    Ok(e)
}
