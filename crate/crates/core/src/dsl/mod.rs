//! A small language for positive sequences `b_n`.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := atom ("^" factor)?
//! atom   := NUMBER | "n" | "ln" "(" expr ")" | "(" expr ")" | "-" atom
//! ```
//!
//! `^` is right-associative and binds tighter than `*` and `/`. The only names are
//! `n` and `ln`. Numbers are decimal literals read into double-double precision.

mod eval;
mod parse;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dd::Dd;

pub use eval::{eval_sequence, EvalError};
pub use parse::{parse_sequence, ParseError, ParseErrorKind};

/// A numeric literal; equality compares values, not spelling.
#[derive(Debug, Clone)]
pub struct Literal {
    text: String,
    value: Dd,
}

impl Literal {
    pub fn new(text: impl Into<String>) -> Option<Literal> {
        let text = text.into();
        let value = parse::decimal_to_dd(&text)?;
        Some(Literal { text, value })
    }

    pub fn value(&self) -> Dd {
        self.value
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Literal) -> bool {
        self.value == other.value
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Literal::new(text.clone()).ok_or_else(|| serde::de::Error::custom(format!("bad literal '{text}'")))
    }
}

/// Syntax tree of a sequence formula in `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum SequenceExpr {
    Number(Literal),
    Var,
    Ln(Box<SequenceExpr>),
    Neg(Box<SequenceExpr>),
    Add(Box<SequenceExpr>, Box<SequenceExpr>),
    Sub(Box<SequenceExpr>, Box<SequenceExpr>),
    Mul(Box<SequenceExpr>, Box<SequenceExpr>),
    Div(Box<SequenceExpr>, Box<SequenceExpr>),
    Pow(Box<SequenceExpr>, Box<SequenceExpr>),
}

// binding strength of each grammar level
const EXPR: u8 = 0;
const TERM: u8 = 1;
const FACTOR: u8 = 2;
const ATOM: u8 = 3;

#[allow(clippy::should_implement_trait)]
impl SequenceExpr {
    pub fn number(text: &str) -> SequenceExpr {
        SequenceExpr::Number(Literal::new(text).expect("valid decimal literal"))
    }

    pub fn ln(e: SequenceExpr) -> SequenceExpr {
        SequenceExpr::Ln(Box::new(e))
    }

    pub fn neg(e: SequenceExpr) -> SequenceExpr {
        SequenceExpr::Neg(Box::new(e))
    }

    pub fn add(a: SequenceExpr, b: SequenceExpr) -> SequenceExpr {
        SequenceExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: SequenceExpr, b: SequenceExpr) -> SequenceExpr {
        SequenceExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: SequenceExpr, b: SequenceExpr) -> SequenceExpr {
        SequenceExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: SequenceExpr, b: SequenceExpr) -> SequenceExpr {
        SequenceExpr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: SequenceExpr, b: SequenceExpr) -> SequenceExpr {
        SequenceExpr::Pow(Box::new(a), Box::new(b))
    }

    fn level(&self) -> u8 {
        match self {
            SequenceExpr::Add(..) | SequenceExpr::Sub(..) => EXPR,
            SequenceExpr::Mul(..) | SequenceExpr::Div(..) => TERM,
            SequenceExpr::Pow(..) => FACTOR,
            _ => ATOM,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            f.write_str("(")?;
            self.write_at(f, EXPR)?;
            return f.write_str(")");
        }
        match self {
            SequenceExpr::Number(lit) => f.write_str(&lit.text),
            SequenceExpr::Var => f.write_str("n"),
            SequenceExpr::Ln(e) => {
                f.write_str("ln(")?;
                e.write_at(f, EXPR)?;
                f.write_str(")")
            }
            SequenceExpr::Neg(e) => {
                f.write_str("-")?;
                e.write_at(f, ATOM)
            }
            SequenceExpr::Add(a, b) => binary(f, a, " + ", b, EXPR, TERM),
            SequenceExpr::Sub(a, b) => binary(f, a, " - ", b, EXPR, TERM),
            SequenceExpr::Mul(a, b) => binary(f, a, "*", b, TERM, FACTOR),
            SequenceExpr::Div(a, b) => binary(f, a, "/", b, TERM, FACTOR),
            SequenceExpr::Pow(a, b) => binary(f, a, "^", b, ATOM, FACTOR),
        }
    }
}

fn binary(
    f: &mut fmt::Formatter<'_>,
    a: &SequenceExpr,
    op: &str,
    b: &SequenceExpr,
    left: u8,
    right: u8,
) -> fmt::Result {
    a.write_at(f, left)?;
    f.write_str(op)?;
    b.write_at(f, right)
}

/// Prints with the fewest parentheses that re-parse to the same tree.
impl fmt::Display for SequenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, EXPR)
    }
}

impl std::str::FromStr for SequenceExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequence(s)
    }
}
