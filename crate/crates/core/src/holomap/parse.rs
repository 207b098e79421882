//! Recursive-descent parser for map source text.
//!
//! ```text
//! map       := component (';' component)*
//! component := term (('+' | '-') term)*
//! term      := unary (('*' | '/') unary)*
//! unary     := ('-' | '+') unary | power
//! power     := atom ('^' integer)?
//! atom      := number | number 'i' | 'i' | 'z' digits | '(' component ')'
//! ```
//!
//! Constant subexpressions are folded while parsing, except quotients whose
//! denominator is (numerically) zero: those are left for evaluation to report.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::holomap::expr::{Expr, SINGULAR_MODULUS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownVariable(String),
    BadExponent(String),
    BadNumber(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected {t}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable {v}"),
            ParseErrorKind::BadExponent(e) => {
                write!(f, "exponent must be a nonnegative integer, found {e}")
            }
            ParseErrorKind::BadNumber(n) => write!(f, "malformed number {n:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    /// `integer` is set when the literal was plain decimal digits.
    Num {
        value: Complex64,
        integer: Option<u32>,
    },
    Var(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Var(v) => format!("variable {v}"),
            Tok::Sym(c) => format!("{c:?}"),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            let mut plain = true;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                plain &= bytes[i] != b'.';
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                plain = false;
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text = &src[start..i];
            let x: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::BadNumber(text.into()),
            })?;
            let (value, integer) = if i < bytes.len() && bytes[i] == b'i' {
                i += 1;
                (Complex64::new(0.0, x), None)
            } else {
                let integer = if plain { text.parse::<u32>().ok() } else { None };
                (Complex64::new(x, 0.0), integer)
            };
            toks.push((Tok::Num { value, integer }, start));
        } else if c == b'z' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            toks.push((Tok::Var(src[start..i].to_string()), start));
        } else if c == b'i' && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric()) {
            i += 1;
            toks.push((
                Tok::Num {
                    value: Complex64::new(0.0, 1.0),
                    integer: None,
                },
                start,
            ));
        } else if b"+-*/^();".contains(&c) {
            i += 1;
            toks.push((Tok::Sym(c as char), start));
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: start,
                kind: ParseErrorKind::UnexpectedChar(ch),
            });
        }
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            t => ParseErrorKind::UnexpectedToken(t.describe()),
        };
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn eat(&mut self, sym: char) -> bool {
        if *self.peek() == Tok::Sym(sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn map(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = vec![self.sum()?];
        while self.eat(';') {
            out.push(self.sum()?);
        }
        if *self.peek() != Tok::End {
            return Err(self.unexpected());
        }
        Ok(out)
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = fold(Expr::Add(Box::new(lhs), Box::new(self.term()?)));
            } else if self.eat('-') {
                lhs = fold(Expr::Sub(Box::new(lhs), Box::new(self.term()?)));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = fold(Expr::Mul(Box::new(lhs), Box::new(self.unary()?)));
            } else if self.eat('/') {
                lhs = fold(Expr::Div(Box::new(lhs), Box::new(self.unary()?)));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(fold(Expr::Neg(Box::new(self.unary()?))))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let offset = self.offset();
        match self.bump().0 {
            Tok::Num { integer: Some(k), .. } => Ok(fold(Expr::Pow(Box::new(base), k))),
            Tok::End => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
            other => Err(ParseError {
                offset,
                kind: ParseErrorKind::BadExponent(other.describe()),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num { value, .. } => {
                self.bump();
                Ok(Expr::Const(value))
            }
            Tok::Var(name) => {
                self.bump();
                let index = name[1..]
                    .parse::<usize>()
                    .ok()
                    .filter(|_| name[1..].bytes().all(|b| b.is_ascii_digit()))
                    .filter(|&j| j >= 1 && j <= self.dim);
                match index {
                    Some(j) => Ok(Expr::Var(j - 1)),
                    None => Err(ParseError {
                        offset,
                        kind: ParseErrorKind::UnknownVariable(name),
                    }),
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.unexpected());
                }
                Ok(inner)
            }
            _ => Err(self.unexpected()),
        }
    }
}

fn fold(e: Expr) -> Expr {
    use Expr::*;
    let folded = match &e {
        Neg(a) => match **a {
            Const(x) => Some(-x),
            _ => None,
        },
        Pow(a, k) => match **a {
            Const(x) => Some(x.powu(*k)),
            _ => None,
        },
        Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => match (&**a, &**b) {
            (Const(x), Const(y)) => match &e {
                Add(..) => Some(x + y),
                Sub(..) => Some(x - y),
                Mul(..) => Some(x * y),
                _ if y.norm() >= SINGULAR_MODULUS => Some(x / y),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    };
    match folded {
        Some(c) if c.re.is_finite() && c.im.is_finite() => Const(c),
        _ => e,
    }
}

/// Parses `;`-separated components over variables `z1..z{dim}`.
pub(crate) fn parse_components(src: &str, dim: usize) -> Result<Vec<Expr>, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, dim };
    p.map()
}
