//! Hybrid set/arithmetic expressions over named msets or mfunctions.
//!
//! ```text
//! expr   := union
//! union  := inter ('|' inter)*
//! inter  := addsub ('&' addsub)*
//! addsub := muldiv (('+' | '-') muldiv)*
//! muldiv := unary (('*' | '/') unary)*
//! unary  := '-' unary | atom
//! atom   := IDENT | NUMBER | '(' expr ')'
//! ```
//!
//! `|` is union (max), `&` intersection (min), `+ - * /` act elementwise and
//! unary `-` is the complement. All binary operators are left-associative.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::mfunction::{Grid1D, MFunction, PointwiseOp};
use crate::mset::{CombineOp, Element, Mset};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BinOp {
    Union,
    Intersection,
    Add,
    Subtract,
    Multiply,
    Divide,
}

impl BinOp {
    fn symbol(&self) -> char {
        match self {
            BinOp::Union => '|',
            BinOp::Intersection => '&',
            BinOp::Add => '+',
            BinOp::Subtract => '-',
            BinOp::Multiply => '*',
            BinOp::Divide => '/',
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BinOp::Union => 1,
            BinOp::Intersection => 2,
            BinOp::Add | BinOp::Subtract => 3,
            BinOp::Multiply | BinOp::Divide => 4,
        }
    }

    fn pointwise(&self) -> PointwiseOp {
        match self {
            BinOp::Union => PointwiseOp::Combine(CombineOp::Union),
            BinOp::Intersection => PointwiseOp::Combine(CombineOp::Intersection),
            BinOp::Add => PointwiseOp::Combine(CombineOp::Sum),
            BinOp::Subtract => PointwiseOp::Combine(CombineOp::DiffSigned),
            BinOp::Multiply => PointwiseOp::Combine(CombineOp::Product),
            BinOp::Divide => PointwiseOp::Quotient,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Ident(String),
    Number(f64),
    Negate(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

const UNARY_PRECEDENCE: u8 = 5;
const ATOM_PRECEDENCE: u8 = 6;

impl Expr {
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Negate(Box::new(e))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Ident(_) | Expr::Number(_) => ATOM_PRECEDENCE,
            Expr::Negate(_) => UNARY_PRECEDENCE,
            Expr::Binary(op, ..) => op.precedence(),
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Minimal-parenthesis rendering that reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ident(name) => f.write_str(name),
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Negate(inner) => {
                f.write_str("-")?;
                write_child(f, inner, inner.precedence() < UNARY_PRECEDENCE)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                write_child(f, l, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, r, r.precedence() <= p)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Number(v) => write!(f, "number `{v}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_owned()), start));
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let literal = &text[start..i];
            match literal.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push((Tok::Number(v), start)),
                _ => {
                    return Err(ParseError {
                        offset: start,
                        expected: vec!["number".into()],
                        found: format!("`{literal}`"),
                    })
                }
            }
        } else if b"|&+-*/()".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().expect("in bounds");
            return Err(ParseError {
                offset: i,
                expected: vec!["operator".into(), "operand".into()],
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.cursor].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.cursor].1
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.cursor += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn left_assoc(
        &mut self,
        ops: &[(char, BinOp)],
        next: fn(&mut Self) -> std::result::Result<Expr, ParseError>,
    ) -> std::result::Result<Expr, ParseError> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (c, op) in ops {
                if self.eat(*c) {
                    let rhs = next(self)?;
                    lhs = Expr::binary(op.clone(), lhs, rhs);
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn union(&mut self) -> std::result::Result<Expr, ParseError> {
        self.left_assoc(&[('|', BinOp::Union)], Self::inter)
    }

    fn inter(&mut self) -> std::result::Result<Expr, ParseError> {
        self.left_assoc(&[('&', BinOp::Intersection)], Self::addsub)
    }

    fn addsub(&mut self) -> std::result::Result<Expr, ParseError> {
        self.left_assoc(&[('+', BinOp::Add), ('-', BinOp::Subtract)], Self::muldiv)
    }

    fn muldiv(&mut self) -> std::result::Result<Expr, ParseError> {
        self.left_assoc(&[('*', BinOp::Multiply), ('/', BinOp::Divide)], Self::unary)
    }

    fn unary(&mut self) -> std::result::Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::negate(self.unary()?))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> std::result::Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.cursor += 1;
                Ok(Expr::Ident(name))
            }
            Tok::Number(v) => {
                self.cursor += 1;
                Ok(Expr::Number(v))
            }
            Tok::Sym('(') => {
                self.cursor += 1;
                let inner = self.union()?;
                if !self.eat(')') {
                    return Err(self.error(&["`)`", "operator"]));
                }
                Ok(inner)
            }
            _ => Err(self.error(&["identifier", "number", "`(`", "`-`"])),
        }
    }
}

pub fn parse(text: &str) -> std::result::Result<Expr, ParseError> {
    let mut p = Parser {
        tokens: lex(text)?,
        cursor: 0,
    };
    let e = p.union()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Function(MFunction),
    Mset(Mset),
}

/// Named operands, all mfunctions on one grid or all msets.
#[derive(Debug, Clone)]
pub enum Environment {
    Functions {
        grid: Grid1D,
        bindings: BTreeMap<String, MFunction>,
    },
    Msets {
        universe: Mset,
        bindings: BTreeMap<String, Mset>,
    },
}

impl Environment {
    pub fn functions<I: IntoIterator<Item = (String, MFunction)>>(bindings: I) -> Result<Self> {
        let bindings: BTreeMap<_, _> = bindings.into_iter().collect();
        let grid = *bindings
            .values()
            .next()
            .ok_or_else(|| Error::InvalidArgument("no bindings".into()))?
            .grid();
        for f in bindings.values() {
            grid.check_same(f.grid())?;
        }
        Ok(Environment::Functions { grid, bindings })
    }

    pub fn msets<I: IntoIterator<Item = (String, Mset)>>(bindings: I) -> Result<Self> {
        let bindings: BTreeMap<String, Mset> = bindings.into_iter().collect();
        let elements: BTreeSet<Element> = bindings.values().flat_map(|m| m.elements().cloned()).collect();
        let universe = Mset::from_pairs(elements.into_iter().map(|e| (e, 1.0)));
        Ok(Environment::Msets { universe, bindings })
    }

    fn lookup(&self, name: &str) -> Result<Value> {
        let found = match self {
            Environment::Functions { bindings, .. } => bindings.get(name).cloned().map(Value::Function),
            Environment::Msets { bindings, .. } => bindings.get(name).cloned().map(Value::Mset),
        };
        found.ok_or_else(|| Error::Unbound(name.to_owned()))
    }

    /// A literal as a constant function on the grid, or as a uniform mset
    /// over the union of all bound supports.
    fn constant(&self, v: f64) -> Value {
        match self {
            Environment::Functions { grid, .. } => Value::Function(MFunction::constant(*grid, v)),
            Environment::Msets { universe, .. } => Value::Mset(universe.scale(v)),
        }
    }
}

fn apply(op: &BinOp, l: Value, r: Value) -> Result<Value> {
    match (l, r) {
        (Value::Function(a), Value::Function(b)) => Ok(Value::Function(a.pointwise(op.pointwise(), &b)?)),
        (Value::Mset(a), Value::Mset(b)) => Ok(Value::Mset(match op.pointwise() {
            PointwiseOp::Combine(c) => a.combine(c, &b),
            PointwiseOp::Quotient => a.quotient(&b),
        })),
        _ => Err(Error::Alignment("cannot mix msets and functions".into())),
    }
}

pub fn eval(ast: &Expr, env: &Environment) -> Result<Value> {
    match ast {
        Expr::Ident(name) => env.lookup(name),
        Expr::Number(v) => Ok(env.constant(*v)),
        Expr::Negate(inner) => Ok(match eval(inner, env)? {
            Value::Function(f) => Value::Function(f.complement()),
            Value::Mset(m) => Value::Mset(m.complement()),
        }),
        Expr::Binary(op, l, r) => apply(op, eval(l, env)?, eval(r, env)?),
    }
}
