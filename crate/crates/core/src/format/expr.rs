//! Scalar expressions: decimal literals, `e`, `pi`, `sqrt(..)`, the four
//! arithmetic operators, parentheses and unary minus.

use std::fmt;

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::Interval;

const MAX_DEPTH: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Literal(Rational),
    E,
    Pi,
    Sqrt(Box<Expr>, usize),
    Neg(Box<Expr>),
    /// Operator position kept for error reporting.
    Binary(BinOp, Box<Expr>, Box<Expr>, usize),
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::ParseError {
        position,
        message: message.into(),
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => err(self.pos, format!("expected '{}', found '{}'", c as char, x as char)),
            None => err(self.pos, format!("expected '{}', found end of input", c as char)),
        }
    }

    fn nest(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return err(self.pos, "expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.nest()?;
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == b'+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs), at);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == b'*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs), at);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            self.nest()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        let start = match self.peek() {
            None => return err(self.pos, "unexpected end of input"),
            Some(_) => self.pos,
        };
        let c = self.src[start];
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            let mut end = start;
            while end < self.src.len() && self.src[end].is_ascii_alphanumeric() {
                end += 1;
            }
            let word = std::str::from_utf8(&self.src[start..end]).expect("ascii");
            self.pos = end;
            return match word {
                "e" => Ok(Expr::E),
                "pi" => Ok(Expr::Pi),
                "sqrt" => {
                    self.expect(b'(')?;
                    let inner = self.expr()?;
                    self.expect(b')')?;
                    Ok(Expr::Sqrt(Box::new(inner), start))
                }
                _ => err(start, format!("unknown identifier '{word}'")),
            };
        }
        err(start, format!("unexpected character '{}'", char::from(c)))
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let int = self.digits();
        let mut frac = "";
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if int.is_empty() && frac.is_empty() {
            return err(start, "malformed number");
        }
        let mut exp: i64 = 0;
        if self.src.get(self.pos) == Some(&b'e') {
            let save = self.pos;
            let mut p = self.pos + 1;
            let neg = match self.src.get(p) {
                Some(b'-') => {
                    p += 1;
                    true
                }
                Some(b'+') => {
                    p += 1;
                    false
                }
                _ => false,
            };
            if self.src.get(p).is_some_and(|c| c.is_ascii_digit()) {
                self.pos = p;
                let d = self.digits();
                let v: i64 = match d.parse() {
                    Ok(v) if v <= 100_000 => v,
                    _ => return err(p, "exponent out of range"),
                };
                exp = if neg { -v } else { v };
            } else {
                self.pos = save;
            }
        }
        let mantissa: Integer = format!("{int}{frac}").parse().expect("digits");
        let scale = exp - frac.len() as i64;
        let pow10 = |k: u32| Integer::from(Integer::u_pow_u(10, k));
        let value = if scale >= 0 {
            Rational::from(mantissa * pow10(scale as u32))
        } else {
            Rational::from((mantissa, pow10((-scale) as u32)))
        };
        Ok(Expr::Literal(value))
    }
}

/// Parses an expression; trailing input is an error.
pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        if c.is_ascii_alphabetic() || c.is_ascii_digit() || c == b'(' {
            return err(p.pos, "implicit multiplication is not supported");
        }
        return err(p.pos, format!("unexpected character '{}'", char::from(c)));
    }
    Ok(e)
}

impl Expr {
    /// Outward-rounded enclosure at `prec` bits.
    pub fn enclosure(&self, prec: u32) -> Result<Interval> {
        Ok(match self {
            Expr::Literal(q) => Interval::from_rational(q, prec),
            Expr::E => Interval::euler(prec),
            Expr::Pi => Interval::pi(prec),
            Expr::Neg(a) => -a.enclosure(prec)?,
            Expr::Sqrt(a, at) => match a.enclosure(prec)?.sqrt() {
                Ok(v) => v,
                Err(_) => return err(*at, "square root of a negative value"),
            },
            Expr::Binary(op, a, b, at) => {
                let (x, y) = (a.enclosure(prec)?, b.enclosure(prec)?);
                match op {
                    BinOp::Add => &x + &y,
                    BinOp::Sub => &x - &y,
                    BinOp::Mul => &x * &y,
                    BinOp::Div => match x.checked_div(&y) {
                        Some(v) => v,
                        None => return err(*at, "division by zero"),
                    },
                }
            }
        })
    }

    /// Exact value when the expression is rational arithmetic on literals.
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Expr::Literal(q) => Some(q.clone()),
            Expr::E | Expr::Pi | Expr::Sqrt(..) => None,
            Expr::Neg(a) => Some(-a.to_rational()?),
            Expr::Binary(op, a, b, _) => {
                let (x, y) = (a.to_rational()?, b.to_rational()?);
                Some(match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div if y == 0 => return None,
                    BinOp::Div => x / y,
                })
            }
        }
    }

    /// Value at `prec` bits: correctly rounded for rational expressions,
    /// otherwise the midpoint of a tight enclosure.
    pub fn eval(&self, prec: u32) -> Result<Float> {
        if let Some(q) = self.to_rational() {
            return Ok(Float::with_val(prec, &q));
        }
        let enc = self.enclosure(prec + 64)?;
        Ok(Float::with_val(prec, enc.mid()))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(q) => write!(f, "({q})"),
            Expr::E => f.write_str("e"),
            Expr::Pi => f.write_str("pi"),
            Expr::Sqrt(a, _) => write!(f, "sqrt({a})"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Binary(op, a, b, _) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
        }
    }
}

/// Parses and evaluates a scalar at `prec` bits.
pub fn parse_scalar(s: &str, prec: u32) -> Result<Float> {
    parse_expr(s)?.eval(prec)
}

/// Parses a scalar that must be rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    parse_expr(s)?
        .to_rational()
        .ok_or_else(|| Error::ParseError {
            position: 0,
            message: format!("'{s}' is not a rational constant"),
        })
}
