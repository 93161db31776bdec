//! Expression grammar shared by job files and reports.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary ("*" unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" INTEGER)?
//! atom   := NUMBER ("/" NUMBER)? | IDENT | "d/d" IDENT | "(" expr ")"
//! ```
//!
//! Products are wedge products of multivector fields, so `d/dx*d/dy` is a
//! bivector. The canonical rendering of every value parses back to itself.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::galg::{Chart, GPoly};
use crate::mvf::Mvf;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Deriv(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn ident_at(chars: &[char], mut i: usize) -> (String, usize) {
    let start = i;
    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
        i += 1;
    }
    (chars[start..i].iter().collect(), i)
}

fn digits_at(chars: &[char], mut i: usize) -> (String, usize) {
    let start = i;
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    (chars[start..i].iter().collect(), i)
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let at = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, at)),
            '-' => out.push((Tok::Minus, at)),
            '*' => out.push((Tok::Star, at)),
            '^' => out.push((Tok::Caret, at)),
            '(' => out.push((Tok::LParen, at)),
            ')' => out.push((Tok::RParen, at)),
            _ if c.is_ascii_digit() => {
                let (num, j) = digits_at(&chars, i);
                let mut value = BigRational::from_integer(num.parse::<BigInt>().expect("digits"));
                i = j;
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    let (den, j) = digits_at(&chars, i + 1);
                    let den = den.parse::<BigInt>().expect("digits");
                    if den == BigInt::from(0) {
                        return Err(Error::Parse(format!("zero denominator at column {}", at + 1)));
                    }
                    value /= BigRational::from_integer(den);
                    i = j;
                }
                out.push((Tok::Num(value), at));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                if c == 'd'
                    && chars.get(i + 1) == Some(&'/')
                    && chars.get(i + 2) == Some(&'d')
                    && chars.get(i + 3).is_some_and(|c| c.is_ascii_alphabetic() || *c == '_')
                {
                    let (name, j) = ident_at(&chars, i + 3);
                    out.push((Tok::Deriv(name), at));
                    i = j;
                } else {
                    let (name, j) = ident_at(&chars, i);
                    out.push((Tok::Ident(name), at));
                    i = j;
                }
                continue;
            }
            _ => return Err(Error::Parse(format!("unexpected `{c}` at column {}", at + 1))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    chart: &'a Arc<Chart>,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |t| t.1) + 1
    }

    fn expr(&mut self) -> Result<Mvf> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Mvf> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Mvf> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Mvf> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().cloned() {
            Some(Tok::Num(n)) if n.is_integer() => {
                self.pos += 1;
                let k = u32::try_from(n.to_integer())
                    .map_err(|_| Error::Parse(format!("exponent too large at column {}", self.column())))?;
                Ok(base.pow(k))
            }
            _ => Err(Error::Parse(format!("expected an integer exponent at column {}", self.column()))),
        }
    }

    fn atom(&mut self) -> Result<Mvf> {
        let col = self.column();
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| Error::Parse(format!("unexpected end of expression at column {col}")))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(Mvf::constant(self.chart, n)),
            Tok::Ident(name) => Mvf::function(self.chart, &name)
                .map_err(|_| Error::Parse(format!("unknown generator `{name}` at column {col}"))),
            Tok::Deriv(name) => Mvf::deriv(self.chart, &name)
                .map_err(|_| Error::Parse(format!("unknown generator `{name}` in d/d{name} at column {col}"))),
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(Error::Parse(format!("expected `)` at column {}", self.column())));
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected {other:?} at column {col}"))),
        }
    }
}

/// Parses a multivector field on `chart`.
pub fn parse_mvf(chart: &Arc<Chart>, src: &str) -> Result<Mvf> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, chart, len: src.chars().count() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at column {}", p.column())));
    }
    Ok(e)
}

/// Parses a function, rejecting derivation generators.
pub fn parse_gpoly(chart: &Arc<Chart>, src: &str) -> Result<GPoly> {
    parse_mvf(chart, src)?
        .to_function()
        .ok_or_else(|| Error::Parse(format!("`{src}` is not a function")))
}
