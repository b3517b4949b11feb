//! Text formats for polynomials and endomorphisms.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := power ('*'? power | '/' positive-integer)*
//! power  := atom ('^' natural)*
//! atom   := coefficient | var | '(' expr ')'
//! var    := 'x' natural | 't' | 'x' | 'y' | 'z'
//! coeff  := integer | integer '/' positive-integer
//! endo   := '[' expr (',' expr)* ']'      (parentheses accepted as well)
//! ```
//!
//! The bare aliases `x`, `y`, `z` stand for `x1`, `x2`, `x3` and are only
//! accepted when there are at most three variables.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Param,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn tokenize(text: &str, offset: usize, nvars: usize) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let pos = offset + i;
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let simple = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((pos, tok));
            i += 1;
            continue;
        }
        if b.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((pos, Tok::Num(n)));
            continue;
        }
        let alias = |idx: usize| -> Result<Tok> {
            if nvars > 3 {
                return Err(err(pos, "aliases x, y, z require at most 3 variables"));
            }
            if idx > nvars {
                return Err(err(
                    pos,
                    format!("variable x{idx} exceeds the {nvars} components"),
                ));
            }
            Ok(Tok::Var(idx))
        };
        match b {
            b'x' => {
                i += 1;
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    out.push((pos, alias(1)?));
                } else {
                    let idx: usize = text[start..i]
                        .parse()
                        .map_err(|_| err(pos, "variable index too large"))?;
                    if idx == 0 || idx > nvars {
                        return Err(err(
                            pos,
                            format!("variable x{idx} out of range 1..={nvars}"),
                        ));
                    }
                    out.push((pos, Tok::Var(idx)));
                }
            }
            b'y' => {
                out.push((pos, alias(2)?));
                i += 1;
            }
            b'z' => {
                out.push((pos, alias(3)?));
                i += 1;
            }
            b't' => {
                out.push((pos, Tok::Param));
                i += 1;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(err(pos, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                -self.term()?
            }
            Some(Tok::Plus) => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc * self.power()?;
                }
                Some(Tok::Num(_) | Tok::Var(_) | Tok::Param | Tok::LParen) => {
                    acc = acc * self.power()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Some(Tok::Num(d)) if d.is_positive() => {
                            acc = acc.scale(&Rational::new(BigInt::from(1), d));
                        }
                        _ => return Err(err(dpos, "expected a positive denominator")),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let mut base = self.atom()?;
        while let Some(Tok::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Num(e)) => {
                    let e = e
                        .to_u32()
                        .ok_or_else(|| err(pos, "exponent too large"))?;
                    base = base.pow(e);
                }
                _ => return Err(err(pos, "expected a natural exponent after `^`")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(n)) => {
                let mut den = BigInt::from(1);
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Some(Tok::Num(d)) if d.is_positive() => den = d,
                        _ => return Err(err(dpos, "expected a positive denominator")),
                    }
                }
                Ok(Poly::constant(self.nvars, Rational::new(n, den)))
            }
            Some(Tok::Var(i)) => Ok(Poly::var(self.nvars, i)),
            Some(Tok::Param) => Ok(Poly::param(self.nvars)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let cpos = self.pos();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(err(cpos, "expected `)`")),
                }
            }
            Some(tok) => Err(err(pos, format!("unexpected token {tok:?}"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

fn parse_poly_at(text: &str, offset: usize, nvars: usize) -> Result<Poly> {
    let toks = tokenize(text, offset, nvars)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: offset + text.len(),
        nvars,
    };
    if p.peek().is_none() {
        return Err(err(offset, "empty polynomial"));
    }
    let poly = p.expr()?;
    if p.idx < p.toks.len() {
        return Err(err(p.pos(), "trailing input"));
    }
    Ok(poly)
}

/// Parses a polynomial in `nvars` x-variables (and optionally `t`).
pub fn parse_poly(text: &str, nvars: usize) -> Result<Poly> {
    parse_poly_at(text, 0, nvars)
}

/// Splits `text` at top-level occurrences of `sep`, returning each piece with
/// its byte offset.
pub(crate) fn split_top_level(text: &str, sep: u8) -> Result<Vec<(usize, &str)>> {
    let mut depth: i64 = 0;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, b) in text.bytes().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(err(i, "unbalanced closing bracket"));
                }
            }
            _ if b == sep && depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(err(text.len(), "unbalanced brackets"));
    }
    out.push((start, &text[start..]));
    Ok(out)
}

/// Strips one pair of enclosing `[...]` or `(...)`, returning the body and
/// its byte offset.
pub(crate) fn strip_delimiters<'a>(
    text: &'a str,
    offset: usize,
    open: &[u8],
) -> Result<(usize, &'a str)> {
    let lead = text.len() - text.trim_start().len();
    let body = text.trim();
    let bytes = body.as_bytes();
    let close_for = |o: u8| if o == b'[' { b']' } else { b')' };
    match bytes.first() {
        Some(&o) if open.contains(&o) && bytes.len() >= 2 && bytes[bytes.len() - 1] == close_for(o) => {
            Ok((offset + lead + 1, &body[1..body.len() - 1]))
        }
        _ => Err(err(offset + lead, "expected a bracketed list")),
    }
}

/// Parses `[f1, ..., fn]`. The number of variables is the number of components;
/// any variable index above it is rejected.
pub fn parse_endo(text: &str) -> Result<Endo> {
    parse_endo_at(text, 0)
}

pub(crate) fn parse_endo_at(text: &str, offset: usize) -> Result<Endo> {
    let (body_off, body) = strip_delimiters(text, offset, b"[(")?;
    let pieces = split_top_level(body, b',')?;
    let n = pieces.len();
    let comps = pieces
        .into_iter()
        .map(|(off, piece)| parse_poly_at(piece, body_off + off, n))
        .collect::<Result<Vec<_>>>()?;
    Endo::new(comps)
}
