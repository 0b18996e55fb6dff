//! Recursive-descent parser for scalar expressions.

use num_bigint::BigInt;

use super::{parse_error, FieldElement, FieldSpec};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(field: &FieldSpec, text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Tok::Int(s.parse().expect("digits")));
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                let ok = match field {
                    FieldSpec::Transcendental => name == "q",
                    FieldSpec::Cyclotomic { .. } => {
                        matches!(name.as_str(), "q" | "z" | "zeta")
                    }
                };
                if !ok {
                    return Err(parse_error(format!("unknown symbol `{name}` in scalar `{text}`")));
                }
                out.push(Tok::Var);
            }
            other => {
                return Err(parse_error(format!("unexpected character `{other}` in scalar `{text}`")))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    field: &'a FieldSpec,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<FieldElement> {
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

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let inv = d.inv().ok_or_else(|| parse_error("division by zero in scalar"))?;
                    acc = &acc * &inv;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElement> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        if e < 0 && base.is_zero() {
            return Err(parse_error("negative power of zero"));
        }
        Ok(base.pow(e))
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some(&Tok::LParen);
        if paren {
            self.pos += 1;
        }
        let neg = self.peek() == Some(&Tok::Minus);
        if neg {
            self.pos += 1;
        }
        let v = match self.next() {
            Some(Tok::Int(n)) => i64::try_from(n).map_err(|_| parse_error("exponent too large"))?,
            _ => return Err(parse_error("expected integer exponent")),
        };
        if paren && self.next() != Some(Tok::RParen) {
            return Err(parse_error("unbalanced parenthesis in exponent"));
        }
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<FieldElement> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(self.field.rational(n.into())),
            Some(Tok::Var) => Ok(self.field.q_power(1)),
            Some(Tok::LParen) => {
                let v = self.expr()?;
                if self.next() != Some(Tok::RParen) {
                    return Err(parse_error("unbalanced parenthesis"));
                }
                Ok(v)
            }
            other => Err(parse_error(format!("unexpected token {other:?}"))),
        }
    }
}

pub(super) fn parse_scalar(field: &FieldSpec, text: &str) -> Result<FieldElement> {
    let toks = tokenize(field, text)?;
    if toks.is_empty() {
        return Err(parse_error("empty scalar"));
    }
    let mut p = Parser { field, toks, pos: 0 };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(parse_error(format!("trailing input in scalar `{text}`")));
    }
    Ok(v)
}
