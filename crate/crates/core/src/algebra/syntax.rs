//! Stable text syntax for operator expressions.
//!
//! Printed form: terms joined by ` + `, each a `*`-product of an optional
//! parenthesized Gaussian coefficient, `lam^a`, `r^b`, `s^1`, denominator
//! factors `(poly)^-e`, then `x<i>^e` and `p<i>^e` in index order, e.g.
//! `(-i)*lam*r^-1*s^1*x1*p2`. The parser accepts this form and, more
//! generally, any sum of products of atoms in any order (products are
//! normal-ordered on the way in), so fixtures may be written as `p1*x1`.

use num_traits::{One, Zero};

use super::expr::{Atom, Ctx, OperatorExpr};
use super::gauss::{GaussianRational, Rational};
use super::poly::monomial_factors;
use super::radial::RadialCoefficient;
use super::AlgebraError;

fn exp_factors(prefix: char, e: &[u8], dim: usize) -> Vec<String> {
    (0..dim)
        .filter(|&k| e[k] > 0)
        .map(|k| {
            if e[k] == 1 {
                format!("{prefix}{}", k + 1)
            } else {
                format!("{prefix}{}^{}", k + 1, e[k])
            }
        })
        .collect()
}

/// Renders an expression in the stable syntax.
pub fn print(e: &OperatorExpr) -> String {
    let dim = e.dim();
    let mut parts = Vec::new();
    for (mono, c) in e.raw_terms() {
        let xs = exp_factors('x', &mono.x, dim);
        let ps = exp_factors('p', &mono.p, dim);
        for (part, with_s) in [(&c.plain, false), (&c.s_part, true)] {
            if part.is_zero() {
                continue;
            }
            let dens = part.denominator_factors();
            for (m, k) in part.numerator().terms() {
                let mut body = monomial_factors(m);
                if with_s {
                    body.push("s^1".to_string());
                }
                body.extend(dens.iter().cloned());
                body.extend(xs.iter().cloned());
                body.extend(ps.iter().cloned());
                let mut factors = Vec::new();
                if !k.is_one() || body.is_empty() {
                    factors.push(k.to_string());
                }
                factors.extend(body);
                parts.push(factors.join("*"));
            }
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, AlgebraError> {
    let err = |msg: String| AlgebraError::Parse(msg);
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
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
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let num: String = chars[start..i].iter().collect();
                let mut q: Rational = num
                    .parse::<num_bigint::BigInt>()
                    .map(Rational::from_integer)
                    .map_err(|e| err(e.to_string()))?;
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let den: String = chars[start..i].iter().collect();
                    let d: num_bigint::BigInt = den.parse().map_err(|e: num_bigint::ParseBigIntError| err(e.to_string()))?;
                    if d.is_zero() {
                        return Err(err("zero denominator".into()));
                    }
                    q /= Rational::from_integer(d);
                }
                out.push(Tok::Num(q));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(err(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    ctx: &'a Ctx,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<OperatorExpr, AlgebraError> {
        let mut neg = false;
        match self.peek() {
            Some(Tok::Minus) => {
                neg = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if neg {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OperatorExpr, AlgebraError> {
        let mut acc = self.power()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            let f = self.power()?;
            acc = acc.try_mul(&f)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<OperatorExpr, AlgebraError> {
        // `r^k` and `s^k` are handled as atoms so negative powers stay exact.
        if let Some(Tok::Ident(name)) = self.peek().cloned() {
            if name == "r" || name == "s" {
                self.pos += 1;
                let k = if let Some(Tok::Caret) = self.peek() {
                    self.pos += 1;
                    self.int()?
                } else {
                    1
                };
                let atom = if name == "r" {
                    Atom::R(k as i32)
                } else {
                    Atom::S(k)
                };
                return OperatorExpr::atom(atom, self.ctx);
            }
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let k = self.int()?;
            if k >= 0 {
                return Ok(base.pow(k as u32));
            }
            let c = scalar_of(&base).ok_or_else(|| {
                AlgebraError::Parse("negative power of a non-scalar expression".into())
            })?;
            let inv = c
                .inv(&self.ctx.lambda)
                .ok_or(AlgebraError::NotInvertible)?;
            return Ok(OperatorExpr::scalar(self.ctx, inv).pow(k.unsigned_abs() as u32));
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<i64, AlgebraError> {
        let neg = if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.next() {
            Some(Tok::Num(q)) if q.is_integer() => {
                let v: i64 = num_traits::ToPrimitive::to_i64(q.numer())
                    .ok_or_else(|| AlgebraError::Parse("exponent too large".into()))?;
                Ok(if neg { -v } else { v })
            }
            other => Err(AlgebraError::Parse(format!("expected integer exponent, got {other:?}"))),
        }
    }

    fn atom(&mut self) -> Result<OperatorExpr, AlgebraError> {
        match self.next() {
            Some(Tok::Num(q)) => Ok(OperatorExpr::constant(self.ctx, GaussianRational::real(q))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    other => Err(AlgebraError::Parse(format!("expected ')', got {other:?}"))),
                }
            }
            Some(Tok::Ident(name)) => self.ident(&name),
            other => Err(AlgebraError::Parse(format!("unexpected token {other:?}"))),
        }
    }

    fn ident(&mut self, name: &str) -> Result<OperatorExpr, AlgebraError> {
        match name {
            "i" => Ok(OperatorExpr::constant(self.ctx, GaussianRational::i())),
            "lam" => Ok(OperatorExpr::scalar(
                self.ctx,
                RadialCoefficient::from_coeff(self.ctx.lambda.coeff()),
            )),
            _ => {
                let (head, idx) = name.split_at(1);
                let idx: usize = idx
                    .parse()
                    .map_err(|_| AlgebraError::Parse(format!("unknown symbol '{name}'")))?;
                match head {
                    "x" => OperatorExpr::atom(Atom::X(idx), self.ctx),
                    "p" => OperatorExpr::atom(Atom::P(idx), self.ctx),
                    _ => Err(AlgebraError::Parse(format!("unknown symbol '{name}'"))),
                }
            }
        }
    }
}

/// The scalar coefficient of a pure function of `r` (no `x`, no `p`).
fn scalar_of(e: &OperatorExpr) -> Option<RadialCoefficient> {
    if e.is_zero() {
        return Some(RadialCoefficient::zero());
    }
    if e.len() != 1 {
        return None;
    }
    let t = e.terms().next()?;
    if t.x_exp.iter().all(|&v| v == 0) && t.p_exp.iter().all(|&v| v == 0) {
        Some(t.coeff.clone())
    } else {
        None
    }
}

/// Parses the stable syntax (or any product/sum of atoms) in `ctx`.
/// With a fixed `lam`, the symbol `lam` denotes that value.
pub fn parse(src: &str, ctx: &Ctx) -> Result<OperatorExpr, AlgebraError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(AlgebraError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, ctx };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(AlgebraError::Parse(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_print() {
        let c = Ctx::symbolic(2);
        let e = parse("(-i)*lam*r^-1*s^1*x1*p2", &c).unwrap();
        assert_eq!(print(&e), "(-i)*lam*r^-1*s^1*x1*p2");
        let z = parse("x1*p1 - p1*x1", &c).unwrap();
        assert_eq!(print(&z), "(i)");
        assert_eq!(print(&OperatorExpr::zero(&c)), "0");
    }

    #[test]
    fn denominators_round_trip() {
        let c = Ctx::symbolic(2);
        let e = parse("(1 + lam*r^2)^-1*x1*x2 + (1/2)*p1^2", &c).unwrap();
        let text = print(&e);
        assert_eq!(text, "(1/2)*p1^2 + (1 + lam*r^2)^-1*x1*x2");
        assert_eq!(parse(&text, &c).unwrap(), e);
    }

    #[test]
    fn parse_errors() {
        let c = Ctx::symbolic(2);
        assert!(parse("x3", &c).is_err());
        assert!(parse("(x1", &c).is_err());
        assert!(parse("x1^-1", &c).is_err());
        assert!(parse("", &c).is_err());
        assert!(parse("q1", &c).is_err());
    }
}
