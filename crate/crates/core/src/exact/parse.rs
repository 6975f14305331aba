//! Text input for polynomials, binary forms, self-maps and rational points.
//!
//! One expression grammar serves every entry point: `+`, binary and unary
//! `-`, `*` with implicit multiplication by juxtaposition ("2z", "(z-1)(z+2)"),
//! `^` with a nonnegative integer exponent, parentheses, integer literals and
//! rational literals `a/b`. Univariate input uses the variable `z`; forms use
//! `p0` and `p1` and must be homogeneous. A map is either a polynomial in `z`
//! ("z^2 - 2") or an explicit lift with components separated by a top-level
//! semicolon ("p0^2 ; p1^2 - 2*p0^2").

use super::form::{lift_from_poly, BinaryForm, MapLift};
use super::poly::{Rat, UniPoly};
use crate::error::Error;
use crate::Result;
use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeMap;

/// Hard cap on any exponent and on the dense degree of parsed input.
const MAX_DEGREE: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut it = src.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                let n = digits
                    .parse::<BigInt>()
                    .map_err(|e| Error::parse(format!("bad integer literal: {e}")))?;
                toks.push(Tok::Num(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Ident(name));
            }
            '+' => {
                it.next();
                toks.push(Tok::Plus);
            }
            '-' => {
                it.next();
                toks.push(Tok::Minus);
            }
            '*' => {
                it.next();
                toks.push(Tok::Star);
            }
            '/' => {
                it.next();
                toks.push(Tok::Slash);
            }
            '^' => {
                it.next();
                toks.push(Tok::Caret);
            }
            '(' => {
                it.next();
                toks.push(Tok::LParen);
            }
            ')' => {
                it.next();
                toks.push(Tok::RParen);
            }
            other => {
                return Err(Error::parse(format!("unexpected character '{other}'")));
            }
        }
    }
    Ok(toks)
}

/// Sparse polynomial in at most two variables, keyed by exponent pairs.
#[derive(Clone, Debug, Default)]
struct BiPoly(BTreeMap<(u64, u64), Rat>);

impl BiPoly {
    fn constant(c: Rat) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((0, 0), c);
        }
        BiPoly(m)
    }

    fn var(which: usize) -> Self {
        let key = if which == 0 { (1, 0) } else { (0, 1) };
        BiPoly(BTreeMap::from([(key, Rat::one())]))
    }

    fn add(&self, other: &BiPoly) -> BiPoly {
        let mut m = self.0.clone();
        for (k, v) in &other.0 {
            let e = m.entry(*k).or_insert_with(Rat::zero);
            *e += v;
            if e.is_zero() {
                m.remove(k);
            }
        }
        BiPoly(m)
    }

    fn neg(&self) -> BiPoly {
        BiPoly(self.0.iter().map(|(k, v)| (*k, -v.clone())).collect())
    }

    fn mul(&self, other: &BiPoly) -> Result<BiPoly> {
        let mut m: BTreeMap<(u64, u64), Rat> = BTreeMap::new();
        for ((a0, a1), u) in &self.0 {
            for ((b0, b1), v) in &other.0 {
                let key = (a0 + b0, a1 + b1);
                if key.0 + key.1 > MAX_DEGREE {
                    return Err(Error::parse("degree cap exceeded"));
                }
                let e = m.entry(key).or_insert_with(Rat::zero);
                *e += u * v;
                if e.is_zero() {
                    m.remove(&key);
                }
            }
        }
        Ok(BiPoly(m))
    }

    fn pow(&self, e: u64) -> Result<BiPoly> {
        let mut acc = BiPoly::constant(Rat::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<BiPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.next();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BiPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = acc.mul(&self.unary()?)?;
                }
                // Juxtaposition: "2z", "(z-1)(z+2)", "3 p0".
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<BiPoly> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.next();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<BiPoly> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.next();
            let e = match self.next() {
                Some(Tok::Num(n)) => n.clone(),
                other => {
                    return Err(Error::parse(format!(
                        "exponent must be an integer literal, got {other:?}"
                    )))
                }
            };
            let e = u64::try_from(&e).map_err(|_| Error::parse("exponent out of range"))?;
            if e > MAX_DEGREE {
                return Err(Error::parse("degree cap exceeded"));
            }
            return base.pow(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BiPoly> {
        match self.next().cloned() {
            Some(Tok::Num(n)) => {
                // Rational literal a/b: a slash directly after an integer,
                // followed by another integer.
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.next();
                    match self.next().cloned() {
                        Some(Tok::Num(d)) => {
                            if d.is_zero() {
                                return Err(Error::parse("zero denominator"));
                            }
                            Ok(BiPoly::constant(Rat::new(n, d)))
                        }
                        other => Err(Error::parse(format!(
                            "expected denominator after '/', got {other:?}"
                        ))),
                    }
                } else {
                    Ok(BiPoly::constant(Rat::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => {
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(BiPoly::var(i)),
                    None => Err(Error::parse(format!(
                        "unknown variable '{name}' (expected one of {:?})",
                        self.vars
                    ))),
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::parse("missing closing parenthesis")),
                }
            }
            other => Err(Error::parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn parse_bipoly(src: &str, vars: &[&str]) -> Result<BiPoly> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::parse("empty input"));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        vars,
    };
    let out = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::parse(format!(
            "trailing input starting at token {:?}",
            toks[p.pos]
        )));
    }
    Ok(out)
}

/// Parse a univariate polynomial in `z`.
pub fn parse_uni(src: &str) -> Result<UniPoly> {
    let bp = parse_bipoly(src, &["z"])?;
    let deg = bp.0.keys().map(|k| k.0).max().unwrap_or(0);
    if deg > MAX_DEGREE {
        return Err(Error::parse("degree cap exceeded"));
    }
    let mut coeffs = vec![Rat::zero(); deg as usize + 1];
    for ((e, _), c) in bp.0 {
        coeffs[e as usize] = c;
    }
    Ok(UniPoly::from_coeffs(coeffs))
}

/// Parse a homogeneous binary form in `p0`, `p1`; the degree is inferred
/// from the monomials, which must all share one total degree.
pub fn parse_form(src: &str) -> Result<BinaryForm> {
    let bp = parse_bipoly(src, &["p0", "p1"])?;
    let mut total: Option<u64> = None;
    for (e0, e1) in bp.0.keys() {
        let t = e0 + e1;
        match total {
            None => total = Some(t),
            Some(prev) if prev != t => {
                return Err(Error::parse(format!(
                    "form is not homogeneous: degrees {prev} and {t}"
                )))
            }
            _ => {}
        }
    }
    let Some(d) = total else {
        return Err(Error::parse("zero form has no degree"));
    };
    if d > MAX_DEGREE {
        return Err(Error::parse("degree cap exceeded"));
    }
    let mut coeffs = vec![Rat::zero(); d as usize + 1];
    for ((_, e1), c) in bp.0 {
        coeffs[e1 as usize] = c;
    }
    Ok(BinaryForm::new(d as usize, coeffs))
}

/// Parse a self-map: either a polynomial in `z`, or "F0 ; F1" with both
/// components homogeneous forms of the same degree.
pub fn parse_map(src: &str) -> Result<MapLift> {
    if let Some((left, right)) = split_top_level_semicolon(src) {
        let f0 = parse_form(left)?;
        let f1 = parse_form(right)?;
        return MapLift::new(f0, f1);
    }
    let p = parse_uni(src)?;
    lift_from_poly(&p)
}

fn split_top_level_semicolon(src: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in src.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => return Some((&src[..i], &src[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Parse a rational projective point: "inf", an integer, or "a/b".
/// Returned as coprime integer coordinates `(x0, x1)` with `x0 >= 0`,
/// representing the value `x1 / x0`; infinity is `(0, 1)`.
pub fn parse_point(src: &str) -> Result<(BigInt, BigInt)> {
    let s = src.trim();
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok((BigInt::zero(), BigInt::one()));
    }
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num = num_s
        .parse::<BigInt>()
        .map_err(|e| Error::parse(format!("bad numerator '{num_s}': {e}")))?;
    let den = den_s
        .parse::<BigInt>()
        .map_err(|e| Error::parse(format!("bad denominator '{den_s}': {e}")))?;
    if den.is_zero() {
        return Err(Error::parse("zero denominator"));
    }
    let g = num::integer::gcd(num.clone(), den.clone());
    let (mut x1, mut x0) = (num / &g, den / &g);
    if x0.is_negative() {
        x0 = -x0;
        x1 = -x1;
    }
    Ok((x0, x1))
}
