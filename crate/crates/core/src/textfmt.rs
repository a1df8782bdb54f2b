//! Lexing and parsing of the small arithmetic sub-language shared by all
//! text formats: sums of products of Gaussian-rational coefficients and
//! named atoms raised to integer powers, e.g. `1/2*u^-1 - (1+2i)*c1^2*c3`
//! or `4*h + h2`. An optional trailing `O(u^N)` records a truncation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::ParseError;
use crate::scalars::GaussRat;

/// A monomial in named atoms; exponents may be negative.
pub type AtomPowers = BTreeMap<String, i64>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearSum {
    pub terms: BTreeMap<AtomPowers, GaussRat>,
    /// `O(atom^n)` marker: the sum is only known below `atom^n`.
    pub big_o: Option<(String, i64)>,
}

impl LinearSum {
    fn add_term(&mut self, powers: AtomPowers, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(powers.clone())
            .or_insert_with(GaussRat::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&powers);
        }
    }

    fn mul(&self, other: &LinearSum) -> LinearSum {
        let mut out = LinearSum::default();
        for (p1, c1) in &self.terms {
            for (p2, c2) in &other.terms {
                let mut p = p1.clone();
                for (a, e) in p2 {
                    *p.entry(a.clone()).or_insert(0) += e;
                }
                p.retain(|_, e| *e != 0);
                out.add_term(p, c1 * c2);
            }
        }
        out
    }

    fn constant(c: GaussRat) -> LinearSum {
        let mut out = LinearSum::default();
        out.add_term(AtomPowers::new(), c);
        out
    }

    /// Single-atom view: `(exponent, coefficient)` pairs, rejecting any other
    /// atom.
    pub fn univariate(&self, atom: &str) -> Result<Vec<(i64, GaussRat)>, String> {
        let mut out = Vec::new();
        for (p, c) in &self.terms {
            let mut e = 0;
            for (a, k) in p {
                if a == atom {
                    e = *k;
                } else {
                    return Err(format!("unexpected symbol `{a}` (expected `{atom}`)"));
                }
            }
            out.push((e, c.clone()));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(GaussRat),
    Ident(String),
    Op(char),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some((at, t)) = lx.next()? {
            out.push((at, t));
        }
        Ok(out)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        if c.is_ascii_digit() {
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            // rational literal `n/d` is written without spaces
            let rest = &self.src[self.pos..];
            if rest.starts_with('/') && rest[1..].starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
            let mut text = self.src[start..self.pos].to_string();
            let rest = &self.src[self.pos..];
            if rest.starts_with('i') && !rest[1..].starts_with(is_ident_char) {
                self.pos += 1;
                text.push('i');
            }
            let value = text
                .parse::<GaussRat>()
                .map_err(|e| ParseError::new(1, start + 1, e.to_string()))?;
            return Ok(Some((start, Tok::Num(value))));
        }
        if is_ident_start(c) {
            while self.peek().is_some_and(is_ident_char) {
                self.pos += 1;
            }
            return Ok(Some((
                start,
                Tok::Ident(self.src[start..self.pos].to_string()),
            )));
        }
        if "+-*^()/".contains(c) {
            self.pos += 1;
            return Ok(Some((start, Tok::Op(c))));
        }
        Err(ParseError::new(
            1,
            start + 1,
            format!("unexpected character `{c}`"),
        ))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn col(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |(p, _)| *p) + 1
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(1, self.col(), msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_op(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat_op('-');
        if !neg {
            self.eat_op('+');
        }
        match self.peek() {
            Some(Tok::Num(v)) if v.is_real() && v.re().is_integer() => {
                let n: i64 = v
                    .re()
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.err("exponent out of range"))?;
                self.at += 1;
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    fn sum(&mut self, out: &mut LinearSum, top: bool) -> Result<LinearSum, ParseError> {
        let mut acc = LinearSum::default();
        let mut first = true;
        loop {
            let mut sign = GaussRat::one();
            let mut saw_sign = false;
            loop {
                if self.eat_op('-') {
                    sign = -sign;
                    saw_sign = true;
                } else if self.eat_op('+') {
                    saw_sign = true;
                } else {
                    break;
                }
            }
            if !first && !saw_sign {
                break;
            }
            if top
                && matches!(self.peek(), Some(Tok::Ident(s)) if s == "O")
                && matches!(self.toks.get(self.at + 1), Some((_, Tok::Op('('))))
            {
                if out.big_o.is_some() {
                    return Err(self.err("duplicate O(...) term"));
                }
                self.at += 2;
                let atom = match self.peek() {
                    Some(Tok::Ident(a)) => a.clone(),
                    _ => return Err(self.err("expected a variable inside O(...)")),
                };
                self.at += 1;
                let e = if self.eat_op('^') { self.integer()? } else { 1 };
                self.expect_op(')')?;
                out.big_o = Some((atom, e));
                first = false;
                continue;
            }
            let t = self.term(out)?;
            for (p, c) in t.terms {
                acc.add_term(p, &c * &sign);
            }
            first = false;
        }
        Ok(acc)
    }

    fn term(&mut self, out: &mut LinearSum) -> Result<LinearSum, ParseError> {
        let mut acc = self.factor(out)?;
        while self.eat_op('*') {
            let f = self.factor(out)?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self, out: &mut LinearSum) -> Result<LinearSum, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(LinearSum::constant(v))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if name == "i" {
                    return Ok(LinearSum::constant(GaussRat::i()));
                }
                let e = if self.eat_op('^') { self.integer()? } else { 1 };
                let mut p = AtomPowers::new();
                if e != 0 {
                    p.insert(name, e);
                }
                let mut s = LinearSum::default();
                s.add_term(p, GaussRat::one());
                Ok(s)
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let inner = self.sum(out, false)?;
                self.expect_op(')')?;
                Ok(inner)
            }
            _ => Err(self.err("expected a coefficient, a symbol or `(`")),
        }
    }
}

/// Parses a full sum. Columns in errors are 1-based within `text`.
pub fn parse_sum(text: &str) -> Result<LinearSum, ParseError> {
    let toks = Lexer::tokens(text)?;
    if toks.is_empty() {
        return Err(ParseError::new(1, 1, "empty expression"));
    }
    let mut p = Parser {
        toks,
        at: 0,
        len: text.len(),
    };
    let mut out = LinearSum::default();
    let acc = p.sum(&mut out, true)?;
    if p.at != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    out.terms = acc.terms;
    Ok(out)
}

/// Appends `coeff*body` to a signed sum, writing ` - ` for negative real or
/// negative imaginary coefficients. `body` empty means a bare coefficient.
pub fn push_term(out: &mut String, coeff: &GaussRat, body: &str) {
    let negative = if coeff.is_compound() {
        false
    } else if coeff.is_real() {
        coeff.re() < &num_rational::BigRational::zero()
    } else {
        coeff.im() < &num_rational::BigRational::zero()
    };
    let magnitude = if negative { -coeff } else { coeff.clone() };
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else if negative {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    let is_one = magnitude == GaussRat::one();
    if body.is_empty() {
        let _ = write!(out, "{}", fmt_factor(&magnitude));
    } else if is_one {
        out.push_str(body);
    } else {
        let _ = write!(out, "{}*{}", fmt_factor(&magnitude), body);
    }
}

/// A coefficient as a product factor; compound values get parentheses.
pub fn fmt_factor(c: &GaussRat) -> String {
    if c.is_compound() {
        format!("({c})")
    } else {
        c.to_string()
    }
}

/// `atom^e` with the exponent omitted when it is 1.
pub fn power(atom: &str, e: i64) -> String {
    if e == 1 {
        atom.to_string()
    } else {
        format!("{atom}^{e}")
    }
}
