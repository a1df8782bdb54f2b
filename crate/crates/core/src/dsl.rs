//! The insertion expression language.
//!
//! ```text
//! expr   := ['-'] term ('*' term)* | '1'
//! term   := 'tau' '(' INT ';' class ')'
//!         | 'tau' '[' INT (',' INT)* ']' '(' class ')'
//!         | 'tau' '{' INT (',' INT)* '}' '(' tensor ')'
//! class  := atom ('.' atom)*          atom := IDENT ['^' INT] | '1'
//! tensor := factor ('(x)' factor)*
//! factor := class | 'diag' INT '(' class ')' | IDENT '<' blocks ';' fans ';' monos '>'
//! ```
//!
//! Square brackets carry partition parts, braces carry descendent indices.
//! Parsing produces a [`DslExpr`] tree with positions; [`resolve`] turns it
//! into a [`DescendentWord`] against a [`SymbolTable`].

use std::fmt;

use crate::descendents::{
    ClassFactor, ClassMonomial, DescendentWord, DiagonalBlock, Insertion, SymbolRef, SymbolTable,
    TensorArg, TensorSymbol, Transport,
};
use crate::error::ParseError;
use crate::partitions::{OrderedSetPartition, Partition};
use crate::scalars::ChernMono;

/// Source position (1-based). Positions are metadata: they never affect
/// equality of trees.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Pos {
    fn error(self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column, message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub name: String,
    pub power: u32,
    pub pos: Pos,
}

/// A product of named classes; empty means the unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassExpr {
    pub atoms: Vec<Atom>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportExpr {
    /// 1-based blocks.
    pub blocks: Vec<Vec<usize>>,
    pub fans: Vec<usize>,
    pub monos: Vec<ClassExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Class(ClassExpr),
    Diag {
        width: usize,
        class: ClassExpr,
        pos: Pos,
    },
    Transported {
        name: String,
        transport: TransportExpr,
        pos: Pos,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Standard {
        k: u32,
        class: ClassExpr,
        pos: Pos,
    },
    Diagonal {
        parts: Vec<u32>,
        class: ClassExpr,
        pos: Pos,
    },
    General {
        ks: Vec<u32>,
        factors: Vec<Factor>,
        pos: Pos,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslExpr {
    pub negated: bool,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
    Tensor,
    End,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    rest: &'a str,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut lx = Lexer {
        chars: text.chars().peekable(),
        rest: text,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        while let Some(&c) = lx.chars.peek() {
            if !c.is_whitespace() {
                break;
            }
            lx.bump();
        }
        let pos = Pos {
            line: lx.line,
            column: lx.column,
        };
        let Some(&c) = lx.chars.peek() else {
            out.push((Tok::End, pos));
            return Ok(out);
        };
        if lx.rest.starts_with("(x)") {
            for _ in 0..3 {
                lx.bump();
            }
            out.push((Tok::Tensor, pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = lx.chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                s.push(c);
                lx.bump();
            }
            out.push((Tok::Ident(s), pos));
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = lx.chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                s.push(c);
                lx.bump();
            }
            let n = s.parse().map_err(|_| pos.error("integer too large"))?;
            out.push((Tok::Int(n), pos));
        } else if "()[]{};,*.^<>|-".contains(c) {
            lx.bump();
            out.push((Tok::Sym(c), pos));
        } else {
            return Err(pos.error(format!("unexpected character `{c}`")));
        }
    }
}

impl Lexer<'_> {
    fn bump(&mut self) {
        if let Some(c) = self.chars.next() {
            self.rest = &self.rest[c.len_utf8()..];
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Tensor => "`(x)`".into(),
        Tok::End => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.pos().error(format!(
            "expected {wanted}, found {}",
            describe(self.peek())
        ))
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Tok::Int(n) => {
                let n = *n;
                self.next();
                Ok(n)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn small_int(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        u32::try_from(self.int()?).map_err(|_| pos.error("integer too large"))
    }

    fn int_list(&mut self) -> Result<Vec<u32>, ParseError> {
        let mut v = vec![self.small_int()?];
        while self.eat(',') {
            v.push(self.small_int()?);
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<DslExpr, ParseError> {
        let negated = self.eat('-');
        let mut terms = Vec::new();
        if matches!(self.peek(), Tok::Int(1)) && matches!(self.peek2(), Tok::End) {
            self.next();
        } else {
            terms.push(self.term()?);
            while self.eat('*') {
                terms.push(self.term()?);
            }
        }
        if *self.peek() != Tok::End {
            return Err(self.unexpected("`*` or end of input"));
        }
        Ok(DslExpr { negated, terms })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Ident(s) if s == "tau" => {
                self.next();
            }
            _ => return Err(self.unexpected("`tau`")),
        }
        match self.peek() {
            Tok::Sym('(') => {
                self.next();
                let k = self.small_int()?;
                self.expect(';')?;
                let class = self.class()?;
                self.expect(')')?;
                Ok(Term::Standard { k, class, pos })
            }
            Tok::Sym('[') => {
                self.next();
                let parts = self.int_list()?;
                self.expect(']')?;
                self.expect('(')?;
                let class = self.class()?;
                self.expect(')')?;
                Ok(Term::Diagonal { parts, class, pos })
            }
            Tok::Sym('{') => {
                self.next();
                let ks = self.int_list()?;
                self.expect('}')?;
                self.expect('(')?;
                let mut factors = vec![self.factor()?];
                while *self.peek() == Tok::Tensor {
                    self.next();
                    factors.push(self.factor()?);
                }
                self.expect(')')?;
                Ok(Term::General { ks, factors, pos })
            }
            _ => Err(self.unexpected("`(`, `[` or `{` after `tau`")),
        }
    }

    fn class(&mut self) -> Result<ClassExpr, ParseError> {
        let pos = self.pos();
        let mut atoms = Vec::new();
        loop {
            let apos = self.pos();
            match self.peek().clone() {
                Tok::Int(1) => {
                    self.next();
                }
                Tok::Ident(name) => {
                    self.next();
                    let power = if self.eat('^') { self.small_int()? } else { 1 };
                    atoms.push(Atom {
                        name,
                        power,
                        pos: apos,
                    });
                }
                _ => return Err(self.unexpected("a class name or `1`")),
            }
            if !self.eat('.') {
                return Ok(ClassExpr { atoms, pos });
            }
        }
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let pos = self.pos();
        if let Tok::Ident(name) = self.peek().clone() {
            if *self.peek2() == Tok::Sym('(') {
                let width = name
                    .strip_prefix("diag")
                    .and_then(|w| w.parse::<usize>().ok())
                    .filter(|&w| w >= 1)
                    .ok_or_else(|| pos.error(format!("`{name}(` is not a diagonal `diagN(`")))?;
                self.next();
                self.next();
                let class = self.class()?;
                self.expect(')')?;
                return Ok(Factor::Diag { width, class, pos });
            }
            if *self.peek2() == Tok::Sym('<') {
                self.next();
                self.next();
                let transport = self.transport()?;
                return Ok(Factor::Transported {
                    name,
                    transport,
                    pos,
                });
            }
        }
        Ok(Factor::Class(self.class()?))
    }

    fn transport(&mut self) -> Result<TransportExpr, ParseError> {
        let mut blocks = Vec::new();
        loop {
            let mut b = vec![self.int()? as usize];
            while self.eat('.') {
                b.push(self.int()? as usize);
            }
            blocks.push(b);
            if !self.eat('|') {
                break;
            }
        }
        self.expect(';')?;
        let fans = self.int_list()?.into_iter().map(|f| f as usize).collect();
        self.expect(';')?;
        let mut monos = vec![self.class()?];
        while self.eat('|') {
            monos.push(self.class()?);
        }
        self.expect('>')?;
        Ok(TransportExpr {
            blocks,
            fans,
            monos,
        })
    }
}

/// Parses the expression syntax without resolving names.
pub fn parse_expr(text: &str) -> Result<DslExpr, ParseError> {
    let toks = tokenize(text)?;
    Parser { toks, at: 0 }.expr()
}

fn join<T: fmt::Display>(v: &[T], sep: &str) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("1");
        }
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|a| match a.power {
                1 => a.name.clone(),
                p => format!("{}^{p}", a.name),
            })
            .collect();
        f.write_str(&atoms.join("."))
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Class(c) => write!(f, "{c}"),
            Factor::Diag { width, class, .. } => write!(f, "diag{width}({class})"),
            Factor::Transported {
                name, transport, ..
            } => {
                let blocks: Vec<String> = transport.blocks.iter().map(|b| join(b, ".")).collect();
                write!(
                    f,
                    "{name}<{};{};{}>",
                    blocks.join("|"),
                    join(&transport.fans, ","),
                    join(&transport.monos, "|")
                )
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Standard { k, class, .. } => write!(f, "tau({k}; {class})"),
            Term::Diagonal { parts, class, .. } => write!(f, "tau[{}]({class})", join(parts, ",")),
            Term::General { ks, factors, .. } => {
                write!(f, "tau{{{}}}({})", join(ks, ","), join(factors, " (x) "))
            }
        }
    }
}

impl fmt::Display for DslExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        if self.terms.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&join(&self.terms, " * "))
    }
}

/// Resolves a class; `None` means the class is zero (a repeated odd factor).
fn resolve_class(
    c: &ClassExpr,
    table: &SymbolTable,
) -> Result<Option<(i8, ClassMonomial)>, ParseError> {
    let mut factors: Vec<ClassFactor> = Vec::new();
    let mut chern = [0u32; 3];
    for a in &c.atoms {
        match table.resolve(&a.name) {
            None => {
                return Err(a.pos.error(format!(
                    "unknown class `{}` (declare it as name:degree:parity)",
                    a.name
                )))
            }
            Some(SymbolRef::Unit) => {}
            Some(SymbolRef::Chern(k)) => chern[k as usize - 1] += a.power,
            Some(SymbolRef::Class(f)) => factors.extend(std::iter::repeat_n(f, a.power as usize)),
            Some(SymbolRef::Tensor { .. }) => {
                return Err(a
                    .pos
                    .error(format!("`{}` is a tensor class, not a class on X", a.name)))
            }
        }
    }
    Ok(ClassMonomial::from_factors(
        &factors,
        ChernMono::new(chern[0], chern[1], chern[2]),
    ))
}

fn resolve_chern(c: &ClassExpr, table: &SymbolTable) -> Result<ChernMono, ParseError> {
    match resolve_class(c, table)? {
        Some((_, m)) if m.factors().is_empty() => Ok(m.chern()),
        _ => Err(c.pos.error("transport factors must be Chern monomials")),
    }
}

fn resolve_tensor(
    factors: &[Factor],
    pos: Pos,
    table: &SymbolTable,
) -> Result<Option<(i8, TensorArg)>, ParseError> {
    let opaque = |f: &Factor| -> Option<(String, Pos)> {
        match f {
            Factor::Class(c) if c.atoms.len() == 1 && c.atoms[0].power == 1 => matches!(
                table.resolve(&c.atoms[0].name),
                Some(SymbolRef::Tensor { .. })
            )
            .then(|| (c.atoms[0].name.clone(), c.pos)),
            Factor::Transported { name, pos, .. } => Some((name.clone(), *pos)),
            _ => None,
        }
    };
    if factors.len() == 1 {
        if let Some((name, npos)) = opaque(&factors[0]) {
            let Some(SymbolRef::Tensor {
                id,
                arity,
                degree,
                odd,
            }) = table.resolve(&name)
            else {
                return Err(npos.error(format!("`{name}` is not a declared tensor class")));
            };
            let transport = match &factors[0] {
                Factor::Transported { transport, .. } => {
                    Some(resolve_transport(transport, arity, npos, table)?)
                }
                _ => None,
            };
            return Ok(Some((
                1,
                TensorArg::Opaque(TensorSymbol {
                    id,
                    arity,
                    degree,
                    odd,
                    transport,
                }),
            )));
        }
    }
    let mut sign = 1;
    let mut blocks = Vec::with_capacity(factors.len());
    for f in factors {
        if opaque(f).is_some() {
            return Err(pos.error("a tensor class cannot be combined with other factors"));
        }
        let (width, c) = match f {
            Factor::Class(c) => (1, c),
            Factor::Diag { width, class, .. } => (*width, class),
            Factor::Transported { .. } => unreachable!("handled above"),
        };
        let Some((s, class)) = resolve_class(c, table)? else {
            return Ok(None);
        };
        sign *= s;
        blocks.push(DiagonalBlock { class, width });
    }
    Ok(Some((sign, TensorArg::Factored(blocks))))
}

fn resolve_transport(
    t: &TransportExpr,
    arity: usize,
    pos: Pos,
    table: &SymbolTable,
) -> Result<Transport, ParseError> {
    if t.blocks.iter().flatten().any(|&x| x == 0) {
        return Err(pos.error("transport blocks are 1-based"));
    }
    let blocks: Vec<Vec<usize>> = t
        .blocks
        .iter()
        .map(|b| b.iter().map(|x| x - 1).collect())
        .collect();
    let checked =
        OrderedSetPartition::new(arity, blocks.clone()).map_err(|e| pos.error(e.to_string()))?;
    if checked.blocks() != &blocks[..] {
        return Err(pos.error("transport block elements must be increasing"));
    }
    if t.fans.len() != blocks.len() || t.monos.len() != blocks.len() || t.fans.contains(&0) {
        return Err(pos.error("transport needs one positive fan and one monomial per block"));
    }
    Ok(Transport {
        blocks,
        fans: t.fans.clone(),
        chern: t
            .monos
            .iter()
            .map(|m| resolve_chern(m, table))
            .collect::<Result<_, _>>()?,
    })
}

/// Resolves names and builds the word. Single-part diagonals become
/// standard insertions; nothing is reordered.
pub fn resolve(expr: &DslExpr, table: &SymbolTable) -> Result<DescendentWord, ParseError> {
    let mut sign: i8 = if expr.negated { -1 } else { 1 };
    let mut ins = Vec::with_capacity(expr.terms.len());
    let mut zero = false;
    for t in &expr.terms {
        match t {
            Term::Standard { k, class, .. } => match resolve_class(class, table)? {
                Some((s, class)) => {
                    sign *= s;
                    ins.push(Insertion::Standard { k: *k, class });
                }
                None => zero = true,
            },
            Term::Diagonal { parts, class, pos } => {
                let sigma = Partition::new(parts.clone()).map_err(|e| pos.error(e.to_string()))?;
                match resolve_class(class, table)? {
                    Some((s, class)) => {
                        sign *= s;
                        ins.push(if sigma.len() == 1 {
                            Insertion::Standard {
                                k: sigma.parts()[0] - 1,
                                class,
                            }
                        } else {
                            Insertion::Diagonal { sigma, class }
                        });
                    }
                    None => zero = true,
                }
            }
            Term::General { ks, factors, pos } => match resolve_tensor(factors, *pos, table)? {
                Some((s, delta)) => {
                    if delta.arity() != ks.len() {
                        return Err(pos.error(format!(
                            "{} indices for a class of arity {}",
                            ks.len(),
                            delta.arity()
                        )));
                    }
                    sign *= s;
                    ins.push(Insertion::General {
                        ks: ks.clone(),
                        delta,
                    });
                }
                None => zero = true,
            },
        }
    }
    if zero {
        return Ok(DescendentWord::zero());
    }
    Ok(DescendentWord {
        sign,
        insertions: ins,
    })
}

/// Parses and resolves in one step.
pub fn parse_word(text: &str, table: &SymbolTable) -> Result<DescendentWord, ParseError> {
    resolve(&parse_expr(text)?, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::CohomRing;

    fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        t.declare_spec("g1:2:even").unwrap();
        t.declare_spec("g2:4:even").unwrap();
        t.declare_spec("a:3:odd").unwrap();
        t.declare_spec("b:3:odd").unwrap();
        t.declare_spec("g:2:even").unwrap();
        t.declare_spec("D:6:even:3").unwrap();
        t
    }

    #[test]
    fn two_standard_insertions() {
        let w = parse_word("tau(2; g1) * tau(0; g2)", &table()).unwrap();
        assert_eq!(w.insertions.len(), 2);
        assert!(matches!(w.insertions[0], Insertion::Standard { k: 2, .. }));
    }

    #[test]
    fn single_part_diagonal_is_standard() {
        let t = table();
        assert_eq!(
            parse_word("tau[3](g)", &t).unwrap(),
            parse_word("tau(2; g)", &t).unwrap()
        );
    }

    #[test]
    fn general_arity_two() {
        let w = parse_word("tau{1,0}(a (x) b)", &table()).unwrap();
        match &w.insertions[0] {
            Insertion::General { ks, delta } => {
                assert_eq!(ks, &[1, 0]);
                assert_eq!(delta.arity(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_expr("tau(1; g)\n * tau(2 g)").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let e = parse_word("tau(0; zz)", &table()).unwrap_err();
        assert_eq!(e.column, 8);
        let e = parse_word("tau{0,0}(a)", &table()).unwrap_err();
        assert!(e.message.contains("arity"));
    }

    #[test]
    fn transported_round_trip() {
        let t = table();
        let s = "tau{0,0,1,0}(D<1.3|2;3,1;c3|1>)";
        let w = parse_word(s, &t).unwrap();
        assert_eq!(w.display(&t), s);
        assert_eq!(parse_expr(s).unwrap().to_string(), s);
    }

    #[test]
    fn ring_names_and_unit() {
        let ring = CohomRing::projective3();
        let t = SymbolTable::from_ring(&ring);
        let w = parse_word("tau(0; one) * tau(1; h.c1^2)", &t).unwrap();
        assert_eq!(w.display(&t), "tau(0; 1) * tau(1; h.c1^2)");
        assert_eq!(parse_word(&w.display(&t), &t).unwrap(), w);
    }

    #[test]
    fn repeated_odd_class_is_zero() {
        assert!(parse_word("tau(0; a.a)", &table()).unwrap().is_zero());
        let w = parse_word("tau(0; b.a)", &table()).unwrap();
        assert_eq!(w.sign, -1);
    }
}
