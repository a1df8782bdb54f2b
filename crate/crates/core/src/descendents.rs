//! Formal descendent insertions and their graded-commutative normal form.
//!
//! Classes inside insertions are [`ClassMonomial`]s: products of class
//! symbols (ring basis elements or declared opaque symbols) times a
//! monomial in the Chern classes. Symbols carry their degree and parity so
//! that signs never need a concrete ring.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::cohomology::{small_diagonal_push, CohClass, CohomRing, TensorClass};
use crate::error::{Error, Result};
use crate::partitions::{reorder_sign, Partition};
use crate::scalars::{ChernMono, GaussRat, ULaurent};

/// One class symbol: `id` indexes a [`SymbolTable`]; for tables built from
/// a ring, ids below the ring's rank are basis indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassFactor {
    pub id: u32,
    pub degree: u32,
    pub odd: bool,
}

/// `±`-free product of class symbols and Chern classes, factors sorted by
/// id. Construction reports the Koszul sign separately.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassMonomial {
    factors: Vec<ClassFactor>,
    chern: ChernMono,
}

impl ClassMonomial {
    pub fn one() -> Self {
        ClassMonomial::default()
    }

    pub fn factor(f: ClassFactor) -> Self {
        ClassMonomial {
            factors: vec![f],
            chern: ChernMono::ONE,
        }
    }

    pub fn chern_only(m: ChernMono) -> Self {
        ClassMonomial {
            factors: Vec::new(),
            chern: m,
        }
    }

    /// The product of `factors` in the given order: `None` if it vanishes
    /// (a repeated odd symbol), else the sign of sorting and the monomial.
    pub fn from_factors(factors: &[ClassFactor], chern: ChernMono) -> Option<(i8, ClassMonomial)> {
        let mut order: Vec<usize> = (0..factors.len()).collect();
        order.sort_by_key(|&i| factors[i]);
        let sorted: Vec<ClassFactor> = order.iter().map(|&i| factors[i]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1] && w[0].odd) {
            return None;
        }
        let odd: Vec<bool> = factors.iter().map(|f| f.odd).collect();
        Some((
            reorder_sign(&order, &odd),
            ClassMonomial {
                factors: sorted,
                chern,
            },
        ))
    }

    pub fn factors(&self) -> &[ClassFactor] {
        &self.factors
    }

    pub fn chern(&self) -> ChernMono {
        self.chern
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.chern.is_one()
    }

    /// Real cohomological degree; `c_k` has degree `2k`.
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.degree).sum::<u32>() + 2 * self.chern.degree()
    }

    pub fn odd(&self) -> bool {
        self.factors.iter().filter(|f| f.odd).count() % 2 == 1
    }

    /// `self · other`, with sign.
    pub fn mul(&self, other: &ClassMonomial) -> Option<(i8, ClassMonomial)> {
        let mut all = self.factors.clone();
        all.extend_from_slice(&other.factors);
        ClassMonomial::from_factors(&all, self.chern.mul(&other.chern))
    }

    pub fn with_chern(&self, m: &ChernMono) -> ClassMonomial {
        ClassMonomial {
            factors: self.factors.clone(),
            chern: self.chern.mul(m),
        }
    }
}

/// A block `Δ_{width*}(class)` inside a factored tensor argument.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiagonalBlock {
    pub class: ClassMonomial,
    pub width: usize,
}

/// The symbolic class `ι̂_*(Π_k m_k · φ_{P*}(ι^* θ_P^*(δ)))`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transport {
    /// Ordered blocks of `{0..arity}`, elements increasing.
    pub blocks: Vec<Vec<usize>>,
    /// Number of target factors each block fans out to.
    pub fans: Vec<usize>,
    /// Chern monomial multiplying each block.
    pub chern: Vec<ChernMono>,
}

impl Transport {
    /// True when the transport is the identity map on `δ`.
    pub fn is_trivial(&self) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(k, b)| b.len() == 1 && b[0] == k)
            && self.fans.iter().all(|&f| f == 1)
            && self.chern.iter().all(ChernMono::is_one)
    }

    pub fn target_arity(&self) -> usize {
        self.fans.iter().sum()
    }
}

/// An opaque class on `X^arity`, possibly transported.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorSymbol {
    pub id: u32,
    pub arity: usize,
    pub degree: u32,
    pub odd: bool,
    pub transport: Option<Transport>,
}

impl TensorSymbol {
    /// Arity after transport.
    pub fn arity(&self) -> usize {
        self.transport
            .as_ref()
            .map_or(self.arity, Transport::target_arity)
    }

    /// Degree after transport: Chern factors add `2·deg`, each extra
    /// diagonal factor adds 6.
    pub fn degree(&self) -> u32 {
        match &self.transport {
            None => self.degree,
            Some(t) => {
                let chern: u32 = t.chern.iter().map(|m| 2 * m.degree()).sum();
                self.degree + chern + 6 * (t.target_arity() - t.blocks.len()) as u32
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TensorArg {
    Factored(Vec<DiagonalBlock>),
    Opaque(TensorSymbol),
}

impl TensorArg {
    /// Plain tensor product `x1 ⊗ … ⊗ xr`.
    pub fn factored(classes: Vec<ClassMonomial>) -> Self {
        TensorArg::Factored(
            classes
                .into_iter()
                .map(|class| DiagonalBlock { class, width: 1 })
                .collect(),
        )
    }

    pub fn arity(&self) -> usize {
        match self {
            TensorArg::Factored(b) => b.iter().map(|b| b.width).sum(),
            TensorArg::Opaque(s) => s.arity(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            TensorArg::Factored(b) => b
                .iter()
                .map(|b| b.class.degree() + 6 * (b.width as u32 - 1))
                .sum(),
            TensorArg::Opaque(s) => s.degree(),
        }
    }

    pub fn odd(&self) -> bool {
        match self {
            TensorArg::Factored(b) => b.iter().filter(|b| b.class.odd()).count() % 2 == 1,
            TensorArg::Opaque(s) => s.odd,
        }
    }
}

/// `τ_k(γ)`, the diagonal `τ_σ(γ) = τ_{σ1−1,…}(γ·Δ)`, or the general
/// `τ_{k1,…,kr}(δ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Insertion {
    Standard {
        k: u32,
        class: ClassMonomial,
    },
    Diagonal {
        sigma: Partition,
        class: ClassMonomial,
    },
    General {
        ks: Vec<u32>,
        delta: TensorArg,
    },
}

impl Insertion {
    pub fn odd(&self) -> bool {
        match self {
            Insertion::Standard { class, .. } | Insertion::Diagonal { class, .. } => class.odd(),
            Insertion::General { delta, .. } => delta.odd(),
        }
    }

    /// Descendent indices `k_j`.
    pub fn indices(&self) -> Vec<u32> {
        match self {
            Insertion::Standard { k, .. } => vec![*k],
            Insertion::Diagonal { sigma, .. } => sigma.parts().iter().map(|p| p - 1).collect(),
            Insertion::General { ks, .. } => ks.clone(),
        }
    }

    /// `Σ_j (k_j + 1)`: the size of the partition indexing the insertion.
    pub fn weight(&self) -> u32 {
        self.indices().iter().map(|k| k + 1).sum()
    }

    /// Real degree of the class on `X^r` the insertion carries.
    pub fn class_degree(&self) -> u32 {
        match self {
            Insertion::Standard { class, .. } => class.degree(),
            Insertion::Diagonal { sigma, class } => class.degree() + 6 * (sigma.len() as u32 - 1),
            Insertion::General { delta, .. } => delta.degree(),
        }
    }

    /// Expands the insertion into an equivalent product with no general
    /// factored insertions and no single-part diagonals.
    fn split(&self) -> Vec<Insertion> {
        match self {
            Insertion::Diagonal { sigma, class } if sigma.len() == 1 => vec![Insertion::Standard {
                k: sigma.parts()[0] - 1,
                class: class.clone(),
            }],
            Insertion::General {
                ks,
                delta: TensorArg::Factored(blocks),
            } => {
                let mut out = Vec::with_capacity(blocks.len());
                let mut at = 0;
                for b in blocks {
                    let parts = ks[at..at + b.width].iter().map(|k| k + 1).collect();
                    at += b.width;
                    let sigma = Partition::new(parts).expect("positive parts");
                    out.extend(
                        Insertion::Diagonal {
                            sigma,
                            class: b.class.clone(),
                        }
                        .split(),
                    );
                }
                out
            }
            Insertion::General {
                ks,
                delta: TensorArg::Opaque(s),
            } if s.transport.as_ref().is_some_and(Transport::is_trivial) => {
                vec![Insertion::General {
                    ks: ks.clone(),
                    delta: TensorArg::Opaque(TensorSymbol {
                        transport: None,
                        ..s.clone()
                    }),
                }]
            }
            other => vec![other.clone()],
        }
    }
}

/// A signed product of insertions. A sign of 0 marks the zero word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DescendentWord {
    pub sign: i8,
    pub insertions: Vec<Insertion>,
}

impl DescendentWord {
    pub fn new(insertions: Vec<Insertion>) -> Self {
        DescendentWord {
            sign: 1,
            insertions,
        }
    }

    pub fn zero() -> Self {
        DescendentWord {
            sign: 0,
            insertions: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn parities(&self) -> Vec<bool> {
        self.insertions.iter().map(Insertion::odd).collect()
    }

    /// Sorts insertions into the canonical order with the Koszul sign; a
    /// repeated odd insertion makes the word vanish. Does not rewrite
    /// individual insertions.
    pub fn canonical_order(&self) -> DescendentWord {
        if self.is_zero() {
            return DescendentWord::zero();
        }
        let mut order: Vec<usize> = (0..self.insertions.len()).collect();
        order.sort_by(|&a, &b| self.insertions[a].cmp(&self.insertions[b]));
        let sorted: Vec<Insertion> = order.iter().map(|&i| self.insertions[i].clone()).collect();
        if sorted.windows(2).any(|w| w[0] == w[1] && w[0].odd()) {
            return DescendentWord::zero();
        }
        DescendentWord {
            sign: self.sign * reorder_sign(&order, &self.parities()),
            insertions: sorted,
        }
    }

    /// Full normal form: single-part diagonals become standard insertions,
    /// factored general insertions split into products, trivial transports
    /// are dropped, then the canonical order is applied. Idempotent.
    pub fn normalize(&self) -> DescendentWord {
        if self.is_zero() {
            return DescendentWord::zero();
        }
        let expanded: Vec<Insertion> = self.insertions.iter().flat_map(Insertion::split).collect();
        DescendentWord {
            sign: self.sign,
            insertions: expanded,
        }
        .canonical_order()
    }

    /// Concatenation, no sign.
    pub fn concat(&self, other: &DescendentWord) -> DescendentWord {
        let mut ins = self.insertions.clone();
        ins.extend_from_slice(&other.insertions);
        DescendentWord {
            sign: self.sign * other.sign,
            insertions: ins,
        }
    }

    pub fn display(&self, table: &SymbolTable) -> String {
        let body = display_insertions(&self.insertions, table);
        match self.sign {
            0 => "0".into(),
            -1 => format!("-{body}"),
            _ => body,
        }
    }
}

/// A linear combination of canonical words with scalar Laurent
/// coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformedExpr {
    terms: BTreeMap<Vec<Insertion>, ULaurent>,
}

impl TransformedExpr {
    pub fn new() -> Self {
        TransformedExpr::default()
    }

    /// `coeff · word`, normalized.
    pub fn single(word: &DescendentWord, coeff: &ULaurent) -> Self {
        let mut e = TransformedExpr::new();
        e.add_word(word, coeff);
        e
    }

    pub fn add_word(&mut self, word: &DescendentWord, coeff: &ULaurent) {
        let w = word.normalize();
        if w.is_zero() {
            return;
        }
        let c = if w.sign < 0 { -coeff } else { coeff.clone() };
        self.add_canonical(w.insertions, &c);
    }

    fn add_canonical(&mut self, key: Vec<Insertion>, c: &ULaurent) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&key) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn add(&self, other: &TransformedExpr) -> TransformedExpr {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_canonical(k.clone(), c);
        }
        out
    }

    pub fn add_assign(&mut self, other: &TransformedExpr) {
        for (k, c) in &other.terms {
            self.add_canonical(k.clone(), c);
        }
    }

    pub fn neg(&self) -> TransformedExpr {
        TransformedExpr {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &ULaurent) -> TransformedExpr {
        let mut out = TransformedExpr::new();
        for (k, v) in &self.terms {
            out.add_canonical(k.clone(), &(v * c));
        }
        out
    }

    /// Product: words concatenate in order, then normalize.
    pub fn mul(&self, other: &TransformedExpr) -> TransformedExpr {
        let mut out = TransformedExpr::new();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut w = k1.clone();
                w.extend_from_slice(k2);
                out.add_word(&DescendentWord::new(w), &(c1 * c2));
            }
        }
        out
    }

    pub fn truncate(&self, n: i64) -> TransformedExpr {
        let mut out = TransformedExpr::new();
        for (k, c) in &self.terms {
            out.add_canonical(k.clone(), &c.truncate(n));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Insertion>, &ULaurent)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &[Insertion]) -> Option<&ULaurent> {
        self.terms.get(word)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms whose total insertion weight equals `w`.
    pub fn stratum(&self, w: u32) -> TransformedExpr {
        TransformedExpr {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.iter().map(Insertion::weight).sum::<u32>() == w)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// One term per line: `(coefficient) * word`.
    pub fn display(&self, table: &SymbolTable) -> String {
        if self.terms.is_empty() {
            return "0\n".into();
        }
        let mut out = String::new();
        for (k, c) in &self.terms {
            let _ = writeln!(out, "({c}) * {}", display_insertions(k, table));
        }
        out
    }
}

fn display_insertions(ins: &[Insertion], table: &SymbolTable) -> String {
    if ins.is_empty() {
        return "1".into();
    }
    ins.iter()
        .map(|i| table.insertion(i))
        .collect::<Vec<_>>()
        .join(" * ")
}

/// What a name in the expression language refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolRef {
    Unit,
    Chern(u32),
    Class(ClassFactor),
    Tensor {
        id: u32,
        arity: usize,
        degree: u32,
        odd: bool,
    },
}

#[derive(Clone, Debug)]
struct Symbol {
    name: String,
    degree: u32,
    odd: bool,
    arity: Option<usize>,
}

/// Names of class and tensor symbols. Built from a ring (ids are basis
/// indices and the unit names the empty product) and extended by
/// declarations `name:deg:parity[:arity]`.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, u32>,
    unit_name: Option<String>,
    ring_rank: usize,
}

fn valid_name(s: &str) -> bool {
    let mut c = s.chars();
    c.next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && c.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "c1" | "c2" | "c3" | "tau" | "x" | "i" | "u" | "q")
}

impl SymbolTable {
    pub fn new() -> Self {
        SymbolTable::default()
    }

    pub fn from_ring(ring: &CohomRing) -> Self {
        let mut t = SymbolTable::new();
        for i in 0..ring.rank() {
            t.by_name.insert(ring.name(i).to_string(), i as u32);
            t.symbols.push(Symbol {
                name: ring.name(i).to_string(),
                degree: ring.degree(i),
                odd: ring.is_odd(i),
                arity: None,
            });
        }
        t.unit_name = Some(ring.name(ring.unit_index()).to_string());
        t.ring_rank = ring.rank();
        t
    }

    /// Number of symbols that are ring basis elements.
    pub fn ring_rank(&self) -> usize {
        self.ring_rank
    }

    pub fn declare(
        &mut self,
        name: &str,
        degree: u32,
        odd: bool,
        arity: Option<usize>,
    ) -> Result<SymbolRef> {
        if !valid_name(name) {
            return Err(Error::InvalidInput(format!(
                "`{name}` cannot be used as a symbol name"
            )));
        }
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateSymbol(name.into()));
        }
        if odd != (degree % 2 == 1) {
            return Err(Error::InvalidInput(format!(
                "`{name}`: parity disagrees with degree {degree}"
            )));
        }
        if arity == Some(0) {
            return Err(Error::InvalidInput(format!(
                "`{name}`: arity must be positive"
            )));
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(Symbol {
            name: name.into(),
            degree,
            odd,
            arity,
        });
        self.by_name.insert(name.into(), id);
        Ok(self.resolve(name).expect("just declared"))
    }

    /// Parses `name:deg:parity` or `name:deg:parity:arity`.
    pub fn declare_spec(&mut self, spec: &str) -> Result<SymbolRef> {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let bad = || {
            Error::InvalidInput(format!(
                "declaration `{spec}` is not name:deg:parity[:arity]"
            ))
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let degree: u32 = parts[1].parse().map_err(|_| bad())?;
        let odd = match parts[2] {
            "even" => false,
            "odd" => true,
            _ => return Err(bad()),
        };
        let arity = match parts.get(3) {
            Some(a) => Some(a.parse::<usize>().map_err(|_| bad())?),
            None => None,
        };
        self.declare(parts[0], degree, odd, arity)
    }

    pub fn resolve(&self, name: &str) -> Option<SymbolRef> {
        match name {
            "1" => return Some(SymbolRef::Unit),
            "c1" => return Some(SymbolRef::Chern(1)),
            "c2" => return Some(SymbolRef::Chern(2)),
            "c3" => return Some(SymbolRef::Chern(3)),
            _ => {}
        }
        if self.unit_name.as_deref() == Some(name) {
            return Some(SymbolRef::Unit);
        }
        let id = *self.by_name.get(name)?;
        let s = &self.symbols[id as usize];
        Some(match s.arity {
            None => SymbolRef::Class(ClassFactor {
                id,
                degree: s.degree,
                odd: s.odd,
            }),
            Some(arity) => SymbolRef::Tensor {
                id,
                arity,
                degree: s.degree,
                odd: s.odd,
            },
        })
    }

    pub fn name(&self, id: u32) -> &str {
        self.symbols
            .get(id as usize)
            .map_or("?", |s| s.name.as_str())
    }

    /// `h.g.c1^2`, or `1` for the empty product.
    pub fn class(&self, c: &ClassMonomial) -> String {
        let mut parts: Vec<String> = c
            .factors
            .iter()
            .map(|f| self.name(f.id).to_string())
            .collect();
        for k in 1..=3 {
            match c.chern.exponent(k) {
                0 => {}
                1 => parts.push(format!("c{k}")),
                e => parts.push(format!("c{k}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(".")
        }
    }

    pub fn tensor(&self, t: &TensorArg) -> String {
        match t {
            TensorArg::Factored(blocks) => blocks
                .iter()
                .map(|b| {
                    if b.width == 1 {
                        self.class(&b.class)
                    } else {
                        format!("diag{}({})", b.width, self.class(&b.class))
                    }
                })
                .collect::<Vec<_>>()
                .join(" (x) "),
            TensorArg::Opaque(s) => {
                let mut out = self.name(s.id).to_string();
                if let Some(t) = &s.transport {
                    let blocks: Vec<String> = t
                        .blocks
                        .iter()
                        .map(|b| {
                            b.iter()
                                .map(|x| (x + 1).to_string())
                                .collect::<Vec<_>>()
                                .join(".")
                        })
                        .collect();
                    let fans: Vec<String> = t.fans.iter().map(usize::to_string).collect();
                    let monos: Vec<String> = t
                        .chern
                        .iter()
                        .map(|m| self.class(&ClassMonomial::chern_only(*m)))
                        .collect();
                    let _ = write!(
                        out,
                        "<{};{};{}>",
                        blocks.join("|"),
                        fans.join(","),
                        monos.join("|")
                    );
                }
                out
            }
        }
    }

    pub fn insertion(&self, i: &Insertion) -> String {
        let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        match i {
            Insertion::Standard { k, class } => format!("tau({k}; {})", self.class(class)),
            Insertion::Diagonal { sigma, class } => {
                format!("tau[{}]({})", sigma.comma_form(), self.class(class))
            }
            Insertion::General { ks, delta } => {
                format!("tau{{{}}}({})", list(ks), self.tensor(delta))
            }
        }
    }
}

/// The class `Π factors · c^m` in the ring. Opaque symbols cannot be
/// evaluated.
pub fn class_in_ring(ring: &CohomRing, c: &ClassMonomial, table: &SymbolTable) -> Result<CohClass> {
    let mut out = ring.unit();
    for f in &c.factors {
        if f.id as usize >= ring.rank() {
            return Err(Error::OpaqueEvaluation(table.name(f.id).to_string()));
        }
        out = ring.cup(&out, &ring.basis(f.id as usize))?;
    }
    for k in 1..=3 {
        for _ in 0..c.chern.exponent(k) {
            out = ring.cup(&out, &ring.chern(k))?;
        }
    }
    Ok(out)
}

/// The monomial for basis element `i`: the unit is the empty product.
pub fn basis_monomial(ring: &CohomRing, i: usize) -> ClassMonomial {
    if i == ring.unit_index() {
        ClassMonomial::one()
    } else {
        ClassMonomial::factor(ClassFactor {
            id: i as u32,
            degree: ring.degree(i),
            odd: ring.is_odd(i),
        })
    }
}

/// The class a single insertion carries on `X^r`, with its indices.
fn insertion_tensor(
    ring: &CohomRing,
    ins: &Insertion,
    table: &SymbolTable,
) -> Result<(Vec<u32>, TensorClass)> {
    match ins {
        Insertion::Standard { k, class } => {
            let c = class_in_ring(ring, class, table)?;
            Ok((vec![*k], TensorClass::from_factors(ring, &[c])?))
        }
        Insertion::Diagonal { sigma, class } => {
            let c = class_in_ring(ring, class, table)?;
            Ok((ins.indices(), small_diagonal_push(ring, &c, sigma.len())?))
        }
        Insertion::General { ks, delta } => match delta {
            TensorArg::Opaque(s) => Err(Error::OpaqueEvaluation(table.name(s.id).to_string())),
            TensorArg::Factored(blocks) => {
                let mut t = TensorClass::word(ring, Vec::new(), GaussRat::one());
                for b in blocks {
                    let c = class_in_ring(ring, &b.class, table)?;
                    t = t.tensor(&small_diagonal_push(ring, &c, b.width)?)?;
                }
                Ok((ks.clone(), t))
            }
        },
    }
}

/// `τ_{ks}(t)` expanded over the Künneth basis into products of standard
/// insertions of basis classes.
pub fn expand_general(ring: &CohomRing, ks: &[u32], t: &TensorClass) -> TransformedExpr {
    let mut out = TransformedExpr::new();
    for (w, c) in t.terms() {
        let ins = w
            .iter()
            .zip(ks)
            .map(|(&i, &k)| Insertion::Standard {
                k,
                class: basis_monomial(ring, i),
            })
            .collect();
        out.add_word(&DescendentWord::new(ins), &ULaurent::scalar(c.clone()));
    }
    out
}

/// Rewrites every term over the ring's Künneth basis, as products of
/// standard insertions of basis elements.
pub fn evaluate_on_ring(
    expr: &TransformedExpr,
    ring: &CohomRing,
    table: &SymbolTable,
) -> Result<TransformedExpr> {
    let mut out = TransformedExpr::new();
    for (word, coeff) in expr.terms() {
        let mut acc = TransformedExpr::single(&DescendentWord::new(Vec::new()), coeff);
        for ins in word {
            let (ks, t) = insertion_tensor(ring, ins, table)?;
            acc = acc.mul(&expand_general(ring, &ks, &t));
        }
        out.add_assign(&acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(id: u32, degree: u32) -> ClassMonomial {
        ClassMonomial::factor(ClassFactor {
            id,
            degree,
            odd: degree % 2 == 1,
        })
    }

    fn std_ins(k: u32, c: ClassMonomial) -> Insertion {
        Insertion::Standard { k, class: c }
    }

    #[test]
    fn even_swap_has_no_sign() {
        let a = DescendentWord::new(vec![std_ins(1, sym(0, 2)), std_ins(0, sym(1, 4))]);
        let b = DescendentWord::new(vec![std_ins(0, sym(1, 4)), std_ins(1, sym(0, 2))]);
        assert_eq!(a.normalize(), b.normalize());
        assert_eq!(a.normalize().sign, 1);
    }

    #[test]
    fn odd_swap_flips_sign() {
        let a = DescendentWord::new(vec![std_ins(0, sym(0, 3)), std_ins(0, sym(1, 3))]);
        let b = DescendentWord::new(vec![std_ins(0, sym(1, 3)), std_ins(0, sym(0, 3))]);
        let (na, nb) = (a.normalize(), b.normalize());
        assert_eq!(na.insertions, nb.insertions);
        assert_eq!(na.sign, -nb.sign);
        let twice = DescendentWord::new(vec![std_ins(0, sym(0, 3)), std_ins(0, sym(0, 3))]);
        assert!(twice.normalize().is_zero());
    }

    #[test]
    fn shift_by_one() {
        let d = DescendentWord::new(vec![Insertion::Diagonal {
            sigma: Partition::single(3),
            class: sym(0, 2),
        }]);
        assert_eq!(d.normalize().insertions, vec![std_ins(2, sym(0, 2))]);
    }

    #[test]
    fn factored_general_splits() {
        let g = Insertion::General {
            ks: vec![1, 0, 2],
            delta: TensorArg::factored(vec![sym(2, 3), sym(1, 2), sym(0, 3)]),
        };
        let w = DescendentWord::new(vec![g]).normalize();
        let direct = DescendentWord::new(vec![
            std_ins(1, sym(2, 3)),
            std_ins(0, sym(1, 2)),
            std_ins(2, sym(0, 3)),
        ])
        .normalize();
        assert_eq!(w, direct);
    }

    #[test]
    fn normalize_is_idempotent() {
        let w = DescendentWord::new(vec![
            std_ins(0, sym(1, 3)),
            Insertion::Diagonal {
                sigma: Partition::new(vec![2, 1]).unwrap(),
                class: sym(0, 3),
            },
            std_ins(2, sym(2, 2)),
        ]);
        let n = w.normalize();
        assert_eq!(n.normalize(), n);
    }

    #[test]
    fn class_monomial_signs() {
        let a = ClassFactor {
            id: 2,
            degree: 3,
            odd: true,
        };
        let b = ClassFactor {
            id: 1,
            degree: 3,
            odd: true,
        };
        let (s, m) = ClassMonomial::from_factors(&[a, b], ChernMono::ONE).unwrap();
        assert_eq!(s, -1);
        assert_eq!(m.factors(), &[b, a]);
        assert!(ClassMonomial::from_factors(&[a, a], ChernMono::ONE).is_none());
    }

    #[test]
    fn evaluation_expands_diagonal() {
        let r = CohomRing::projective3();
        let t = SymbolTable::from_ring(&r);
        let one = ClassMonomial::one();
        let e = TransformedExpr::single(
            &DescendentWord::new(vec![Insertion::Diagonal {
                sigma: Partition::new(vec![1, 1]).unwrap(),
                class: one,
            }]),
            &ULaurent::one(),
        );
        let v = evaluate_on_ring(&e, &r, &t).unwrap();
        // Σ_i τ0(h^i) τ0(h^{3−i}), with τ0(h)τ0(h2) appearing twice
        assert_eq!(v.len(), 2);
        let h = basis_monomial(&r, 1);
        let h2 = basis_monomial(&r, 2);
        let key = DescendentWord::new(vec![std_ins(0, h), std_ins(0, h2)])
            .normalize()
            .insertions;
        assert_eq!(
            v.coeff(&key),
            Some(&ULaurent::scalar(GaussRat::from_int(2)))
        );
    }
}
