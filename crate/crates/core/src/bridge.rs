//! Theory tables and the series comparison under `−q = e^{iu}`.
//!
//! The pairs side of a correspondence is `(−q)^{−d/2}·Z_P(lhs)` expanded in
//! `u`; the GW side is `(−iu)^d · Σ_w c_w · Z_GW(w)` over the terms of the
//! transformed expression.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correspondence::{expected_homology_degree, DegreeLedger};
use crate::descendents::{DescendentWord, Insertion, SymbolTable, TransformedExpr};
use crate::dsl;
use crate::error::{Error, ParseError, Result};
use crate::scalars::{expand_change_of_variables, GaussRat, QPoly, QRational, ULaurent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Pairs,
    Gw,
}

impl Side {
    fn parse(s: &str) -> Option<Side> {
        match s {
            "P" => Some(Side::Pairs),
            "GW" => Some(Side::Gw),
            _ => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Pairs => "P",
            Side::Gw => "GW",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Series {
    Pairs(QRational),
    Gw(ULaurent),
}

impl Series {
    fn neg(&self) -> Series {
        match self {
            Series::Pairs(f) => Series::Pairs(-f),
            Series::Gw(s) => Series::Gw(-s),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Series::Pairs(f) => f.is_zero(),
            Series::Gw(s) => s.is_zero(),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::Pairs(x) => write!(f, "{x}"),
            Series::Gw(x) => write!(f, "{x}"),
        }
    }
}

/// Partition-function data for one curve class on one side. Keys are
/// insertion words in canonical order; a word's sign is folded into its
/// series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryTable {
    pub side: Side,
    pub beta: String,
    pub d_beta: i64,
    pub dim_y: i64,
    entries: BTreeMap<Vec<Insertion>, Series>,
}

fn word_text(key: &[Insertion], table: &SymbolTable) -> String {
    DescendentWord::new(key.to_vec()).display(table)
}

impl TheoryTable {
    pub fn new(side: Side, beta: impl Into<String>, d_beta: i64, dim_y: i64) -> Self {
        TheoryTable {
            side,
            beta: beta.into(),
            d_beta,
            dim_y,
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Insertion>, &Series)> {
        self.entries.iter()
    }

    /// Adds `word ↦ series`. A key already present must carry the same
    /// series.
    pub fn insert(
        &mut self,
        word: &DescendentWord,
        series: Series,
        table: &SymbolTable,
    ) -> Result<()> {
        let side_ok = matches!(
            (&series, self.side),
            (Series::Pairs(_), Side::Pairs) | (Series::Gw(_), Side::Gw)
        );
        if !side_ok {
            return Err(Error::MalformedTable(format!(
                "series does not belong to side {}",
                self.side
            )));
        }
        let w = word.canonical_order();
        if w.is_zero() {
            if series.is_zero() {
                return Ok(());
            }
            return Err(Error::InconsistentTable {
                first: word.display(table),
                second: "0".into(),
            });
        }
        let series = if w.sign < 0 { series.neg() } else { series };
        self.put(w.insertions, series, &word.display(table), table)
    }

    fn put(
        &mut self,
        key: Vec<Insertion>,
        series: Series,
        source: &str,
        table: &SymbolTable,
    ) -> Result<()> {
        match self.entries.get(&key) {
            Some(old) if *old != series => Err(Error::InconsistentTable {
                first: word_text(&key, table),
                second: source.to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(key, series);
                Ok(())
            }
        }
    }

    /// Looks up a word, applying its canonical-order sign.
    pub fn get(&self, word: &DescendentWord) -> Option<Series> {
        let w = word.canonical_order();
        if w.is_zero() {
            return Some(match self.side {
                Side::Pairs => Series::Pairs(QRational::zero()),
                Side::Gw => Series::Gw(ULaurent::zero()),
            });
        }
        let s = self.entries.get(&w.insertions)?;
        Some(if w.sign < 0 { s.neg() } else { s.clone() })
    }

    pub fn parse(text: &str, table: &SymbolTable) -> Result<TheoryTable> {
        let mut side = None;
        let mut beta = String::new();
        let mut d_beta = None;
        let mut dim_y = 0;
        let mut rows = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("series") {
                rows.push((line_no, raw, rest));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ParseError::at_line(line_no, "expected `key=value` or a `series` line")
            })?;
            let value = value.trim();
            let int = |v: &str| {
                v.parse::<i64>()
                    .map_err(|_| ParseError::at_line(line_no, format!("`{v}` is not an integer")))
            };
            match key.trim() {
                "side" => {
                    side = Some(Side::parse(value).ok_or_else(|| {
                        ParseError::at_line(line_no, format!("unknown side `{value}`"))
                    })?)
                }
                "beta" => beta = value.to_string(),
                "dbeta" => d_beta = Some(int(value)?),
                "dimy" => dim_y = int(value)?,
                other => {
                    return Err(
                        ParseError::at_line(line_no, format!("unknown header `{other}`")).into(),
                    )
                }
            }
        }
        let side = side.ok_or_else(|| Error::MalformedTable("missing `side=` header".into()))?;
        let d_beta =
            d_beta.ok_or_else(|| Error::MalformedTable("missing `dbeta=` header".into()))?;
        let mut t = TheoryTable::new(side, beta, d_beta, dim_y);
        for (line_no, raw, rest) in rows {
            let (word, series) = parse_row(line_no, raw, rest, side, table)?;
            t.insert(&word, series, table)?;
        }
        Ok(t)
    }

    pub fn serialize(&self, table: &SymbolTable) -> String {
        let mut out = format!("side={}\n", self.side);
        if !self.beta.is_empty() {
            out.push_str(&format!("beta={}\n", self.beta));
        }
        out.push_str(&format!("dbeta={}\ndimy={}\n", self.d_beta, self.dim_y));
        for (k, s) in &self.entries {
            out.push_str(&format!(
                "series side={} word=\"{}\" = {s}\n",
                self.side,
                word_text(k, table)
            ));
        }
        out
    }
}

fn parse_row(
    line_no: usize,
    raw: &str,
    rest: &str,
    side: Side,
    table: &SymbolTable,
) -> Result<(DescendentWord, Series)> {
    let err = |m: &str| ParseError::at_line(line_no, m.to_string());
    let rest = rest.trim_start();
    let rest = rest
        .strip_prefix("side=")
        .ok_or_else(|| err("expected `side=`"))?;
    let (row_side, rest) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| err("expected `word=`"))?;
    if Side::parse(row_side) != Some(side) {
        return Err(err(&format!(
            "row side `{row_side}` differs from the header side {side}"
        ))
        .into());
    }
    let rest = rest.trim_start();
    let rest = rest
        .strip_prefix("word=\"")
        .ok_or_else(|| err("expected `word=\"...\"`"))?;
    let (word_src, rest) = rest
        .split_once('"')
        .ok_or_else(|| err("unterminated word"))?;
    let value = rest
        .trim_start()
        .strip_prefix('=')
        .ok_or_else(|| err("expected `=` before the series"))?
        .trim();
    let word_col = raw.find(word_src).unwrap_or(0);
    let word = dsl::parse_word(word_src, table).map_err(|e| {
        ParseError::new(
            line_no,
            if e.line == 1 {
                word_col + e.column
            } else {
                e.column
            },
            e.message,
        )
    })?;
    let series = match side {
        Side::Pairs => Series::Pairs(QRational::parse(value).map_err(|e| e.on_line(line_no))?),
        Side::Gw => Series::Gw(ULaurent::parse(value).map_err(|e| e.on_line(line_no))?),
    };
    Ok((word, series))
}

/// Rewrites every key into its full normal form: factored general
/// insertions become products of standard insertions. Keys that collide
/// must carry equal series.
pub fn factorization_reduce(t: &TheoryTable, table: &SymbolTable) -> Result<TheoryTable> {
    let mut out = TheoryTable::new(t.side, t.beta.clone(), t.d_beta, t.dim_y);
    for (k, s) in &t.entries {
        let source = word_text(k, table);
        let w = DescendentWord::new(k.clone()).normalize();
        if w.is_zero() {
            if s.is_zero() {
                continue;
            }
            return Err(Error::InconsistentTable {
                first: source,
                second: "0".into(),
            });
        }
        let s = if w.sign < 0 { s.neg() } else { s.clone() };
        out.put(w.insertions, s, &source, table)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Both sides agree through `u^order`.
    Equal { order: i64 },
    /// The series first differ at `u^first_power`.
    Unequal { first_power: i64 },
    /// Words with no table entry.
    Incomplete { missing: Vec<String> },
}

#[derive(Clone, Debug)]
pub struct BridgeReport {
    pub verdict: Verdict,
    pub lhs: Option<ULaurent>,
    pub rhs: Option<ULaurent>,
    pub lhs_degree: i64,
    pub rhs_degrees: BTreeSet<i64>,
}

impl BridgeReport {
    pub fn degrees_agree(&self) -> bool {
        self.rhs_degrees.iter().all(|&d| d == self.lhs_degree)
    }
}

impl fmt::Display for BridgeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Equal { order } => writeln!(f, "equal to order {order}")?,
            Verdict::Unequal { first_power } => {
                writeln!(f, "unequal: first discrepancy at u^{first_power}")?;
                if let (Some(l), Some(r)) = (&self.lhs, &self.rhs) {
                    let show =
                        |s: &ULaurent| s.scalar_coeff(*first_power).unwrap_or_else(GaussRat::zero);
                    writeln!(f, "  pairs side coefficient: {}", show(l))?;
                    writeln!(f, "  gw side coefficient:    {}", show(r))?;
                }
            }
            Verdict::Incomplete { missing } => {
                writeln!(
                    f,
                    "incomplete: {} word(s) missing from the tables",
                    missing.len()
                )?;
                for m in missing {
                    writeln!(f, "  missing: {m}")?;
                }
            }
        }
        let rhs: Vec<String> = self.rhs_degrees.iter().map(i64::to_string).collect();
        writeln!(
            f,
            "homology degree: pairs side {}, gw side {}",
            self.lhs_degree,
            rhs.join(",")
        )?;
        if let Some(l) = &self.lhs {
            writeln!(f, "pairs side: {l}")?;
        }
        if let Some(r) = &self.rhs {
            writeln!(f, "gw side: {r}")?;
        }
        Ok(())
    }
}

fn ledger_degree(t: &TheoryTable, ins: &[Insertion]) -> i64 {
    expected_homology_degree(&DegreeLedger::from_insertions(t.d_beta, t.dim_y, ins))
}

/// Compares `(−q)^{−d/2}·zp[lhs]` with `(−iu)^d·Σ_w c_w·zgw[w]` through
/// `u^order`, where `bar = Σ_w c_w·w`.
pub fn check_correspondence(
    lhs: &DescendentWord,
    bar: &TransformedExpr,
    zp: &TheoryTable,
    zgw: &TheoryTable,
    order: i64,
    table: &SymbolTable,
) -> Result<BridgeReport> {
    if zp.side != Side::Pairs || zgw.side != Side::Gw {
        return Err(Error::MalformedTable(
            "expected a pairs table and a gw table".into(),
        ));
    }
    if zp.d_beta != zgw.d_beta || zp.dim_y != zgw.dim_y {
        return Err(Error::MalformedTable(
            "the two tables disagree on dbeta or dimy".into(),
        ));
    }
    let zp = factorization_reduce(zp, table)?;
    let zgw = factorization_reduce(zgw, table)?;
    let d = zp.d_beta;
    let lhs_norm = lhs.normalize();
    let lhs_degree = ledger_degree(&zp, &lhs.insertions);
    let rhs_degrees = bar.terms().map(|(w, _)| ledger_degree(&zgw, w)).collect();

    let mut missing = Vec::new();
    let lhs_series = match zp.get(&lhs_norm) {
        Some(Series::Pairs(f)) => Some(expand_change_of_variables(&f, d, order)?),
        _ => {
            missing.push(format!("P: {}", lhs.display(table)));
            None
        }
    };
    let mut sum = ULaurent::zero();
    for (w, c) in bar.terms() {
        match zgw.get(&DescendentWord::new(w.clone())) {
            Some(Series::Gw(s)) => sum = &sum + &(c * &s),
            _ => missing.push(format!("GW: {}", word_text(w, table))),
        }
    }
    if !missing.is_empty() {
        return Ok(BridgeReport {
            verdict: Verdict::Incomplete { missing },
            lhs: lhs_series,
            rhs: None,
            lhs_degree,
            rhs_degrees,
        });
    }
    let lhs_series = lhs_series.expect("present when nothing is missing");
    let rhs = (&ULaurent::minus_iu_power(d) * &sum).truncate(order);
    let verdict = match lhs_series.first_discrepancy(&rhs) {
        Some(k) => Verdict::Unequal { first_power: k },
        None => Verdict::Equal {
            order: [lhs_series.order(), rhs.order()]
                .into_iter()
                .flatten()
                .fold(order, i64::min),
        },
    };
    Ok(BridgeReport {
        verdict,
        lhs: Some(lhs_series),
        rhs: Some(rhs),
        lhs_degree,
        rhs_degrees,
    })
}

/// Tables that satisfy a correspondence by construction.
#[derive(Clone, Debug)]
pub struct SyntheticFixture {
    pub zp: TheoryTable,
    pub zgw: TheoryTable,
    /// The word whose GW series was solved for.
    pub pivot: Option<Vec<Insertion>>,
}

fn small_gauss(rng: &mut ChaCha8Rng) -> GaussRat {
    GaussRat::complex(rng.random_range(-3..=3), rng.random_range(-2..=2))
}

/// A rational function with a pole of order `pole` at `q = −1`.
fn random_rational(rng: &mut ChaCha8Rng, pole: usize) -> QRational {
    let num: Vec<GaussRat> = (0..rng.random_range(1..=4))
        .map(|_| small_gauss(rng))
        .collect();
    let mut den = QPoly::one();
    for _ in 0..pole {
        den = &den * &QPoly::from_ints(&[1, 1]);
    }
    let r = [2, 3, -2, -3][rng.random_range(0..4)];
    den = &den * &QPoly::from_ints(&[1, r]);
    QRational::new(QPoly::new(num), den).expect("nonzero denominator")
}

fn random_gw(rng: &mut ChaCha8Rng) -> ULaurent {
    let lo = rng.random_range(-2..=0);
    ULaurent::from_scalars((lo..=lo + 3).map(|k| (k, small_gauss(rng))), None)
}

/// Random `zp` for `lhs` and random exact `zgw` for all but one word of
/// `bar`; the remaining series is solved for so that the correspondence
/// holds through `u^order`.
pub fn synthetic_fixture(
    lhs: &DescendentWord,
    bar: &TransformedExpr,
    d_beta: i64,
    dim_y: i64,
    order: i64,
    seed: u64,
    table: &SymbolTable,
) -> Result<SyntheticFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut zp = TheoryTable::new(Side::Pairs, "synthetic", d_beta, dim_y);
    let mut zgw = TheoryTable::new(Side::Gw, "synthetic", d_beta, dim_y);
    let lhs = lhs.normalize();
    let Some((pivot, pivot_coeff)) = bar.terms().min_by_key(|(_, c)| c.lowest()) else {
        zp.insert(&lhs, Series::Pairs(QRational::zero()), table)?;
        return Ok(SyntheticFixture {
            zp,
            zgw,
            pivot: None,
        });
    };
    let pole = rng.random_range(0..=2);
    let f = random_rational(&mut rng, pole);
    let mut target =
        &ULaurent::minus_iu_power(-d_beta) * &expand_change_of_variables(&f, d_beta, order)?;
    zp.insert(&lhs, Series::Pairs(f), table)?;
    for (w, c) in bar.terms() {
        if w == pivot {
            continue;
        }
        let s = random_gw(&mut rng);
        target = &target - &(c * &s);
        zgw.insert(&DescendentWord::new(w.clone()), Series::Gw(s), table)?;
    }
    let lowest = pivot_coeff.lowest().expect("nonzero coefficient");
    let normalized_pivot = pivot_coeff.shift_scale(-lowest, &GaussRat::one());
    let solved = target
        .div(&normalized_pivot, order - d_beta)?
        .shift_scale(-lowest, &GaussRat::one());
    zgw.insert(
        &DescendentWord::new(pivot.clone()),
        Series::Gw(solved),
        table,
    )?;
    Ok(SyntheticFixture {
        zp,
        zgw,
        pivot: Some(pivot.clone()),
    })
}

/// Adds `delta · u^power` to the GW series of `word`.
pub fn perturb(
    t: &TheoryTable,
    word: &[Insertion],
    power: i64,
    delta: &GaussRat,
) -> Result<TheoryTable> {
    let mut out = t.clone();
    match out.entries.get_mut(word) {
        Some(Series::Gw(s)) => {
            *s = &*s + &ULaurent::scalar_monomial(power, delta.clone());
            Ok(out)
        }
        _ => Err(Error::InvalidInput("no GW series for that word".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::{bar_i, BarOptions};
    use crate::descendents::{ClassFactor, ClassMonomial};
    use crate::kmatrix::KMatrix;

    fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        t.declare_spec("g1:2:even").unwrap();
        t.declare_spec("g2:4:even").unwrap();
        t.declare_spec("a:3:odd").unwrap();
        t.declare_spec("b:3:odd").unwrap();
        t
    }

    fn class(t: &SymbolTable, name: &str) -> ClassMonomial {
        match t.resolve(name).unwrap() {
            crate::descendents::SymbolRef::Class(f) => ClassMonomial::factor(ClassFactor { ..f }),
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_tables_are_equal() {
        let t = table();
        let lhs = dsl::parse_word("tau(1; g1) * tau(0; g2)", &t).unwrap();
        let k = KMatrix::forced_entries(3);
        let bar = bar_i(
            &[2, 1],
            &[class(&t, "g1"), class(&t, "g2")],
            &k,
            &BarOptions::default(),
        )
        .unwrap();
        let mut zp = TheoryTable::new(Side::Pairs, "", 0, 0);
        zp.insert(&lhs, Series::Pairs(QRational::zero()), &t)
            .unwrap();
        let mut zgw = TheoryTable::new(Side::Gw, "", 0, 0);
        for (w, _) in bar.terms() {
            zgw.insert(
                &DescendentWord::new(w.clone()),
                Series::Gw(ULaurent::zero()),
                &t,
            )
            .unwrap();
        }
        let r = check_correspondence(&lhs, &bar, &zp, &zgw, 4, &t).unwrap();
        assert_eq!(r.verdict, Verdict::Equal { order: 4 });
    }

    #[test]
    fn missing_entries_are_reported() {
        let t = table();
        let lhs = dsl::parse_word("tau(0; g1)", &t).unwrap();
        let bar = TransformedExpr::single(&lhs, &ULaurent::one());
        let zp = TheoryTable::new(Side::Pairs, "", 0, 0);
        let zgw = TheoryTable::new(Side::Gw, "", 0, 0);
        let r = check_correspondence(&lhs, &bar, &zp, &zgw, 2, &t).unwrap();
        assert!(matches!(r.verdict, Verdict::Incomplete { ref missing } if missing.len() == 2));
    }

    #[test]
    fn factorization_merges_and_detects_conflict() {
        let t = table();
        let text = "side=GW\ndbeta=0\n\
                    series side=GW word=\"tau{0,0}(g1 (x) g2)\" = 1 + u\n\
                    series side=GW word=\"tau(0; g1) * tau(0; g2)\" = 1 + u\n";
        let tt = TheoryTable::parse(text, &t).unwrap();
        assert_eq!(tt.len(), 2);
        assert_eq!(factorization_reduce(&tt, &t).unwrap().len(), 1);
        let bad = text.replace("= 1 + u\n", "= 2\n");
        let bad = bad.replacen("= 2\n", "= 1 + u\n", 1);
        let tt = TheoryTable::parse(&bad, &t).unwrap();
        assert!(matches!(
            factorization_reduce(&tt, &t),
            Err(Error::InconsistentTable { .. })
        ));
    }

    #[test]
    fn odd_keys_fold_their_sign() {
        let t = table();
        let text = "side=GW\ndbeta=1\nseries side=GW word=\"tau(0; b) * tau(1; a)\" = 3*u\n";
        let tt = TheoryTable::parse(text, &t).unwrap();
        let w = dsl::parse_word("tau(1; a) * tau(0; b)", &t).unwrap();
        let swapped = dsl::parse_word("tau(0; b) * tau(1; a)", &t).unwrap();
        assert_eq!(tt.get(&w).map(|s| s.neg()), tt.get(&swapped));
        assert_eq!(TheoryTable::parse(&tt.serialize(&t), &t).unwrap(), tt);
    }

    #[test]
    fn synthetic_fixture_holds_and_perturbation_is_located() {
        let t = table();
        let k = KMatrix::random_admissible(4, (-2, 1), 11);
        let classes = [class(&t, "g1"), class(&t, "a"), class(&t, "g2")];
        let bar = bar_i(&[2, 1, 1], &classes, &k, &BarOptions::default()).unwrap();
        let lhs = dsl::parse_word("tau(1; g1) * tau(0; a) * tau(0; g2)", &t).unwrap();
        for d in [0, 1, 3] {
            let fx = synthetic_fixture(&lhs, &bar, d, 0, 6, 9, &t).unwrap();
            let r = check_correspondence(&lhs, &bar, &fx.zp, &fx.zgw, 6, &t).unwrap();
            assert_eq!(r.verdict, Verdict::Equal { order: 6 }, "d = {d}");
            let (w, c) = bar.terms().next().unwrap();
            let val = c.lowest().unwrap();
            let power = -1;
            let zgw = perturb(&fx.zgw, w, power, &GaussRat::one()).unwrap();
            let r = check_correspondence(&lhs, &bar, &fx.zp, &zgw, 6, &t).unwrap();
            if power + d + val <= 6 {
                assert_eq!(
                    r.verdict,
                    Verdict::Unequal {
                        first_power: power + d + val
                    }
                );
            }
        }
    }
}
