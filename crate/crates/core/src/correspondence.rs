//! The three bar transforms and the homology-degree ledger.
//!
//! Every rule is a sum over set partitions `P` of `{1..ℓ}`; each `P` is
//! expanded independently (in parallel) into a [`TransformedExpr`] and the
//! results are merged. Exact arithmetic makes the merge order irrelevant.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cohomology::{CohomRing, TensorClass};
use crate::descendents::{
    class_in_ring, expand_general, ClassMonomial, DescendentWord, DiagonalBlock, Insertion,
    SymbolTable, TensorArg, TensorSymbol, TransformedExpr, Transport,
};
use crate::error::{Error, Result};
use crate::kmatrix::KMatrix;
use crate::partitions::{
    enumerate_set_partitions, meet, reorder_sign, subpartition, OrderedSetPartition, Partition,
    SetPartition, DEFAULT_ENUM_CAP,
};
use crate::scalars::{ChernMono, GaussRat, GradedPoly, ULaurent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    I,
    II,
    III,
}

impl FromStr for Rule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Rule> {
        match s {
            "I" | "1" => Ok(Rule::I),
            "II" | "2" => Ok(Rule::II),
            "III" | "3" => Ok(Rule::III),
            _ => Err(Error::InvalidInput(format!(
                "unknown rule `{s}` (expected I, II or III)"
            ))),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::I => "I",
            Rule::II => "II",
            Rule::III => "III",
        })
    }
}

/// How the parts of `D ∧ P` are ordered while building the diagonal rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeetOrder {
    /// By minimal element.
    MinElement,
    /// A seeded random order, varying with `P`.
    Shuffled(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarOptions {
    pub enum_cap: usize,
    pub meet_order: MeetOrder,
    /// Truncate every output coefficient at this power of `u`.
    pub order: Option<i64>,
    /// Keep only the summand of this set partition `P`.
    pub only: Option<SetPartition>,
}

impl Default for BarOptions {
    fn default() -> Self {
        BarOptions {
            enum_cap: DEFAULT_ENUM_CAP,
            meet_order: MeetOrder::MinElement,
            order: None,
            only: None,
        }
    }
}

/// The left-hand side of a correspondence rule. `parts` is the composition
/// `(α_1, …, α_ℓ)` in input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BarInput {
    /// `τ_{α_1−1}(γ_1) ⋯ τ_{α_ℓ−1}(γ_ℓ)`.
    Standard {
        parts: Vec<u32>,
        classes: Vec<ClassMonomial>,
    },
    /// `τ_{α_{D_1}}(γ_1) ⋯ τ_{α_{D_d}}(γ_d)` with `D` in ordered form.
    Diagonal {
        parts: Vec<u32>,
        d: OrderedSetPartition,
        classes: Vec<ClassMonomial>,
    },
    /// `τ_{α_1−1,…,α_ℓ−1}(δ)`.
    General { parts: Vec<u32>, delta: TensorArg },
}

impl BarInput {
    pub fn parts(&self) -> &[u32] {
        match self {
            BarInput::Standard { parts, .. }
            | BarInput::Diagonal { parts, .. }
            | BarInput::General { parts, .. } => parts,
        }
    }

    pub fn rule(&self) -> Rule {
        match self {
            BarInput::Standard { .. } => Rule::I,
            BarInput::Diagonal { .. } => Rule::II,
            BarInput::General { .. } => Rule::III,
        }
    }

    fn check(&self) -> Result<()> {
        let parts = self.parts();
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidPartition(
                "parts must be positive and nonempty".into(),
            ));
        }
        match self {
            BarInput::Standard { classes, .. } if classes.len() != parts.len() => {
                Err(Error::ArityMismatch {
                    expected: parts.len(),
                    found: classes.len(),
                })
            }
            BarInput::Diagonal { d, classes, .. } => {
                if !d.is_ordered_form() {
                    return Err(Error::NotOrderedForm(d.to_string()));
                }
                if d.ground_size() != parts.len() {
                    return Err(Error::GroundSetMismatch {
                        left: d.ground_size(),
                        right: parts.len(),
                    });
                }
                if d.len() != classes.len() {
                    return Err(Error::ArityMismatch {
                        expected: d.len(),
                        found: classes.len(),
                    });
                }
                Ok(())
            }
            BarInput::General { delta, .. } if delta.arity() != parts.len() => {
                Err(Error::ArityMismatch {
                    expected: parts.len(),
                    found: delta.arity(),
                })
            }
            _ => Ok(()),
        }
    }

    /// The insertion word the rule transforms.
    pub fn left_word(&self) -> DescendentWord {
        match self {
            BarInput::Standard { parts, classes } => DescendentWord::new(
                parts
                    .iter()
                    .zip(classes)
                    .map(|(a, c)| Insertion::Standard {
                        k: a - 1,
                        class: c.clone(),
                    })
                    .collect(),
            ),
            BarInput::Diagonal { parts, d, classes } => DescendentWord::new(
                d.blocks()
                    .iter()
                    .zip(classes)
                    .map(|(b, c)| match b.as_slice() {
                        [j] => Insertion::Standard {
                            k: parts[*j] - 1,
                            class: c.clone(),
                        },
                        _ => Insertion::Diagonal {
                            sigma: subpartition(parts, b).expect("nonempty block"),
                            class: c.clone(),
                        },
                    })
                    .collect(),
            ),
            BarInput::General { parts, delta } => DescendentWord::new(vec![Insertion::General {
                ks: parts.iter().map(|a| a - 1).collect(),
                delta: delta.clone(),
            }]),
        }
    }

    /// Reads the left-hand side of `rule` from an (unnormalized) word.
    /// Rule II infers the ordered-form `D` from the diagonal sizes; rule III
    /// also accepts a product of standard insertions as a factored class.
    pub fn from_word(rule: Rule, word: &DescendentWord) -> Result<BarInput> {
        let ins = &word.insertions;
        if ins.is_empty() {
            return Err(Error::InvalidInput("empty insertion word".into()));
        }
        let not_for =
            |what: &str| Error::InvalidInput(format!("rule {rule} does not accept {what}"));
        match rule {
            Rule::I => {
                let mut parts = Vec::new();
                let mut classes = Vec::new();
                for i in ins {
                    match i {
                        Insertion::Standard { k, class } => {
                            parts.push(k + 1);
                            classes.push(class.clone());
                        }
                        _ => return Err(not_for("diagonal or general insertions")),
                    }
                }
                Ok(BarInput::Standard { parts, classes })
            }
            Rule::II => {
                let mut parts = Vec::new();
                let mut classes = Vec::new();
                let mut sizes = Vec::new();
                for i in ins {
                    match i {
                        Insertion::Standard { k, class } => {
                            parts.push(k + 1);
                            sizes.push(1);
                            classes.push(class.clone());
                        }
                        Insertion::Diagonal { sigma, class } => {
                            parts.extend_from_slice(sigma.parts());
                            sizes.push(sigma.len());
                            classes.push(class.clone());
                        }
                        Insertion::General { .. } => return Err(not_for("general insertions")),
                    }
                }
                let d = OrderedSetPartition::from_sizes(&sizes)?;
                Ok(BarInput::Diagonal { parts, d, classes })
            }
            Rule::III => {
                if let [Insertion::General { ks, delta }] = &ins[..] {
                    return Ok(BarInput::General {
                        parts: ks.iter().map(|k| k + 1).collect(),
                        delta: delta.clone(),
                    });
                }
                let mut parts = Vec::new();
                let mut classes = Vec::new();
                for i in ins {
                    match i {
                        Insertion::Standard { k, class } => {
                            parts.push(k + 1);
                            classes.push(class.clone());
                        }
                        _ => {
                            return Err(not_for(
                                "a product containing diagonal or general insertions",
                            ))
                        }
                    }
                }
                Ok(BarInput::General {
                    parts,
                    delta: TensorArg::factored(classes),
                })
            }
        }
    }
}

/// One choice of `α̂` with a Chern monomial and its scalar `u`-series.
#[derive(Clone, Debug)]
struct Choice {
    ahat: Partition,
    mono: ChernMono,
    series: ULaurent,
}

/// `K̃_{α_S, α̂}` split by Chern monomial, over all admissible `α̂`.
fn block_choices(k: &KMatrix, alpha_s: &Partition) -> Result<Vec<Choice>> {
    let mut out = Vec::new();
    for (ahat, series) in k.targets(alpha_s)? {
        for (mono, s) in series.split_by_monomial() {
            out.push(Choice {
                ahat: ahat.clone(),
                mono,
                series: s,
            });
        }
    }
    Ok(out)
}

/// Product of the classes at `idx`, in that order.
fn product_of(classes: &[ClassMonomial], idx: &[usize]) -> Option<(i8, ClassMonomial)> {
    let mut sign = 1;
    let mut acc = ClassMonomial::one();
    for &i in idx {
        let (s, m) = acc.mul(&classes[i])?;
        sign *= s;
        acc = m;
    }
    Some((sign, acc))
}

fn signed(c: &ULaurent, sign: i8) -> ULaurent {
    if sign < 0 {
        -c
    } else {
        c.clone()
    }
}

/// Multiplies out `Π_blocks Σ_choices`, calling `emit` with the chosen index
/// per block.
fn for_each_tuple(lens: &[usize], mut emit: impl FnMut(&[usize])) {
    if lens.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; lens.len()];
    loop {
        emit(&idx);
        let mut j = lens.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < lens[j] {
                break;
            }
            idx[j] = 0;
        }
    }
}

fn sum_over_partitions<F>(l: usize, opts: &BarOptions, f: F) -> Result<TransformedExpr>
where
    F: Fn(usize, &SetPartition) -> Result<TransformedExpr> + Sync,
{
    if let Some(p) = &opts.only {
        if p.ground_size() != l {
            return Err(Error::GroundSetMismatch {
                left: p.ground_size(),
                right: l,
            });
        }
    }
    let all = enumerate_set_partitions(l, opts.enum_cap)?;
    let parts: Vec<TransformedExpr> = all
        .par_iter()
        .enumerate()
        .filter(|(_, p)| opts.only.as_ref().is_none_or(|o| o == *p))
        .map(|(n, p)| f(n, p))
        .collect::<Result<_>>()?;
    let mut out = TransformedExpr::new();
    for e in &parts {
        out.add_assign(e);
    }
    Ok(match opts.order {
        Some(n) => out.truncate(n),
        None => out,
    })
}

/// The standard rule: a sum over set partitions `P` of products over blocks
/// `S` of `Σ_α̂ τ_α̂(K̃_{α_S,α̂} · γ_S)`, with the Koszul sign of gathering
/// the classes into block order.
pub fn bar_i(
    parts: &[u32],
    classes: &[ClassMonomial],
    k: &KMatrix,
    opts: &BarOptions,
) -> Result<TransformedExpr> {
    BarInput::Standard {
        parts: parts.to_vec(),
        classes: classes.to_vec(),
    }
    .check()?;
    let odd: Vec<bool> = classes.iter().map(ClassMonomial::odd).collect();
    sum_over_partitions(parts.len(), opts, |_, p| {
        let mut out = TransformedExpr::new();
        let sign = reorder_sign(&p.ordered().theta(), &odd);
        let mut per_block = Vec::with_capacity(p.len());
        for b in p.blocks() {
            let Some((s, gamma)) = product_of(classes, b) else {
                return Ok(out);
            };
            let choices = block_choices(k, &subpartition(parts, b)?)?;
            per_block.push((s, gamma, choices));
        }
        let lens: Vec<usize> = per_block.iter().map(|b| b.2.len()).collect();
        let base_sign = per_block.iter().fold(sign, |acc, b| acc * b.0);
        for_each_tuple(&lens, |idx| {
            let mut coeff = ULaurent::one();
            let mut ins = Vec::with_capacity(idx.len());
            for (b, &i) in per_block.iter().zip(idx) {
                let ch = &b.2[i];
                coeff = &coeff * &ch.series;
                ins.push(Insertion::Diagonal {
                    sigma: ch.ahat.clone(),
                    class: b.1.with_chern(&ch.mono),
                });
            }
            out.add_word(&DescendentWord::new(ins), &signed(&coeff, base_sign));
        });
        Ok(out)
    })
}

/// Order of the meet parts used for the sign and the product.
fn ordered_meet_parts(m: &SetPartition, order: MeetOrder, salt: usize) -> Vec<Vec<usize>> {
    let mut parts = m.blocks().to_vec();
    if let MeetOrder::Shuffled(seed) = order {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (salt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        parts.shuffle(&mut rng);
    }
    parts
}

/// The diagonal rule: a sum over `P` of `(−1)^{s(P)} Π_{I ∈ D∧P} T_I` with
/// `T_I = Σ τ_{α̂^1∪…∪α̂^n}(Π_k K̃_{α_{S_k},α̂^k} · Π_l γ_{i_l} · c3^{|I|+1−n−m})`.
pub fn bar_ii(
    parts: &[u32],
    d: &OrderedSetPartition,
    classes: &[ClassMonomial],
    k: &KMatrix,
    opts: &BarOptions,
) -> Result<TransformedExpr> {
    BarInput::Diagonal {
        parts: parts.to_vec(),
        d: d.clone(),
        classes: classes.to_vec(),
    }
    .check()?;
    let dc = d.canonical();
    let odd: Vec<bool> = classes.iter().map(ClassMonomial::odd).collect();
    let d_label = d.canonical().labels();
    sum_over_partitions(parts.len(), opts, |n, p| {
        let mut out = TransformedExpr::new();
        let m = meet(&dc, p)?;
        let meet_parts = ordered_meet_parts(&m, opts.meet_order, n);
        let p_label = p.labels();
        // D blocks are consecutive, so canonical and given orders agree
        let mut d_order = Vec::with_capacity(classes.len());
        let mut factors = Vec::with_capacity(meet_parts.len());
        for part in &meet_parts {
            let mut d_in: Vec<usize> = part.iter().map(|&x| d_label[x]).collect();
            d_in.dedup();
            let mut p_in: Vec<usize> = part.iter().map(|&x| p_label[x]).collect();
            p_in.sort_unstable();
            p_in.dedup();
            let exponent = part.len() as i64 + 1 - d_in.len() as i64 - p_in.len() as i64;
            assert!(exponent >= 0, "meet part violates m + n <= |I| + 1");
            d_order.extend_from_slice(&d_in);
            let Some((s, gamma)) = product_of(classes, &d_in) else {
                return Ok(out);
            };
            // Σ over α̂^1..α̂^n of the product of entries, times c3^exponent
            let mut sums: Vec<(Partition, ULaurent)> = vec![(Partition::ones(0), ULaurent::one())];
            for &j in &p_in {
                let block = &p.blocks()[j];
                let targets = k.targets(&subpartition(parts, block)?)?;
                let mut next = Vec::new();
                for (sigma, acc) in &sums {
                    for (ahat, series) in &targets {
                        next.push((sigma.union(ahat), acc * *series));
                    }
                }
                sums = next;
            }
            let c3 = ULaurent::monomial(
                0,
                GradedPoly::monomial(ChernMono::new(0, 0, exponent as u32), GaussRat::one()),
            );
            let mut t = TransformedExpr::new();
            for (sigma, series) in sums {
                for (mono, s_m) in (&series * &c3).split_by_monomial() {
                    t.add_word(
                        &DescendentWord::new(vec![Insertion::Diagonal {
                            sigma: sigma.clone(),
                            class: gamma.with_chern(&mono),
                        }]),
                        &signed(&s_m, s),
                    );
                }
            }
            factors.push(t);
        }
        let sign = reorder_sign(&d_order, &odd);
        let mut prod = TransformedExpr::single(
            &DescendentWord::new(Vec::new()),
            &signed(&ULaurent::one(), sign),
        );
        for f in &factors {
            prod = prod.mul(f);
        }
        out.add_assign(&prod);
        Ok(out)
    })
}

/// Per-block choices for the general rule.
fn general_choices(parts: &[u32], p: &SetPartition, k: &KMatrix) -> Result<Vec<Vec<Choice>>> {
    p.blocks()
        .iter()
        .map(|b| block_choices(k, &subpartition(parts, b)?))
        .collect()
}

fn ks_of(choices: &[&Choice]) -> Vec<u32> {
    choices
        .iter()
        .flat_map(|c| c.ahat.parts().iter().map(|a| a - 1))
        .collect()
}

/// The general rule, symbolically. A factored `δ = x_1 ⊗ … ⊗ x_ℓ` is
/// carried through `θ_P`, the block diagonals, the `K̃` factors and the
/// fan-out explicitly; an opaque `δ` becomes a transported symbol.
pub fn bar_iii(
    parts: &[u32],
    delta: &TensorArg,
    k: &KMatrix,
    opts: &BarOptions,
) -> Result<TransformedExpr> {
    BarInput::General {
        parts: parts.to_vec(),
        delta: delta.clone(),
    }
    .check()?;
    let classes: Option<Vec<ClassMonomial>> = match delta {
        TensorArg::Factored(blocks) => {
            if blocks.iter().any(|b| b.width != 1) {
                return Err(Error::InvalidInput(
                    "the symbolic general rule needs a plain tensor product or an opaque class; \
                     evaluate diagonal classes on a ring instead"
                        .into(),
                ));
            }
            Some(blocks.iter().map(|b| b.class.clone()).collect())
        }
        TensorArg::Opaque(s) => {
            if s.transport.is_some() {
                return Err(Error::InvalidInput(
                    "the input class is already transported".into(),
                ));
            }
            None
        }
    };
    sum_over_partitions(parts.len(), opts, |_, p| {
        let mut out = TransformedExpr::new();
        let ordered = p.ordered();
        let per_block = general_choices(parts, p, k)?;
        let lens: Vec<usize> = per_block.iter().map(Vec::len).collect();
        match (&classes, delta) {
            (Some(classes), _) => {
                let odd: Vec<bool> = classes.iter().map(ClassMonomial::odd).collect();
                let mut sign = reorder_sign(&ordered.theta(), &odd);
                let mut restricted = Vec::with_capacity(p.len());
                for b in p.blocks() {
                    let Some((s, m)) = product_of(classes, b) else {
                        return Ok(out);
                    };
                    sign *= s;
                    restricted.push(m);
                }
                for_each_tuple(&lens, |idx| {
                    let chosen: Vec<&Choice> = idx
                        .iter()
                        .enumerate()
                        .map(|(b, &i)| &per_block[b][i])
                        .collect();
                    let mut coeff = ULaurent::one();
                    let mut blocks = Vec::with_capacity(chosen.len());
                    for (c, x) in chosen.iter().zip(&restricted) {
                        coeff = &coeff * &c.series;
                        blocks.push(DiagonalBlock {
                            class: x.with_chern(&c.mono),
                            width: c.ahat.len(),
                        });
                    }
                    let ins = Insertion::General {
                        ks: ks_of(&chosen),
                        delta: TensorArg::Factored(blocks),
                    };
                    out.add_word(&DescendentWord::new(vec![ins]), &signed(&coeff, sign));
                });
            }
            (None, TensorArg::Opaque(sym)) => {
                for_each_tuple(&lens, |idx| {
                    let chosen: Vec<&Choice> = idx
                        .iter()
                        .enumerate()
                        .map(|(b, &i)| &per_block[b][i])
                        .collect();
                    let coeff = chosen
                        .iter()
                        .fold(ULaurent::one(), |acc, c| &acc * &c.series);
                    let transport = Transport {
                        blocks: ordered.blocks().to_vec(),
                        fans: chosen.iter().map(|c| c.ahat.len()).collect(),
                        chern: chosen.iter().map(|c| c.mono).collect(),
                    };
                    let ins = Insertion::General {
                        ks: ks_of(&chosen),
                        delta: TensorArg::Opaque(TensorSymbol {
                            transport: Some(transport),
                            ..sym.clone()
                        }),
                    };
                    out.add_word(&DescendentWord::new(vec![ins]), &coeff);
                });
            }
            _ => unreachable!("factored classes are always extracted"),
        }
        Ok(out)
    })
}

/// The general rule for a concrete `δ` on `X^ℓ`: restriction, Chern
/// factors and diagonal pushforwards are computed in the ring and the
/// result is expanded over the Künneth basis.
pub fn bar_iii_on_ring(
    parts: &[u32],
    delta: &TensorClass,
    ring: &CohomRing,
    k: &KMatrix,
    opts: &BarOptions,
) -> Result<TransformedExpr> {
    if delta.arity() != parts.len() {
        return Err(Error::ArityMismatch {
            expected: parts.len(),
            found: delta.arity(),
        });
    }
    let table = SymbolTable::from_ring(ring);
    sum_over_partitions(parts.len(), opts, |_, p| {
        let mut out = TransformedExpr::new();
        let restricted = delta.diagonal_restrict(ring, &p.ordered())?;
        if restricted.is_zero() {
            return Ok(out);
        }
        let per_block = general_choices(parts, p, k)?;
        let lens: Vec<usize> = per_block.iter().map(Vec::len).collect();
        let mut err = None;
        for_each_tuple(&lens, |idx| {
            if err.is_some() {
                return;
            }
            let chosen: Vec<&Choice> = idx
                .iter()
                .enumerate()
                .map(|(b, &i)| &per_block[b][i])
                .collect();
            let step = || -> Result<TransformedExpr> {
                let coeff = chosen
                    .iter()
                    .fold(ULaurent::one(), |acc, c| &acc * &c.series);
                let chern: Vec<_> = chosen
                    .iter()
                    .map(|c| class_in_ring(ring, &ClassMonomial::chern_only(c.mono), &table))
                    .collect::<Result<_>>()?;
                let weighted = restricted.mul(ring, &TensorClass::from_factors(ring, &chern)?)?;
                let fans: Vec<usize> = chosen.iter().map(|c| c.ahat.len()).collect();
                let pushed = weighted.push_diagonals(ring, &fans)?;
                Ok(expand_general(ring, &ks_of(&chosen), &pushed).scale(&coeff))
            };
            match step() {
                Ok(e) => out.add_assign(&e),
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    })
}

/// Dispatches on the input's rule.
pub fn bar_transform(input: &BarInput, k: &KMatrix, opts: &BarOptions) -> Result<TransformedExpr> {
    match input {
        BarInput::Standard { parts, classes } => bar_i(parts, classes, k, opts),
        BarInput::Diagonal { parts, d, classes } => bar_ii(parts, d, classes, k, opts),
        BarInput::General { parts, delta } => bar_iii(parts, delta, k, opts),
    }
}

/// Degrees entering the homology-degree formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeLedger {
    pub d_beta: i64,
    pub dim_y: i64,
    /// `(e, [k_1, …])` per insertion: real class degree and indices.
    pub insertions: Vec<(i64, Vec<i64>)>,
}

impl DegreeLedger {
    pub fn from_insertions(d_beta: i64, dim_y: i64, ins: &[Insertion]) -> Self {
        DegreeLedger {
            d_beta,
            dim_y,
            insertions: ins
                .iter()
                .map(|i| {
                    (
                        i.class_degree() as i64,
                        i.indices().iter().map(|&k| k as i64).collect(),
                    )
                })
                .collect(),
        }
    }
}

/// `2·d_β + 2·dim_y − Σ_i (e_i + Σ_j (2k_{ij} − 2))`.
pub fn expected_homology_degree(l: &DegreeLedger) -> i64 {
    let used: i64 = l
        .insertions
        .iter()
        .map(|(e, ks)| e + ks.iter().map(|k| 2 * k - 2).sum::<i64>())
        .sum();
    2 * l.d_beta + 2 * l.dim_y - used
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descendents::ClassFactor;

    fn g(id: u32, degree: u32) -> ClassMonomial {
        ClassMonomial::factor(ClassFactor {
            id,
            degree,
            odd: degree % 2 == 1,
        })
    }

    fn word(ins: Vec<Insertion>) -> Vec<Insertion> {
        DescendentWord::new(ins).normalize().insertions
    }

    #[test]
    fn all_ones_is_fixed() {
        let k = KMatrix::random_admissible(4, (-2, 1), 5);
        let classes = vec![g(0, 3), g(1, 2), g(2, 3)];
        let out = bar_i(&[1, 1, 1], &classes, &k, &BarOptions::default()).unwrap();
        let input = BarInput::Standard {
            parts: vec![1, 1, 1],
            classes,
        };
        assert_eq!(
            out,
            TransformedExpr::single(&input.left_word(), &ULaurent::one())
        );
    }

    #[test]
    fn single_insertion_leading_term() {
        let k = KMatrix::forced_entries(4);
        let out = bar_i(&[3], &[g(0, 2)], &k, &BarOptions::default()).unwrap();
        let expect = TransformedExpr::single(
            &DescendentWord::new(vec![Insertion::Standard {
                k: 2,
                class: g(0, 2),
            }]),
            &ULaurent::iu_power(-2),
        );
        assert_eq!(out, expect);
    }

    #[test]
    fn two_one_with_forced_entries() {
        let k = KMatrix::forced_entries(3);
        let out = bar_i(&[2, 1], &[g(0, 2), g(1, 4)], &k, &BarOptions::default()).unwrap();
        let w = word(vec![
            Insertion::Standard {
                k: 1,
                class: g(0, 2),
            },
            Insertion::Standard {
                k: 0,
                class: g(1, 4),
            },
        ]);
        assert_eq!(out.len(), 1);
        assert_eq!(out.coeff(&w), Some(&ULaurent::iu_power(-1)));
    }

    #[test]
    fn meet_exponent_example() {
        // D = {{1,2},{3}}, P = {{1},{2,3}}: one part I = {1,2,3}, exponent 0
        let d = SetPartition::parse("{{1,2},{3}}").unwrap();
        let p = SetPartition::parse("{{1},{2,3}}").unwrap();
        let m = meet(&d, &p).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(3 + 1 - 2 - 2, 0);
    }

    #[test]
    fn ledger_examples() {
        let l = DegreeLedger {
            d_beta: 0,
            dim_y: 0,
            insertions: vec![(2, vec![0])],
        };
        assert_eq!(expected_homology_degree(&l), 0);
        let l = DegreeLedger {
            d_beta: 4,
            dim_y: 0,
            insertions: vec![(6, vec![0]), (2, vec![1])],
        };
        assert_eq!(expected_homology_degree(&l), 2);
        let l = DegreeLedger {
            d_beta: 3,
            dim_y: 2,
            insertions: vec![],
        };
        assert_eq!(expected_homology_degree(&l), 10);
    }
}
