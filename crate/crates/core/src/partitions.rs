//! Integer partitions, set partitions of `{1..ℓ}`, the coarsening join used
//! by the diagonal rule, and the sign bookkeeping for reordering words.
//!
//! Set-partition elements are stored 0-based; every `Display` and parser
//! uses the 1-based notation `{{1,2},{3}}`.

use std::cmp::Reverse;
use std::fmt;

use crate::error::{Error, ParseError, Result};

/// Default bound on `ℓ` for [`enumerate_set_partitions`]; `Bell(12)` is a
/// little over four million.
pub const DEFAULT_ENUM_CAP: usize = 12;

/// A weakly decreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition("parts must be positive".into()));
        }
        parts.sort_unstable_by_key(|&p| Reverse(p));
        Ok(Partition(parts))
    }

    /// `(1,…,1)` with `n` parts.
    pub fn ones(n: usize) -> Self {
        Partition(vec![1; n])
    }

    pub fn single(a: u32) -> Self {
        Partition(vec![a])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&p| p == 1)
    }

    /// Multiset union, re-sorted.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        parts.sort_unstable_by_key(|&p| Reverse(p));
        Partition(parts)
    }

    /// All partitions of `n ≥ 1`, in reverse lexicographic order.
    pub fn all_of_size(n: u32) -> Vec<Partition> {
        fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, n, &mut Vec::new(), &mut out);
        }
        out
    }

    /// All partitions with size in `1..=max`.
    pub fn all_up_to(max: u32) -> Vec<Partition> {
        (1..=max).flat_map(Partition::all_of_size).collect()
    }

    /// Parses `3,2,2` or `(3,2,2)`.
    pub fn parse(text: &str) -> std::result::Result<Partition, String> {
        let t = text.trim();
        let t = t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .unwrap_or(t);
        let parts = t
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| format!("invalid part `{}`", p.trim()))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Partition::new(parts).map_err(|e| e.to_string())
    }

    /// Comma form without parentheses, as used in K-matrix files.
    pub fn comma_form(&self) -> String {
        join(self.0.iter())
    }
}

fn join<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.comma_form())
    }
}

/// The parts of a composition at the given 0-based positions, as a
/// partition.
pub fn subpartition(parts: &[u32], selection: &[usize]) -> Result<Partition> {
    if selection.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut out = Vec::with_capacity(selection.len());
    for &i in selection {
        out.push(*parts.get(i).ok_or(Error::IndexOutOfRange {
            index: i + 1,
            len: parts.len(),
        })?);
    }
    Partition::new(out)
}

/// A set partition in canonical form: blocks sorted internally and ordered
/// by their minimal element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

fn check_cover(n: usize, blocks: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; n];
    for b in blocks {
        if b.is_empty() {
            return Err(Error::MalformedSetPartition("empty block".into()));
        }
        for &x in b {
            if x >= n {
                return Err(Error::MalformedSetPartition(format!(
                    "element {} exceeds {n}",
                    x + 1
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::MalformedSetPartition(format!(
                    "element {} repeated",
                    x + 1
                )));
            }
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(Error::MalformedSetPartition(format!(
            "element {} missing",
            x + 1
        )));
    }
    Ok(())
}

impl SetPartition {
    /// Canonicalizes and checks that `blocks` cover `0..n` exactly.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        check_cover(n, &blocks)?;
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    pub fn singletons(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn one_block(n: usize) -> Self {
        SetPartition {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    /// From a block label per element (labels need not be canonical).
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (x, &lab) in labels.iter().enumerate() {
            match order.iter().position(|&l| l == lab) {
                Some(k) => blocks[k].push(x),
                None => {
                    order.push(lab);
                    blocks.push(vec![x]);
                }
            }
        }
        SetPartition {
            n: labels.len(),
            blocks,
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of each element.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &x in b {
                out[x] = k;
            }
        }
        out
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &SetPartition) -> bool {
        let lab = coarser.labels();
        self.n == coarser.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&x| lab[x] == lab[b[0]]))
    }

    /// The blocks in canonical order, as an ordered partition.
    pub fn ordered(&self) -> OrderedSetPartition {
        OrderedSetPartition {
            n: self.n,
            blocks: self.blocks.clone(),
        }
    }

    pub fn parse(text: &str) -> std::result::Result<SetPartition, ParseError> {
        let o = OrderedSetPartition::parse(text)?;
        Ok(o.canonical())
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_blocks(f, &self.blocks)
    }
}

fn fmt_blocks(f: &mut fmt::Formatter<'_>, blocks: &[Vec<usize>]) -> fmt::Result {
    write!(f, "{{")?;
    for (k, b) in blocks.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{{{}}}", join(b.iter().map(|x| x + 1)))?;
    }
    write!(f, "}}")
}

/// A set partition with an explicit block order; elements within a block
/// are increasing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedSetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl OrderedSetPartition {
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        check_cover(n, &blocks)?;
        for b in &mut blocks {
            b.sort_unstable();
        }
        Ok(OrderedSetPartition { n, blocks })
    }

    /// Consecutive blocks of the given sizes: `[2,1]` gives `{{1,2},{3}}`.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut next = 0;
        for &s in sizes {
            if s == 0 {
                return Err(Error::MalformedSetPartition("empty block".into()));
            }
            blocks.push((next..next + s).collect());
            next += s;
        }
        Ok(OrderedSetPartition { n: next, blocks })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn canonical(&self) -> SetPartition {
        SetPartition::new(self.n, self.blocks.clone()).expect("already an exact cover")
    }

    /// Blocks are consecutive runs of `1..ℓ`, in increasing order.
    pub fn is_ordered_form(&self) -> bool {
        self.blocks.iter().flatten().copied().eq(0..self.n)
    }

    /// `θ[j]` is the `j`-th element of the concatenated blocks; as a map,
    /// `j+1 ↦ θ[j]+1`.
    pub fn theta(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn parse(text: &str) -> std::result::Result<OrderedSetPartition, ParseError> {
        let err = |at: usize, m: &str| ParseError::new(1, at + 1, m.to_string());
        let compact: Vec<(usize, char)> = text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        let mut i = 0;
        let expect = |i: &mut usize, c: char| -> std::result::Result<(), ParseError> {
            match compact.get(*i) {
                Some(&(_, d)) if d == c => {
                    *i += 1;
                    Ok(())
                }
                Some(&(at, _)) => Err(err(at, &format!("expected `{c}`"))),
                None => Err(err(text.len(), &format!("expected `{c}`"))),
            }
        };
        expect(&mut i, '{')?;
        let mut blocks = Vec::new();
        loop {
            expect(&mut i, '{')?;
            let mut block = Vec::new();
            loop {
                let start = i;
                while compact.get(i).is_some_and(|(_, c)| c.is_ascii_digit()) {
                    i += 1;
                }
                let at = compact.get(start).map_or(text.len(), |p| p.0);
                let digits: String = compact[start..i].iter().map(|p| p.1).collect();
                let v: usize = digits
                    .parse()
                    .map_err(|_| err(at, "expected a positive integer"))?;
                if v == 0 {
                    return Err(err(at, "elements start at 1"));
                }
                block.push(v - 1);
                if compact.get(i).is_some_and(|p| p.1 == ',') {
                    i += 1;
                } else {
                    break;
                }
            }
            expect(&mut i, '}')?;
            blocks.push(block);
            if compact.get(i).is_some_and(|p| p.1 == ',') {
                i += 1;
            } else {
                break;
            }
        }
        expect(&mut i, '}')?;
        if let Some(&(at, _)) = compact.get(i) {
            return Err(err(at, "unexpected trailing input"));
        }
        let n = blocks.iter().map(Vec::len).sum();
        OrderedSetPartition::new(n, blocks).map_err(|e| ParseError::new(1, 1, e.to_string()))
    }
}

impl fmt::Display for OrderedSetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_blocks(f, &self.blocks)
    }
}

/// Every set partition of `{1..ℓ}` via restricted growth strings, in
/// lexicographic order of the strings. Refuses `ℓ = 0` and `ℓ > cap`.
pub fn enumerate_set_partitions(l: usize, cap: usize) -> Result<Vec<SetPartition>> {
    if l == 0 {
        return Err(Error::EmptyGroundSet);
    }
    if l > cap {
        return Err(Error::EnumerationCap { n: l, cap });
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; l];
    let mut max = vec![0usize; l];
    loop {
        out.push(SetPartition::from_labels(&rgs));
        // advance to the next restricted growth string
        let mut j = l - 1;
        loop {
            if j == 0 {
                return Ok(out);
            }
            if rgs[j] <= max[j - 1] {
                rgs[j] += 1;
                break;
            }
            j -= 1;
        }
        for k in j + 1..l {
            rgs[k] = 0;
        }
        for k in j..l {
            max[k] = max[k - 1].max(rgs[k]);
        }
    }
}

/// Bell numbers `B(0..=n)` by the triangle recurrence.
pub fn bell_numbers(n: usize) -> Vec<u128> {
    let mut out = vec![1u128];
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        out.push(next[0]);
        row = next;
    }
    out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// The finest set partition refined by both `d` and `p`.
pub fn meet(d: &SetPartition, p: &SetPartition) -> Result<SetPartition> {
    if d.n != p.n {
        return Err(Error::GroundSetMismatch {
            left: d.n,
            right: p.n,
        });
    }
    let mut parent: Vec<usize> = (0..d.n).collect();
    for b in d.blocks.iter().chain(&p.blocks) {
        for &x in &b[1..] {
            let (rx, r0) = (find(&mut parent, x), find(&mut parent, b[0]));
            parent[rx] = r0;
        }
    }
    let labels: Vec<usize> = (0..d.n).map(|x| find(&mut parent, x)).collect();
    Ok(SetPartition::from_labels(&labels))
}

/// Sign of a permutation acting on a graded word. `perm[j]` is the position
/// the letter at `j` moves to; only transpositions of two odd letters
/// contribute.
pub fn koszul_sign(perm: &[usize], odd: &[bool]) -> i8 {
    assert_eq!(
        perm.len(),
        odd.len(),
        "parity list must match the permutation"
    );
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        if !odd[i] {
            continue;
        }
        for j in i + 1..perm.len() {
            if odd[j] && perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of rewriting a graded word so that its new `j`-th letter is the old
/// letter `order[j]`.
pub fn reorder_sign(order: &[usize], odd: &[bool]) -> i8 {
    koszul_sign(&inverse(order), odd)
}

pub fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut out = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = i;
    }
    out
}
