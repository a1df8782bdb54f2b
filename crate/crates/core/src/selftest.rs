//! The invariant suite behind `gwp selftest` and the acceptance harness.
//! Every check is exact; a criterion passes only if every case agrees.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bridge::{
    check_correspondence, perturb, synthetic_fixture, Series, Side, TheoryTable, Verdict,
};
use crate::cohomology::{CohomRing, TensorClass};
use crate::correspondence::{
    bar_i, bar_ii, bar_iii, bar_iii_on_ring, BarInput, BarOptions, MeetOrder,
};
use crate::descendents::{
    basis_monomial, evaluate_on_ring, ClassFactor, ClassMonomial, DescendentWord, DiagonalBlock,
    Insertion, SymbolRef, SymbolTable, TensorArg, TensorSymbol, TransformedExpr, Transport,
};
use crate::dsl;
use crate::kmatrix::{required_degree, KMatrix};
use crate::partitions::{
    enumerate_set_partitions, meet, OrderedSetPartition, Partition, SetPartition,
};
use crate::scalars::{expand_change_of_variables, ChernMono, GaussRat, QPoly, QRational, ULaurent};

#[derive(Clone, Copy, Debug)]
pub struct SelftestOptions {
    /// Largest `|α|` stored in generated correspondence matrices.
    pub max_size: u32,
    pub seed: u64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            max_size: 6,
            seed: 17,
        }
    }
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "all-ones partitions are fixed by every rule"),
    (2, "leading term of the standard rule"),
    (3, "diagonal rule with singleton D equals the standard rule"),
    (
        4,
        "general rule with factored classes equals the standard rule",
    ),
    (5, "degree filter on equal-size entries"),
    (6, "c3 exponents in meets are nonnegative"),
    (7, "sign equivariance and meet-order independence"),
    (8, "theta permutation worked example"),
    (9, "change of variables kernel"),
    (10, "bridge round trip on synthetic fixtures"),
    (11, "parse and print round trips"),
];

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} criterion {:>2}: {} ({:.2}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run_criterion(id: u8, opts: &SelftestOptions) -> CriterionOutcome {
    let start = Instant::now();
    let result = match id {
        1 => identity_on_ones(opts),
        2 => leading_term(opts),
        3 => diagonal_specializes(opts),
        4 => general_specializes(opts),
        5 => degree_filter(),
        6 => meet_exponents(),
        7 => signs_and_ordering(opts),
        8 => theta_example(),
        9 => change_of_variables(opts),
        10 => bridge_round_trip(opts),
        11 => round_trips(opts),
        _ => Err(format!("no criterion {id}")),
    };
    let title = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map_or("unknown", |c| c.1);
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionOutcome {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(opts: &SelftestOptions) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| run_criterion(c.0, opts)).collect()
}

/// Opaque test classes: `e1..e6` even (degrees 2 and 4), `o1..o6` odd.
fn symbol_table() -> SymbolTable {
    let mut t = SymbolTable::new();
    for j in 1..=6 {
        t.declare(
            &format!("e{j}"),
            if j % 2 == 1 { 2 } else { 4 },
            false,
            None,
        )
        .expect("fresh name");
        t.declare(&format!("o{j}"), 3, true, None)
            .expect("fresh name");
    }
    t.declare("T2", 6, false, Some(2)).expect("fresh name");
    t.declare("T3", 9, true, Some(3)).expect("fresh name");
    t
}

fn named(t: &SymbolTable, name: &str) -> ClassMonomial {
    match t.resolve(name) {
        Some(SymbolRef::Class(f)) => ClassMonomial::factor(f),
        _ => panic!("`{name}` is not a class symbol"),
    }
}

/// Distinct classes, odd where `odd[j]`.
fn classes_for(t: &SymbolTable, odd: &[bool]) -> Vec<ClassMonomial> {
    odd.iter()
        .enumerate()
        .map(|(j, &o)| named(t, &format!("{}{}", if o { "o" } else { "e" }, j + 1)))
        .collect()
}

fn random_parities(rng: &mut ChaCha8Rng, l: usize) -> Vec<bool> {
    (0..l).map(|_| rng.random_bool(0.5)).collect()
}

fn random_partition(rng: &mut ChaCha8Rng, size: u32) -> Vec<u32> {
    let mut left = size;
    let mut parts = Vec::new();
    while left > 0 {
        let p = rng.random_range(1..=left);
        parts.push(p);
        left -= p;
    }
    parts
}

fn window(rng: &mut ChaCha8Rng) -> (i64, i64) {
    let lo = rng.random_range(-3..=0);
    (lo, lo + rng.random_range(0..=2))
}

fn identity_on_ones(opts: &SelftestOptions) -> Check {
    let t = symbol_table();
    let bar = BarOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cases = 0;
    for n in 0..20 {
        let k = KMatrix::random_admissible(opts.max_size.max(2), window(&mut rng), opts.seed + n);
        for l in 1..=5 {
            for pattern in [vec![false; l], (0..l).map(|j| j % 2 == 0).collect()] {
                let classes = classes_for(&t, &pattern);
                let parts = vec![1; l];
                let input = BarInput::Standard {
                    parts: parts.clone(),
                    classes: classes.clone(),
                };
                let expect = TransformedExpr::single(&input.left_word(), &ULaurent::one());
                let d = OrderedSetPartition::from_sizes(&vec![1; l]).map_err(err)?;
                let outs = [
                    bar_i(&parts, &classes, &k, &bar).map_err(err)?,
                    bar_ii(&parts, &d, &classes, &k, &bar).map_err(err)?,
                    bar_iii(&parts, &TensorArg::factored(classes.clone()), &k, &bar)
                        .map_err(err)?,
                ];
                for (r, out) in outs.iter().enumerate() {
                    ensure!(
                        *out == expect,
                        "rule {} changed 1^{l} with parities {pattern:?}:\n{}",
                        ["I", "II", "III"][r],
                        out.display(&t)
                    );
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} inputs x 3 rules"))
}

fn leading_term(opts: &SelftestOptions) -> Check {
    let t = symbol_table();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 2);
    let top = opts.max_size.clamp(1, 6);
    for n in 0..50 {
        let size = rng.random_range(1..=top);
        let parts = random_partition(&mut rng, size);
        let odd = random_parities(&mut rng, parts.len());
        let classes = classes_for(&t, &odd);
        let k = KMatrix::random_admissible(top, window(&mut rng), opts.seed + 100 + n);
        let out = bar_i(&parts, &classes, &k, &BarOptions::default()).map_err(err)?;
        let input = BarInput::Standard {
            parts: parts.clone(),
            classes,
        };
        let lead = ULaurent::iu_power(parts.len() as i64 - size as i64);
        ensure!(
            out.stratum(size) == TransformedExpr::single(&input.left_word(), &lead),
            "top stratum wrong for α = {parts:?}"
        );
        let heavier = out
            .terms()
            .any(|(w, _)| w.iter().map(Insertion::weight).sum::<u32>() > size);
        ensure!(!heavier, "a term exceeds the input size for α = {parts:?}");
    }
    Ok("50 random (α, K)".into())
}

/// All compositions of `n`.
fn compositions(n: u32) -> Vec<Vec<u32>> {
    (0..1u32 << (n - 1))
        .map(|cuts| {
            let mut parts = Vec::new();
            let mut run = 1;
            for j in 0..n - 1 {
                if cuts >> j & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            parts
        })
        .collect()
}

fn parity_patterns(l: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << l).map(move |m| (0..l).map(|j| m >> j & 1 == 1).collect())
}

fn diagonal_specializes(opts: &SelftestOptions) -> Check {
    let t = symbol_table();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 3);
    let mut cases = 0;
    let top = opts.max_size.clamp(1, 5);
    for size in 1..=top {
        for parts in compositions(size) {
            let d = OrderedSetPartition::from_sizes(&vec![1; parts.len()]).map_err(err)?;
            for odd in parity_patterns(parts.len()) {
                let classes = classes_for(&t, &odd);
                let k = KMatrix::random_admissible(top, window(&mut rng), opts.seed + 200 + cases);
                let a = bar_i(&parts, &classes, &k, &BarOptions::default()).map_err(err)?;
                let b = bar_ii(&parts, &d, &classes, &k, &BarOptions::default()).map_err(err)?;
                ensure!(a == b, "rules differ for α = {parts:?}, parities {odd:?}");
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (α, parity) pairs"))
}

fn general_specializes(opts: &SelftestOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 4);
    let top = opts.max_size.clamp(1, 5);
    let mut cases = 0;
    for ring in [CohomRing::projective3(), CohomRing::odd_test()] {
        let t = SymbolTable::from_ring(&ring);
        let inputs: Vec<Vec<u32>> = (1..=top)
            .flat_map(compositions)
            .filter(|a| a.len() <= 3)
            .collect();
        for parts in inputs {
            for _ in 0..4 {
                let idx: Vec<usize> = (0..parts.len())
                    .map(|_| rng.random_range(0..ring.rank()))
                    .collect();
                let classes: Vec<ClassMonomial> =
                    idx.iter().map(|&i| basis_monomial(&ring, i)).collect();
                let k = KMatrix::random_admissible(top, window(&mut rng), opts.seed + 300 + cases);
                let bar = BarOptions::default();
                let standard = bar_i(&parts, &classes, &k, &bar).map_err(err)?;
                let general = bar_iii(&parts, &TensorArg::factored(classes.clone()), &k, &bar)
                    .map_err(err)?;
                let names: Vec<&str> = idx.iter().map(|&i| ring.name(i)).collect();
                ensure!(
                    standard == general,
                    "symbolic general rule differs for α = {parts:?}, classes {names:?}"
                );
                let factors: Vec<_> = idx.iter().map(|&i| ring.basis(i)).collect();
                let delta = TensorClass::from_factors(&ring, &factors).map_err(err)?;
                let on_ring = bar_iii_on_ring(&parts, &delta, &ring, &k, &bar).map_err(err)?;
                let evaluated = evaluate_on_ring(&standard, &ring, &t).map_err(err)?;
                ensure!(
                    on_ring == evaluated,
                    "ring evaluation differs for α = {parts:?}, classes {names:?}:\n{}\nvs\n{}",
                    on_ring.display(&t),
                    evaluated.display(&t)
                );
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases on two rings"))
}

fn degree_filter() -> Check {
    let mut pairs = 0;
    for n in 1..=6 {
        let all = Partition::all_of_size(n);
        for a in &all {
            for b in &all {
                pairs += 1;
                let allowed = required_degree(a, b) >= 0;
                let expected = a.len() == 1 && a == b;
                ensure!(
                    allowed == expected,
                    "equal size {a} -> {b}: required degree {}",
                    required_degree(a, b)
                );
            }
        }
        let ones = Partition::ones(n as usize);
        for b in Partition::all_up_to(n) {
            let allowed = required_degree(&ones, &b) >= 0;
            ensure!(
                allowed == (n == 1 && b == Partition::single(1)),
                "1^{n} -> {b} admissible"
            );
        }
    }
    Ok(format!("{pairs} equal-size pairs"))
}

fn meet_exponents() -> Check {
    let mut parts_checked = 0u64;
    for l in 1..=6 {
        let all = enumerate_set_partitions(l, 12).map_err(err)?;
        for d in &all {
            let dl = d.labels();
            for p in &all {
                let pl = p.labels();
                let m = meet(d, p).map_err(err)?;
                for part in m.blocks() {
                    let mut dn: Vec<usize> = part.iter().map(|&x| dl[x]).collect();
                    dn.sort_unstable();
                    dn.dedup();
                    let mut pn: Vec<usize> = part.iter().map(|&x| pl[x]).collect();
                    pn.sort_unstable();
                    pn.dedup();
                    ensure!(
                        dn.len() + pn.len() <= part.len() + 1,
                        "D = {d}, P = {p}, part {part:?}"
                    );
                    parts_checked += 1;
                }
            }
        }
    }
    Ok(format!("{parts_checked} meet parts"))
}

fn signs_and_ordering(opts: &SelftestOptions) -> Check {
    let t = symbol_table();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 7);
    let top = opts.max_size.clamp(2, 5);
    for n in 0..100 {
        let size = rng.random_range(2..=top);
        let mut parts = random_partition(&mut rng, size);
        if parts.len() < 2 {
            parts = vec![top - 1, 1];
        }
        parts.shuffle(&mut rng);
        let j = rng.random_range(0..parts.len() - 1);
        let mut odd = random_parities(&mut rng, parts.len());
        odd[j] = true;
        odd[j + 1] = true;
        let classes = classes_for(&t, &odd);
        let k = KMatrix::random_admissible(top, window(&mut rng), opts.seed + 700 + n);
        let mut sp = parts.clone();
        sp.swap(j, j + 1);
        let mut sc = classes.clone();
        sc.swap(j, j + 1);
        let bar = BarOptions::default();
        let a = bar_i(&parts, &classes, &k, &bar).map_err(err)?;
        let b = bar_i(&sp, &sc, &k, &bar).map_err(err)?;
        ensure!(
            a == b.neg(),
            "standard rule not odd-equivariant for α = {parts:?}"
        );
        let a = bar_iii(&parts, &TensorArg::factored(classes), &k, &bar).map_err(err)?;
        let b = bar_iii(&sp, &TensorArg::factored(sc), &k, &bar).map_err(err)?;
        ensure!(
            a == b.neg(),
            "general rule not odd-equivariant for α = {parts:?}"
        );
    }
    for n in 0..100 {
        let size = rng.random_range(2..=top);
        let mut parts = random_partition(&mut rng, size);
        parts.shuffle(&mut rng);
        let l = parts.len();
        let mut sizes = Vec::new();
        let mut left = l;
        while left > 0 {
            let s = rng.random_range(1..=left);
            sizes.push(s);
            left -= s;
        }
        let d = OrderedSetPartition::from_sizes(&sizes).map_err(err)?;
        let odd = random_parities(&mut rng, sizes.len());
        let classes = classes_for(&t, &odd);
        let k = KMatrix::random_admissible(top, window(&mut rng), opts.seed + 800 + n);
        let base = bar_ii(&parts, &d, &classes, &k, &BarOptions::default()).map_err(err)?;
        let shuffled = BarOptions {
            meet_order: MeetOrder::Shuffled(opts.seed + n),
            ..BarOptions::default()
        };
        let other = bar_ii(&parts, &d, &classes, &k, &shuffled).map_err(err)?;
        ensure!(
            base == other,
            "meet order changed the diagonal rule for α = {parts:?}, D = {d}"
        );
    }
    Ok("100 transpositions, 100 meet shuffles".into())
}

fn theta_example() -> Check {
    let p = OrderedSetPartition::new(5, vec![vec![1, 3, 4], vec![0, 2]]).map_err(err)?;
    let theta: Vec<usize> = p.theta().iter().map(|x| x + 1).collect();
    ensure!(theta == [2, 4, 5, 1, 3], "theta = {theta:?}");
    let p = OrderedSetPartition::new(3, vec![vec![2], vec![0, 1]]).map_err(err)?;
    let theta: Vec<usize> = p.theta().iter().map(|x| x + 1).collect();
    ensure!(theta == [3, 1, 2], "theta = {theta:?}");
    Ok("1->2, 2->4, 3->5, 4->1, 5->3".into())
}

/// Bernoulli numbers with `B_1 = −1/2` from `Σ_{k≤n} C(n+1,k) B_k = 0`.
fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=n {
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

fn random_q(rng: &mut ChaCha8Rng) -> QRational {
    let mut num: Vec<i64> = (0..rng.random_range(1..=4))
        .map(|_| rng.random_range(-4..=4))
        .collect();
    if num.iter().all(|&c| c == 0) {
        num[0] = 1;
    }
    let mut den = QPoly::one();
    for _ in 0..rng.random_range(0..=2) {
        den = &den * &QPoly::from_ints(&[1, 1]);
    }
    den = &den * &QPoly::from_ints(&[rng.random_range(1..=3), rng.random_range(-3..=-1)]);
    QRational::new(QPoly::from_ints(&num), den).expect("nonzero denominator")
}

fn change_of_variables(opts: &SelftestOptions) -> Check {
    // 1/(1 − e^x) = −Σ B_n x^{n−1}/n! with x = iu
    let b = bernoulli(11);
    let mut factorial = BigInt::one();
    let mut oracle = Vec::new();
    for (n, bn) in b.iter().enumerate() {
        if n > 0 {
            factorial *= BigInt::from(n);
        }
        let c = -bn / BigRational::from_integer(factorial.clone());
        let c = GaussRat::new(c, BigRational::zero());
        oracle.push((n as i64 - 1, &c * &GaussRat::i_pow(n as i64 - 1)));
    }
    let oracle = ULaurent::from_scalars(oracle, Some(10));
    let f = QRational::new(QPoly::one(), QPoly::from_ints(&[1, 1])).map_err(err)?;
    let got = expand_change_of_variables(&f, 0, 10).map_err(err)?;
    ensure!(
        got == oracle,
        "1/(1+q) expansion:\n{got}\noracle:\n{oracle}"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 9);
    let n = 6;
    for _ in 0..50 {
        let (f, g) = (random_q(&mut rng), random_q(&mut rng));
        let (d1, d2) = (rng.random_range(-2..=3), rng.random_range(-2..=3));
        let fg = expand_change_of_variables(&(&f * &g), d1 + d2, n).map_err(err)?;
        let prod = &expand_change_of_variables(&f, d1, n).map_err(err)?
            * &expand_change_of_variables(&g, d2, n).map_err(err)?;
        ensure!(
            fg.agrees_with(&prod),
            "multiplicativity fails for {f} and {g}"
        );
        ensure!(
            prod.order().is_some_and(|o| o >= n - 4),
            "product truncated too early"
        );
    }
    let one = QRational::one();
    let half = expand_change_of_variables(&one, 1, n).map_err(err)?;
    let full = expand_change_of_variables(&one, 2, n).map_err(err)?;
    ensure!(
        (&half * &half).truncate(n) == full,
        "((−q)^(−1/2))^2 differs from (−q)^(−1)"
    );
    for _ in 0..10 {
        let f = random_q(&mut rng);
        let d = 2 * rng.random_range(-1..=2);
        let odd = expand_change_of_variables(&f, d + 1, n).map_err(err)?;
        let even = expand_change_of_variables(&f, d, n).map_err(err)?;
        ensure!(
            odd.agrees_with(&(&even * &half)),
            "odd half power inconsistent for {f}"
        );
    }
    Ok("Bernoulli oracle to u^10, 50 products, half powers".into())
}

fn bridge_round_trip(opts: &SelftestOptions) -> Check {
    let t = symbol_table();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 10);
    let top = opts.max_size.clamp(1, 4);
    let order = 6;
    let mut perturbed = 0;
    for n in 0..20 {
        let size = rng.random_range(1..=top);
        let mut parts = random_partition(&mut rng, size);
        parts.truncate(3);
        let odd = random_parities(&mut rng, parts.len());
        let classes = classes_for(&t, &odd);
        let k = KMatrix::random_admissible(top, window(&mut rng), opts.seed + 1000 + n);
        let input = BarInput::Standard {
            parts: parts.clone(),
            classes: classes.clone(),
        };
        let bar = bar_i(&parts, &classes, &k, &BarOptions::default()).map_err(err)?;
        let lhs = input.left_word();
        let d = rng.random_range(0..=3);
        let dim_y = rng.random_range(0..=1);
        let fx = synthetic_fixture(&lhs, &bar, d, dim_y, order, opts.seed + n, &t).map_err(err)?;
        let report = check_correspondence(&lhs, &bar, &fx.zp, &fx.zgw, order, &t).map_err(err)?;
        ensure!(
            report.verdict == Verdict::Equal { order },
            "fixture for α = {parts:?} gave {:?}",
            report.verdict
        );
        ensure!(
            report.degrees_agree(),
            "homology degrees differ for α = {parts:?}"
        );
        let terms: Vec<_> = bar.terms().collect();
        let (w, c) = terms[rng.random_range(0..terms.len())];
        let val = c.lowest().expect("nonzero");
        let hi = order - d - val;
        if hi < -3 {
            continue;
        }
        let power = rng.random_range(-3..=hi);
        let zgw = perturb(&fx.zgw, w, power, &GaussRat::one()).map_err(err)?;
        let report = check_correspondence(&lhs, &bar, &fx.zp, &zgw, order, &t).map_err(err)?;
        let want = power + d + val;
        ensure!(
            report.verdict == Verdict::Unequal { first_power: want },
            "perturbation at u^{power} reported as {:?}, expected u^{want}",
            report.verdict
        );
        perturbed += 1;
    }
    Ok(format!("20 fixtures, {perturbed} perturbations located"))
}

fn random_class(rng: &mut ChaCha8Rng, t: &SymbolTable) -> ClassMonomial {
    let mut factors: Vec<ClassFactor> = Vec::new();
    for _ in 0..rng.random_range(0..=3) {
        let name = format!(
            "{}{}",
            if rng.random_bool(0.5) { "o" } else { "e" },
            rng.random_range(1..=6)
        );
        if let Some(SymbolRef::Class(f)) = t.resolve(&name) {
            if !(f.odd && factors.contains(&f)) {
                factors.push(f);
            }
        }
    }
    let chern = ChernMono::new(
        rng.random_range(0..=2),
        rng.random_range(0..=1),
        rng.random_range(0..=1),
    );
    ClassMonomial::from_factors(&factors, chern)
        .expect("no repeated odd factor")
        .1
}

fn random_ks(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.random_range(0..=4)).collect()
}

fn random_insertion(rng: &mut ChaCha8Rng, t: &SymbolTable) -> Insertion {
    match rng.random_range(0..4) {
        0 => Insertion::Standard {
            k: rng.random_range(0..=5),
            class: random_class(rng, t),
        },
        1 => {
            let size = rng.random_range(2..=6);
            let mut parts = random_partition(rng, size);
            if parts.len() == 1 {
                parts = vec![parts[0] - 1, 1];
            }
            Insertion::Diagonal {
                sigma: Partition::new(parts).expect("positive"),
                class: random_class(rng, t),
            }
        }
        2 => {
            let blocks: Vec<DiagonalBlock> = (0..rng.random_range(1..=3))
                .map(|_| DiagonalBlock {
                    class: random_class(rng, t),
                    width: rng.random_range(1..=3),
                })
                .collect();
            let arity = blocks.iter().map(|b| b.width).sum();
            Insertion::General {
                ks: random_ks(rng, arity),
                delta: TensorArg::Factored(blocks),
            }
        }
        _ => {
            let (name, arity) = if rng.random_bool(0.5) {
                ("T2", 2)
            } else {
                ("T3", 3)
            };
            let Some(SymbolRef::Tensor {
                id, degree, odd, ..
            }) = t.resolve(name)
            else {
                unreachable!("declared tensor")
            };
            let transport = rng.random_bool(0.6).then(|| {
                let labels: Vec<usize> = (0..arity).map(|_| rng.random_range(0..arity)).collect();
                let mut blocks = SetPartition::from_labels(&labels).blocks().to_vec();
                blocks.shuffle(rng);
                let fans: Vec<usize> = blocks.iter().map(|_| rng.random_range(1..=3)).collect();
                let chern = blocks
                    .iter()
                    .map(|_| ChernMono::new(0, rng.random_range(0..=1), rng.random_range(0..=1)))
                    .collect();
                Transport {
                    blocks,
                    fans,
                    chern,
                }
            });
            let sym = TensorSymbol {
                id,
                arity,
                degree,
                odd,
                transport,
            };
            Insertion::General {
                ks: random_ks(rng, sym.arity()),
                delta: TensorArg::Opaque(sym),
            }
        }
    }
}

fn random_word(rng: &mut ChaCha8Rng, t: &SymbolTable) -> DescendentWord {
    let ins = (0..rng.random_range(0..=4))
        .map(|_| random_insertion(rng, t))
        .collect();
    DescendentWord {
        sign: if rng.random_bool(0.5) { 1 } else { -1 },
        insertions: ins,
    }
}

fn random_gauss(rng: &mut ChaCha8Rng) -> GaussRat {
    let re = GaussRat::ratio(rng.random_range(-9..=9), rng.random_range(1..=4));
    let im = GaussRat::ratio(rng.random_range(-3..=3), rng.random_range(1..=3));
    &re + &im.scale_i()
}

fn random_ring_spec(rng: &mut ChaCha8Rng) -> String {
    let tag = rng.random_range(0..1000);
    let n = |s: &str| format!("{s}{tag}");
    let mut nz = || {
        let mut c = random_gauss(rng);
        while c.is_zero() {
            c = random_gauss(rng);
        }
        c
    };
    let (s1, s2, top) = (nz(), nz(), nz());
    let (c1, c2, c3) = (nz(), nz(), nz());
    let dimy = rng.random_range(0..=3);
    format!(
        "basis {one} deg=0 parity=even\nbasis {h} deg=2 parity=even\nbasis {a} deg=3 parity=odd\n\
         basis {b} deg=3 parity=odd\nbasis {g} deg=4 parity=even\nbasis {p} deg=6 parity=even\n\
         mul {h}*{h} = ({s1})*{g}\nmul {h}*{g} = ({s2})*{p}\nmul {a}*{b} = {p}\nintegral {p} = {top}\n\
         chern c1 = ({c1})*{h}\nchern c2 = ({c2})*{g}\nchern c3 = ({c3})*{p}\ndimy = {dimy}\n",
        one = n("one"),
        h = n("h"),
        a = n("a"),
        b = n("b"),
        g = n("g"),
        p = n("p"),
    )
}

fn round_trips(opts: &SelftestOptions) -> Check {
    let t = symbol_table();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 11);
    let mut cases = 0;
    for _ in 0..500 {
        let w = random_word(&mut rng, &t);
        let text = w.display(&t);
        let back = dsl::parse_word(&text, &t).map_err(|e| format!("`{text}`: {e}"))?;
        ensure!(back == w, "word `{text}` parsed to {}", back.display(&t));
        let tree = dsl::parse_expr(&text).map_err(err)?;
        ensure!(
            dsl::parse_expr(&tree.to_string()).map_err(err)? == tree,
            "tree of `{text}` changed"
        );
        cases += 1;
    }
    for n in 0..200 {
        let k = KMatrix::random_admissible(
            rng.random_range(1..=5),
            window(&mut rng),
            opts.seed + 2000 + n,
        );
        let back = KMatrix::parse(&k.serialize()).map_err(err)?;
        ensure!(back == k, "K-matrix round trip failed");
        cases += 1;
    }
    for _ in 0..200 {
        let spec = random_ring_spec(&mut rng);
        let ring = CohomRing::parse(&spec).map_err(|e| format!("{e}\n{spec}"))?;
        let printed = ring.to_spec();
        let back = CohomRing::parse(&printed).map_err(err)?;
        ensure!(
            back.same_structure(&ring) && back.to_spec() == printed,
            "ring round trip:\n{printed}"
        );
        cases += 1;
    }
    for _ in 0..200 {
        let side = if rng.random_bool(0.5) {
            Side::Pairs
        } else {
            Side::Gw
        };
        let mut table = TheoryTable::new(
            side,
            "b1",
            rng.random_range(-2..=4),
            rng.random_range(0..=2),
        );
        for _ in 0..rng.random_range(0..=4) {
            let w = random_word(&mut rng, &t);
            let series = match side {
                Side::Pairs => Series::Pairs(random_q(&mut rng)),
                Side::Gw => {
                    let lo = rng.random_range(-3..=1);
                    let terms: Vec<_> = (lo..lo + 3).map(|k| (k, random_gauss(&mut rng))).collect();
                    let order = rng.random_bool(0.5).then(|| lo + 4);
                    Series::Gw(ULaurent::from_scalars(terms, order))
                }
            };
            if table.get(&w).is_none() {
                table.insert(&w, series, &t).map_err(err)?;
            }
        }
        let text = table.serialize(&t);
        let back = TheoryTable::parse(&text, &t).map_err(|e| format!("{e}\n{text}"))?;
        ensure!(back == table, "theory table round trip:\n{text}");
        cases += 1;
    }
    Ok(format!("{cases} round trips"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_oracle_values() {
        let b = bernoulli(6);
        let r = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(b[1], r(-1, 2));
        assert_eq!(b[2], r(1, 6));
        assert_eq!(b[3], r(0, 1));
        assert_eq!(b[4], r(-1, 30));
        assert_eq!(b[6], r(1, 42));
    }

    #[test]
    fn theta_criterion() {
        assert!(run_criterion(8, &SelftestOptions::default()).passed);
    }
}
