//! Correspondence matrices: sparse tables `(α, α̂) ↦ K̃_{α,α̂}` of Laurent
//! series in `u` with coefficients in `ℚ[i, c1, c2, c3]`, their structural
//! validation, a random generator, and a line-oriented text format.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, ParseError, Result};
use crate::partitions::Partition;
use crate::scalars::{ChernMono, GaussRat, GradedPoly, HomogeneousDegree, ULaurent};

/// `|α| + ℓ(α) − |α̂| − ℓ(α̂) − 3(ℓ(α) − 1)`: the graded degree every
/// coefficient of `K̃_{α,α̂}` must have.
pub fn required_degree(alpha: &Partition, ahat: &Partition) -> i64 {
    let (a, la) = (alpha.size() as i64, alpha.len() as i64);
    let (b, lb) = (ahat.size() as i64, ahat.len() as i64);
    a + la - b - lb - 3 * (la - 1)
}

/// `(iu)^{1−a}`, the pinned value of `K̃_{(a),(a)}`.
pub fn diagonal_value(a: u32) -> ULaurent {
    ULaurent::iu_power(1 - a as i64)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KMatrix {
    entries: BTreeMap<Partition, BTreeMap<Partition, ULaurent>>,
    max_size: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Nonzero entry with `|α| < |α̂|`.
    SizeVanishing {
        alpha: Partition,
        ahat: Partition,
    },
    /// A `u`-coefficient mixing graded degrees.
    Inhomogeneous {
        alpha: Partition,
        ahat: Partition,
        power: i64,
    },
    WrongDegree {
        alpha: Partition,
        ahat: Partition,
        power: i64,
        found: u32,
        required: i64,
    },
    /// Nonzero entry whose required degree is negative.
    NegativeDegree {
        alpha: Partition,
        ahat: Partition,
        required: i64,
    },
    /// Nonzero entry with `|α| = |α̂|` other than `α = α̂ = (a)`.
    TopSizeOffDiagonal {
        alpha: Partition,
        ahat: Partition,
    },
    /// `K̃_{(a),(a)}` differs from `(iu)^{1−a}`.
    Diagonal {
        a: u32,
        found: ULaurent,
    },
    /// `K̃_{(a),(a)}` absent for some `a ≤ max_size`.
    MissingDiagonal {
        a: u32,
    },
    ExceedsMaxSize {
        alpha: Partition,
        max_size: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SizeVanishing { alpha, ahat } => {
                write!(f, "{alpha} -> {ahat}: entry must vanish since |alpha| < |ahat|")
            }
            Violation::Inhomogeneous { alpha, ahat, power } => {
                write!(f, "{alpha} -> {ahat}: coefficient of u^{power} is not homogeneous")
            }
            Violation::WrongDegree { alpha, ahat, power, found, required } => write!(
                f,
                "{alpha} -> {ahat}: coefficient of u^{power} has degree {found}, required {required}"
            ),
            Violation::NegativeDegree { alpha, ahat, required } => {
                write!(f, "{alpha} -> {ahat}: entry must vanish since the required degree is {required}")
            }
            Violation::TopSizeOffDiagonal { alpha, ahat } => write!(
                f,
                "{alpha} -> {ahat}: at |alpha| = |ahat| only single-part diagonal entries may be nonzero"
            ),
            Violation::Diagonal { a, found } => {
                write!(f, "({a}) -> ({a}): expected {}, found {found}", diagonal_value(*a))
            }
            Violation::MissingDiagonal { a } => {
                write!(f, "({a}) -> ({a}): missing, expected {}", diagonal_value(*a))
            }
            Violation::ExceedsMaxSize { alpha, max_size } => {
                write!(f, "{alpha}: size exceeds the declared max_size {max_size}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Require `K̃_{(a),(a)} = (iu)^{1−a}` exactly. When false, constant
    /// corrections at higher powers of `u` are tolerated.
    pub strict_diagonal: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            strict_diagonal: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub entries_checked: usize,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return writeln!(f, "valid: {} entries, no violations", self.entries_checked);
        }
        writeln!(
            f,
            "invalid: {} violation(s) in {} entries",
            self.violations.len(),
            self.entries_checked
        )?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

impl KMatrix {
    pub fn new(max_size: u32) -> Self {
        KMatrix {
            entries: BTreeMap::new(),
            max_size,
        }
    }

    /// Exactly the pinned diagonal entries for `1 ≤ a ≤ max_size`.
    pub fn forced_entries(max_size: u32) -> Self {
        let mut k = KMatrix::new(max_size);
        for a in 1..=max_size {
            k.add(
                Partition::single(a),
                Partition::single(a),
                &diagonal_value(a),
            );
        }
        k
    }

    pub fn max_size(&self) -> u32 {
        self.max_size
    }

    /// Adds `series` to the entry at `(α, α̂)`, dropping it if it cancels.
    pub fn add(&mut self, alpha: Partition, ahat: Partition, series: &ULaurent) {
        self.max_size = self.max_size.max(alpha.size());
        let row = self.entries.entry(alpha.clone()).or_default();
        let sum = match row.get(&ahat) {
            Some(old) => old + series,
            None => series.clone(),
        };
        if sum.is_zero() && sum.is_exact() {
            row.remove(&ahat);
            if row.is_empty() {
                self.entries.remove(&alpha);
            }
        } else {
            row.insert(ahat, sum);
        }
    }

    pub fn get(&self, alpha: &Partition, ahat: &Partition) -> Option<&ULaurent> {
        self.entries.get(alpha)?.get(ahat)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &Partition, &ULaurent)> {
        self.entries
            .iter()
            .flat_map(|(a, row)| row.iter().map(move |(b, s)| (a, b, s)))
    }

    /// The entries `K̃_{α,α̂}` a transform may use: `|α̂| ≤ |α|` and a
    /// nonnegative required degree, filtered before the lookup.
    pub fn targets(&self, alpha: &Partition) -> Result<Vec<(&Partition, &ULaurent)>> {
        if alpha.size() > self.max_size {
            return Err(Error::KMatrixTooSmall {
                max_size: self.max_size,
                needed: alpha.size(),
            });
        }
        let Some(row) = self.entries.get(alpha) else {
            return Ok(Vec::new());
        };
        Ok(row
            .iter()
            .filter(|(ahat, _)| ahat.size() <= alpha.size() && required_degree(alpha, ahat) >= 0)
            .collect())
    }

    pub fn validate(&self, opts: ValidationOptions) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (alpha, ahat, s) in self.iter() {
            report.entries_checked += 1;
            let (alpha, ahat) = (alpha.clone(), ahat.clone());
            if alpha.size() > self.max_size {
                report.violations.push(Violation::ExceedsMaxSize {
                    alpha: alpha.clone(),
                    max_size: self.max_size,
                });
            }
            if s.is_zero() {
                continue;
            }
            if alpha.size() < ahat.size() {
                report
                    .violations
                    .push(Violation::SizeVanishing { alpha, ahat });
                continue;
            }
            let is_diag = alpha.len() == 1 && alpha == ahat;
            if is_diag {
                let a = alpha.parts()[0];
                if !diagonal_ok(a, s, opts) {
                    report.violations.push(Violation::Diagonal {
                        a,
                        found: s.clone(),
                    });
                }
                continue;
            }
            let required = required_degree(&alpha, &ahat);
            if alpha.size() == ahat.size() {
                report
                    .violations
                    .push(Violation::TopSizeOffDiagonal { alpha, ahat });
                continue;
            }
            if required < 0 {
                report.violations.push(Violation::NegativeDegree {
                    alpha,
                    ahat,
                    required,
                });
                continue;
            }
            for (power, c) in s.terms() {
                match c.homogeneous_degree() {
                    None => report.violations.push(Violation::Inhomogeneous {
                        alpha: alpha.clone(),
                        ahat: ahat.clone(),
                        power,
                    }),
                    Some(HomogeneousDegree::Exactly(d)) if d as i64 != required => {
                        report.violations.push(Violation::WrongDegree {
                            alpha: alpha.clone(),
                            ahat: ahat.clone(),
                            power,
                            found: d,
                            required,
                        })
                    }
                    _ => {}
                }
            }
        }
        for a in 1..=self.max_size {
            let p = Partition::single(a);
            if self.get(&p, &p).is_none_or(ULaurent::is_zero) {
                report.violations.push(Violation::MissingDiagonal { a });
            }
        }
        report
    }

    /// Forced entries plus random entries on every admissible off-diagonal
    /// slot with `|α| ≤ max_size`, supported on powers `u_window.0..=u_window.1`.
    /// Coefficients are homogeneous of exactly the required degree, so the
    /// result always validates.
    pub fn random_admissible(max_size: u32, u_window: (i64, i64), seed: u64) -> KMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut k = KMatrix::forced_entries(max_size);
        for alpha in Partition::all_up_to(max_size) {
            for ahat in Partition::all_up_to(alpha.size()) {
                if ahat.size() == alpha.size() {
                    continue;
                }
                let d = required_degree(&alpha, &ahat);
                if d < 0 {
                    continue;
                }
                let s = random_series(&mut rng, d as u32, u_window);
                if !s.is_zero() {
                    k.add(alpha.clone(), ahat, &s);
                }
            }
        }
        k
    }

    /// One `entry` line per (u-power, Chern monomial) term, preceded by a
    /// `max_size=` line.
    pub fn serialize(&self) -> String {
        let mut out = format!("max_size={}\n", self.max_size);
        for (alpha, ahat, s) in self.iter() {
            for (k, p) in s.terms() {
                for (m, c) in p.terms() {
                    let _ = writeln!(
                        out,
                        "entry alpha={} ahat={} u={k} c={c} mono={}",
                        alpha.comma_form(),
                        ahat.comma_form(),
                        m.full_form()
                    );
                }
            }
        }
        out
    }

    /// Parses the text format. Lines accumulate additively; `#` starts a
    /// comment; an optional `max_size=<n>` line fixes the size bound,
    /// otherwise it is the largest `|α|` seen.
    pub fn parse(text: &str) -> std::result::Result<KMatrix, ParseError> {
        let mut k = KMatrix::new(0);
        let mut declared_max: Option<u32> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(v) = content.strip_prefix("max_size=") {
                let v = v
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| ParseError::at_line(line, format!("invalid max_size `{v}`")))?;
                if declared_max.replace(v).is_some() {
                    return Err(ParseError::at_line(line, "max_size declared twice"));
                }
                continue;
            }
            let (alpha, ahat, u, c, m) =
                parse_entry(content).map_err(|msg| ParseError::at_line(line, msg))?;
            k.add(
                alpha,
                ahat,
                &ULaurent::monomial(u, GradedPoly::monomial(m, c)),
            );
        }
        if let Some(m) = declared_max {
            k.max_size = m;
        }
        Ok(k)
    }

    /// Parses and validates; refuses matrices with violations unless
    /// `force` is set.
    pub fn load(
        text: &str,
        force: bool,
        opts: ValidationOptions,
    ) -> Result<(KMatrix, ValidationReport)> {
        let k = KMatrix::parse(text)?;
        let report = k.validate(opts);
        if !report.is_clean() && !force {
            return Err(Error::InvalidKMatrix(report.violations.len()));
        }
        Ok((k, report))
    }
}

fn diagonal_ok(a: u32, s: &ULaurent, opts: ValidationOptions) -> bool {
    let want = diagonal_value(a);
    if opts.strict_diagonal {
        return *s == want;
    }
    let lead = 1 - a as i64;
    s.lowest() == Some(lead)
        && s.coeff(lead) == want.coeff(lead)
        && s.terms().all(|(_, c)| c.as_constant().is_some())
}

fn random_gauss(rng: &mut ChaCha8Rng) -> GaussRat {
    let re = rng.random_range(-3i64..=3);
    let im = if rng.random_bool(0.25) {
        rng.random_range(-2i64..=2)
    } else {
        0
    };
    let den = rng.random_range(1i64..=2);
    let z = GaussRat::complex(re, im);
    if z.is_zero() {
        GaussRat::one()
    } else {
        &z * &GaussRat::ratio(1, den)
    }
}

fn random_series(rng: &mut ChaCha8Rng, degree: u32, window: (i64, i64)) -> ULaurent {
    let monos = ChernMono::all_of_degree(degree);
    let mut s = ULaurent::zero();
    for k in window.0..=window.1 {
        if !rng.random_bool(0.5) {
            continue;
        }
        let mut p = GradedPoly::zero();
        for m in &monos {
            if rng.random_bool(0.6) {
                p.add_term(*m, &random_gauss(rng));
            }
        }
        s.add_coeff(k, &p);
    }
    s
}

fn parse_entry(
    content: &str,
) -> std::result::Result<(Partition, Partition, i64, GaussRat, ChernMono), String> {
    let mut words = content.split_whitespace();
    if words.next() != Some("entry") {
        return Err("expected `entry` or `max_size=`".into());
    }
    let (mut alpha, mut ahat, mut u, mut c, mut mono) = (None, None, None, None, None);
    for w in words {
        let (key, value) = w
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{w}`"))?;
        let dup = match key {
            "alpha" => alpha.replace(Partition::parse(value)?).is_some(),
            "ahat" => ahat.replace(Partition::parse(value)?).is_some(),
            "u" => u
                .replace(
                    value
                        .parse::<i64>()
                        .map_err(|_| format!("invalid u power `{value}`"))?,
                )
                .is_some(),
            "c" => c
                .replace(value.parse::<GaussRat>().map_err(|e| e.to_string())?)
                .is_some(),
            "mono" => mono.replace(parse_mono(value)?).is_some(),
            _ => return Err(format!("unknown key `{key}`")),
        };
        if dup {
            return Err(format!("key `{key}` given twice"));
        }
    }
    Ok((
        alpha.ok_or("missing alpha=")?,
        ahat.ok_or("missing ahat=")?,
        u.ok_or("missing u=")?,
        c.ok_or("missing c=")?,
        mono.unwrap_or(ChernMono::ONE),
    ))
}

/// `c1^a*c2^b*c3^c`, any subset of the factors, or `1`.
pub fn parse_mono(text: &str) -> std::result::Result<ChernMono, String> {
    if text == "1" {
        return Ok(ChernMono::ONE);
    }
    let mut m = ChernMono::ONE;
    let mut seen = [false; 3];
    for f in text.split('*') {
        let (var, e) = f.split_once('^').unwrap_or((f, "1"));
        let k = match var {
            "c1" => 1,
            "c2" => 2,
            "c3" => 3,
            _ => return Err(format!("invalid monomial factor `{f}`")),
        };
        if std::mem::replace(&mut seen[k - 1], true) {
            return Err(format!("`c{k}` repeated in monomial"));
        }
        let e: u32 = e
            .parse()
            .map_err(|_| format!("invalid exponent in `{f}`"))?;
        m = m.mul(&ChernMono::new(
            if k == 1 { e } else { 0 },
            if k == 2 { e } else { 0 },
            if k == 3 { e } else { 0 },
        ));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn required_degree_examples() {
        assert_eq!(required_degree(&p(&[1]), &p(&[1])), 0);
        assert_eq!(required_degree(&p(&[2, 1]), &p(&[1])), 0);
        assert_eq!(required_degree(&p(&[3]), &p(&[1])), 2);
        assert_eq!(required_degree(&p(&[2, 2]), &p(&[2, 2])), -3);
    }

    #[test]
    fn forced_values() {
        let k = KMatrix::forced_entries(3);
        assert_eq!(k.get(&p(&[1]), &p(&[1])).unwrap(), &ULaurent::one());
        let two = ULaurent::scalar_monomial(-1, GaussRat::complex(0, -1));
        assert_eq!(k.get(&p(&[2]), &p(&[2])).unwrap(), &two);
        let three = ULaurent::scalar_monomial(-2, GaussRat::from_int(-1));
        assert_eq!(k.get(&p(&[3]), &p(&[3])).unwrap(), &three);
        for n in 1..=8 {
            assert!(KMatrix::forced_entries(n)
                .validate(ValidationOptions::default())
                .is_clean());
        }
    }

    #[test]
    fn violations_are_reported() {
        let mut k = KMatrix::forced_entries(4);
        k.add(p(&[1]), p(&[2]), &ULaurent::one());
        let r = k.validate(ValidationOptions::default());
        assert!(matches!(
            r.violations[..],
            [Violation::SizeVanishing { .. }]
        ));

        let mut k = KMatrix::forced_entries(4);
        let c1 = ULaurent::monomial(0, GradedPoly::monomial(ChernMono::c(1), GaussRat::one()));
        k.add(p(&[2, 2]), p(&[2, 2]), &c1);
        let r = k.validate(ValidationOptions::default());
        assert!(matches!(
            r.violations[..],
            [Violation::TopSizeOffDiagonal { .. }]
        ));

        let mut k = KMatrix::forced_entries(4);
        k.add(p(&[3]), p(&[1]), &c1);
        let r = k.validate(ValidationOptions::default());
        assert!(matches!(
            r.violations[..],
            [Violation::WrongDegree {
                found: 1,
                required: 2,
                ..
            }]
        ));

        let mut k = KMatrix::forced_entries(3);
        k.add(
            p(&[2]),
            p(&[2]),
            &ULaurent::scalar_monomial(0, GaussRat::one()),
        );
        assert!(!k.validate(ValidationOptions::default()).is_clean());
        assert!(k
            .validate(ValidationOptions {
                strict_diagonal: false
            })
            .is_clean());
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        let a = KMatrix::random_admissible(5, (-2, 1), 7);
        assert_eq!(a, KMatrix::random_admissible(5, (-2, 1), 7));
        assert!(a.validate(ValidationOptions::default()).is_clean());
        assert_eq!(
            KMatrix::random_admissible(1, (-2, 1), 3),
            KMatrix::forced_entries(1)
        );
    }

    #[test]
    fn serialization_round_trip() {
        let a = KMatrix::random_admissible(4, (-1, 1), 11);
        assert_eq!(KMatrix::parse(&a.serialize()).unwrap(), a);
        let err =
            KMatrix::parse("max_size=2\nentry alpha=1 ahat=1 u=0 c=1\nentry alpha=x").unwrap_err();
        assert_eq!(err.line, 3);
    }
}
