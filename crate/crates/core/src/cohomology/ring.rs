use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{One, Zero};

use crate::error::{Error, ParseError, Result};
use crate::scalars::{GaussRat, HomogeneousDegree};
use crate::textfmt;

/// Real dimension of the fiber: classes of degree 6 are top classes.
pub const TOP_DEGREE: u32 = 6;

static NEXT_RING_ID: AtomicU64 = AtomicU64::new(1);

/// A finite graded-commutative ring with a unit, an integration functional
/// concentrated in degree 6, a nondegenerate pairing, and chosen Chern
/// classes `c1, c2, c3`.
///
/// The unique degree-0 basis element is the unit; its products are implied.
#[derive(Debug)]
pub struct CohomRing {
    id: u64,
    names: Vec<String>,
    degrees: Vec<u32>,
    unit: usize,
    mul: Vec<Vec<Vec<GaussRat>>>,
    integral: Vec<GaussRat>,
    chern: [Vec<GaussRat>; 3],
    dim_y: u32,
    gram_inv: Vec<Vec<GaussRat>>,
}

/// An element of a particular ring, in basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CohClass {
    ring: u64,
    coords: Vec<GaussRat>,
}

impl CohClass {
    pub fn coords(&self) -> &[GaussRat] {
        &self.coords
    }

    pub fn coeff(&self, i: usize) -> &GaussRat {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &GaussRat) -> CohClass {
        CohClass {
            ring: self.ring,
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn ring_id(&self) -> u64 {
        self.ring
    }

    /// Nonzero `(basis index, coefficient)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, &GaussRat)> {
        self.coords.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

pub(crate) fn invert(m: &[Vec<GaussRat>]) -> Option<Vec<Vec<GaussRat>>> {
    let n = m.len();
    let mut a: Vec<Vec<GaussRat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    GaussRat::one()
                } else {
                    GaussRat::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let v = &a[col][c] * &f;
                    a[r][c] -= &v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A parsed value and the line it came from.
type Sourced<T> = Option<(T, usize)>;

struct Draft {
    names: Vec<String>,
    degrees: Vec<u32>,
    mul: Vec<Vec<Sourced<Vec<GaussRat>>>>,
    integral: Vec<Option<(GaussRat, usize)>>,
    chern: [Option<(Vec<GaussRat>, usize)>; 3],
    dim_y: Option<u32>,
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::InvalidRing(ParseError::at_line(line, msg))
}

fn sign(p: u32) -> GaussRat {
    GaussRat::from_int(if p.is_multiple_of(2) { 1 } else { -1 })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Names that the text formats reserve for other meanings.
pub const RESERVED_NAMES: [&str; 6] = ["c1", "c2", "c3", "i", "u", "q"];

impl CohomRing {
    /// `H*(ℙ³)` with `c(T) = (1+h)^4`.
    pub fn projective3() -> CohomRing {
        CohomRing::parse(include_str!("../../rings/p3.ring")).expect("shipped ring is valid")
    }

    /// A ring with two odd classes of degree 3 pairing to the point class.
    pub fn odd_test() -> CohomRing {
        CohomRing::parse(include_str!("../../rings/odd.ring")).expect("shipped ring is valid")
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.degrees[i] % 2 == 1
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn dim_y(&self) -> u32 {
        self.dim_y
    }

    pub fn zero(&self) -> CohClass {
        CohClass {
            ring: self.id,
            coords: vec![GaussRat::zero(); self.rank()],
        }
    }

    pub fn basis(&self, i: usize) -> CohClass {
        let mut c = self.zero();
        c.coords[i] = GaussRat::one();
        c
    }

    pub fn unit(&self) -> CohClass {
        self.basis(self.unit)
    }

    pub fn class(&self, coords: Vec<GaussRat>) -> Result<CohClass> {
        if coords.len() != self.rank() {
            return Err(Error::ArityMismatch {
                expected: self.rank(),
                found: coords.len(),
            });
        }
        Ok(CohClass {
            ring: self.id,
            coords,
        })
    }

    /// `c_k` for `k ∈ {1,2,3}`.
    pub fn chern(&self, k: u32) -> CohClass {
        CohClass {
            ring: self.id,
            coords: self.chern[(k - 1) as usize].clone(),
        }
    }

    fn check(&self, c: &CohClass) -> Result<()> {
        if c.ring == self.id {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn basis_product(&self, a: usize, b: usize) -> &[GaussRat] {
        &self.mul[a][b]
    }

    pub fn cup(&self, x: &CohClass, y: &CohClass) -> Result<CohClass> {
        self.check(x)?;
        self.check(y)?;
        let mut out = self.zero();
        for (a, xa) in x.support() {
            for (b, yb) in y.support() {
                let f = xa * yb;
                for (c, v) in self.mul[a][b].iter().enumerate() {
                    if !v.is_zero() {
                        out.coords[c] += &(&f * v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, x: &CohClass, y: &CohClass) -> Result<CohClass> {
        self.check(x)?;
        self.check(y)?;
        Ok(CohClass {
            ring: self.id,
            coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn integrate(&self, x: &CohClass) -> Result<GaussRat> {
        self.check(x)?;
        Ok(self.integrate_coords(&x.coords))
    }

    pub(crate) fn integrate_coords(&self, coords: &[GaussRat]) -> GaussRat {
        coords
            .iter()
            .zip(&self.integral)
            .fold(GaussRat::zero(), |acc, (c, v)| &acc + &(c * v))
    }

    pub fn integral_of_basis(&self, i: usize) -> &GaussRat {
        &self.integral[i]
    }

    pub fn homogeneous_degree(&self, x: &CohClass) -> Option<HomogeneousDegree> {
        let mut degs = x.support().map(|(i, _)| self.degrees[i]);
        match degs.next() {
            None => Some(HomogeneousDegree::Any),
            Some(d) => degs
                .all(|e| e == d)
                .then_some(HomogeneousDegree::Exactly(d)),
        }
    }

    /// `∫ b_a · b_b`.
    pub fn pairing(&self, a: usize, b: usize) -> GaussRat {
        self.integrate_coords(&self.mul[a][b])
    }

    /// The right dual `b^a`, characterized by `∫ b_c · b^a = δ_{ca}`.
    pub fn dual(&self, a: usize) -> CohClass {
        CohClass {
            ring: self.id,
            coords: (0..self.rank())
                .map(|c| self.gram_inv[c][a].clone())
                .collect(),
        }
    }

    /// `Δ^*Δ_*(1) = Σ_a (−1)^{|b_a|} b_a · b^a`, the self-intersection of the
    /// diagonal.
    pub fn euler_class(&self) -> CohClass {
        let mut out = self.zero();
        for a in 0..self.rank() {
            let t = self.cup(&self.basis(a), &self.dual(a)).expect("same ring");
            out = self
                .add(&out, &t.scale(&sign(self.degrees[a])))
                .expect("same ring");
        }
        out
    }

    /// Parses the line-oriented ring format. See the crate README for the
    /// grammar; every invariant is verified before the ring is returned.
    pub fn parse(text: &str) -> Result<CohomRing> {
        let mut d = Draft {
            names: Vec::new(),
            degrees: Vec::new(),
            mul: Vec::new(),
            integral: Vec::new(),
            chern: [None, None, None],
            dim_y: None,
        };
        let mut last_line = 0;
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (head, rest) = content
                .split_once(char::is_whitespace)
                .unwrap_or((content, ""));
            let rest = rest.trim();
            match head {
                "basis" => d.basis_line(line, rest)?,
                "mul" => d.mul_line(line, rest)?,
                "integral" => d.integral_line(line, rest)?,
                "chern" => d.chern_line(line, rest)?,
                "dimy" | "dimy=" => d.dimy_line(line, rest)?,
                _ if head.starts_with("dimy=") => d.dimy_line(line, content)?,
                _ => return Err(bad(line, format!("unknown directive `{head}`"))),
            }
        }
        d.finish(last_line.max(1))
    }

    /// Emits a spec that parses back to an identical ring.
    pub fn to_spec(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.names.iter().enumerate() {
            let parity = if self.is_odd(i) { "odd" } else { "even" };
            let _ = writeln!(out, "basis {n} deg={} parity={parity}", self.degrees[i]);
        }
        for a in 0..self.rank() {
            for b in a..self.rank() {
                if a == self.unit || b == self.unit {
                    continue;
                }
                let p = &self.mul[a][b];
                if p.iter().any(|c| !c.is_zero()) {
                    let _ = writeln!(
                        out,
                        "mul {}*{} = {}",
                        self.names[a],
                        self.names[b],
                        self.combination(p)
                    );
                }
            }
        }
        for (i, v) in self.integral.iter().enumerate() {
            if !v.is_zero() {
                let _ = writeln!(out, "integral {} = {}", self.names[i], v);
            }
        }
        for k in 0..3 {
            let _ = writeln!(
                out,
                "chern c{} = {}",
                k + 1,
                self.combination(&self.chern[k])
            );
        }
        let _ = writeln!(out, "dimy = {}", self.dim_y);
        out
    }

    /// `4*h + 1/2*g` style linear combination of basis names.
    pub fn combination(&self, coords: &[GaussRat]) -> String {
        let mut out = String::new();
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                textfmt::push_term(&mut out, c, &self.names[i]);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Same basis, products, integral, Chern classes and base dimension.
    pub fn same_structure(&self, other: &CohomRing) -> bool {
        self.names == other.names
            && self.degrees == other.degrees
            && self.mul == other.mul
            && self.integral == other.integral
            && self.chern == other.chern
            && self.dim_y == other.dim_y
    }
}

impl Draft {
    fn index(&self, line: usize, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| bad(line, format!("unknown basis element `{name}`")))
    }

    fn unit(&self) -> Option<usize> {
        self.degrees.iter().position(|&d| d == 0)
    }

    /// Parses a linear combination of basis names; a bare constant means a
    /// multiple of the unit.
    fn combination(&self, line: usize, text: &str) -> Result<Vec<GaussRat>> {
        let sum = textfmt::parse_sum(text).map_err(|e| Error::InvalidRing(e.on_line(line)))?;
        if sum.big_o.is_some() {
            return Err(bad(line, "O(...) is not allowed in a ring spec"));
        }
        let mut out = vec![GaussRat::zero(); self.names.len()];
        for (powers, c) in sum.terms {
            let idx = match powers.len() {
                0 => self
                    .unit()
                    .ok_or_else(|| bad(line, "constant term but no degree-0 basis element"))?,
                1 => {
                    let (name, e) = powers.iter().next().unwrap();
                    if *e != 1 {
                        return Err(bad(
                            line,
                            format!("`{name}^{e}`: combinations must be linear"),
                        ));
                    }
                    self.index(line, name)?
                }
                _ => return Err(bad(line, "combinations must be linear in basis elements")),
            };
            out[idx] += &c;
        }
        Ok(out)
    }

    fn basis_line(&mut self, line: usize, rest: &str) -> Result<()> {
        let mut it = rest.split_whitespace();
        let name = it.next().ok_or_else(|| bad(line, "basis: missing name"))?;
        if !is_identifier(name) || RESERVED_NAMES.contains(&name) {
            return Err(bad(line, format!("basis: `{name}` is not a usable name")));
        }
        if self.names.iter().any(|n| n == name) {
            return Err(bad(line, format!("basis: duplicate name `{name}`")));
        }
        let (mut deg, mut parity) = (None, None);
        for kv in it {
            match kv.split_once('=') {
                Some(("deg", v)) => {
                    deg = Some(
                        v.parse::<u32>()
                            .map_err(|_| bad(line, format!("basis: invalid degree `{v}`")))?,
                    )
                }
                Some(("parity", "even")) => parity = Some(false),
                Some(("parity", "odd")) => parity = Some(true),
                _ => return Err(bad(line, format!("basis: unexpected `{kv}`"))),
            }
        }
        let deg = deg.ok_or_else(|| bad(line, "basis: missing deg="))?;
        if deg > TOP_DEGREE {
            return Err(bad(
                line,
                format!("basis: degree {deg} exceeds {TOP_DEGREE}"),
            ));
        }
        if let Some(odd) = parity {
            if odd != (deg % 2 == 1) {
                return Err(bad(
                    line,
                    format!("basis: parity disagrees with degree {deg}"),
                ));
            }
        }
        if deg == 0 && self.unit().is_some() {
            return Err(bad(
                line,
                "basis: only one degree-0 element (the unit) is allowed",
            ));
        }
        self.names.push(name.to_string());
        self.degrees.push(deg);
        Ok(())
    }

    fn grow(&mut self) {
        let n = self.names.len();
        self.mul.resize_with(n, Vec::new);
        for row in &mut self.mul {
            row.resize_with(n, || None);
        }
        self.integral.resize_with(n, || None);
    }

    fn mul_line(&mut self, line: usize, rest: &str) -> Result<()> {
        self.grow();
        let (lhs, rhs) = rest
            .split_once('=')
            .ok_or_else(|| bad(line, "mul: expected `a*b = ...`"))?;
        let (a, b) = lhs
            .split_once('*')
            .ok_or_else(|| bad(line, "mul: expected `a*b`"))?;
        let (a, b) = (self.index(line, a.trim())?, self.index(line, b.trim())?);
        let value = self.combination(line, rhs.trim())?;
        if self.mul[a][b].is_some() {
            return Err(bad(line, "mul: product declared twice"));
        }
        self.mul[a][b] = Some((value, line));
        Ok(())
    }

    fn integral_line(&mut self, line: usize, rest: &str) -> Result<()> {
        self.grow();
        let (name, value) = rest
            .split_once('=')
            .ok_or_else(|| bad(line, "integral: expected `name = value`"))?;
        let i = self.index(line, name.trim())?;
        let v: GaussRat = value
            .trim()
            .parse()
            .map_err(|e| bad(line, format!("integral: {e}")))?;
        if self.integral[i].is_some() {
            return Err(bad(line, "integral: declared twice"));
        }
        self.integral[i] = Some((v, line));
        Ok(())
    }

    fn chern_line(&mut self, line: usize, rest: &str) -> Result<()> {
        let (name, value) = rest
            .split_once('=')
            .ok_or_else(|| bad(line, "chern: expected `c<k> = ...`"))?;
        let k = match name.trim() {
            "c1" => 0,
            "c2" => 1,
            "c3" => 2,
            other => return Err(bad(line, format!("chern: unknown class `{other}`"))),
        };
        let v = self.combination(line, value.trim())?;
        if self.chern[k].is_some() {
            return Err(bad(line, "chern: declared twice"));
        }
        self.chern[k] = Some((v, line));
        Ok(())
    }

    fn dimy_line(&mut self, line: usize, rest: &str) -> Result<()> {
        let v = rest
            .trim()
            .trim_start_matches("dimy")
            .trim()
            .trim_start_matches('=')
            .trim();
        let v = v
            .parse::<u32>()
            .map_err(|_| bad(line, format!("dimy: invalid value `{v}`")))?;
        if self.dim_y.replace(v).is_some() {
            return Err(bad(line, "dimy: declared twice"));
        }
        Ok(())
    }

    fn finish(mut self, last: usize) -> Result<CohomRing> {
        self.grow();
        let n = self.names.len();
        let unit = self
            .unit()
            .ok_or_else(|| bad(last, "no degree-0 basis element"))?;
        let zero = || vec![GaussRat::zero(); n];
        let unit_vec = |i: usize| {
            let mut v = zero();
            v[i] = GaussRat::one();
            v
        };
        let mut mul = vec![vec![zero(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let swapped = self.mul[b][a].as_ref().map(|(v, l)| {
                    let s = sign(self.degrees[a] * self.degrees[b]);
                    (v.iter().map(|x| x * &s).collect::<Vec<_>>(), *l)
                });
                let implied = if a == unit {
                    Some((unit_vec(b), 0))
                } else if b == unit {
                    Some((unit_vec(a), 0))
                } else {
                    None
                };
                let own = self.mul[a][b].clone();
                let mut value = None;
                for cand in [own, swapped, implied].into_iter().flatten() {
                    match &value {
                        None => value = Some(cand),
                        Some((v, l)) => {
                            if *v != cand.0 {
                                let line = (*l).max(cand.1).max(1);
                                return Err(bad(
                                    line,
                                    format!(
                                        "mul: {}*{} conflicts with graded commutativity or the unit",
                                        self.names[a], self.names[b]
                                    ),
                                ));
                            }
                        }
                    }
                }
                if let Some((v, l)) = value {
                    let target = self.degrees[a] + self.degrees[b];
                    if let Some(c) = (0..n).find(|&c| !v[c].is_zero() && self.degrees[c] != target)
                    {
                        return Err(bad(
                            l.max(1),
                            format!(
                                "mul: {}*{} has degree {target} but contains `{}` of degree {}",
                                self.names[a], self.names[b], self.names[c], self.degrees[c]
                            ),
                        ));
                    }
                    mul[a][b] = v;
                }
            }
        }
        let line_of = |a: usize, b: usize| {
            self.mul[a][b]
                .as_ref()
                .or(self.mul[b][a].as_ref())
                .map_or(last, |(_, l)| *l)
        };
        for a in 0..n {
            if self.degrees[a] % 2 == 1 && mul[a][a].iter().any(|c| !c.is_zero()) {
                return Err(bad(
                    line_of(a, a),
                    format!("odd class `{}` must square to zero", self.names[a]),
                ));
            }
        }
        let times = |x: &[GaussRat], b: usize| {
            let mut out = zero();
            for (a, xa) in x.iter().enumerate() {
                if xa.is_zero() {
                    continue;
                }
                for (c, v) in mul[a][b].iter().enumerate() {
                    out[c] += &(xa * v);
                }
            }
            out
        };
        let times_left = |a: usize, y: &[GaussRat]| {
            let mut out = zero();
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                for (c, v) in mul[a][b].iter().enumerate() {
                    out[c] += &(yb * v);
                }
            }
            out
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if times(&mul[a][b], c) != times_left(a, &mul[b][c]) {
                        return Err(bad(
                            line_of(a, b).max(line_of(b, c)),
                            format!(
                                "products are not associative on ({}*{})*{}",
                                self.names[a], self.names[b], self.names[c]
                            ),
                        ));
                    }
                }
            }
        }
        let mut integral = zero();
        for (i, v) in self.integral.iter().enumerate() {
            if let Some((v, l)) = v {
                if self.degrees[i] != TOP_DEGREE && !v.is_zero() {
                    return Err(bad(
                        *l,
                        format!(
                            "integral: `{}` has degree {}, not {TOP_DEGREE}",
                            self.names[i], self.degrees[i]
                        ),
                    ));
                }
                integral[i] = v.clone();
            }
        }
        let mut chern = [zero(), zero(), zero()];
        for k in 0..3 {
            let (v, l) = self.chern[k]
                .clone()
                .ok_or_else(|| bad(last, format!("chern: c{} is not assigned", k + 1)))?;
            let want = 2 * (k as u32 + 1);
            if let Some(c) = (0..n).find(|&c| !v[c].is_zero() && self.degrees[c] != want) {
                return Err(bad(
                    l,
                    format!(
                        "chern: c{} must have degree {want}, but contains `{}`",
                        k + 1,
                        self.names[c]
                    ),
                ));
            }
            chern[k] = v;
        }
        let gram: Vec<Vec<GaussRat>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        mul[a][b]
                            .iter()
                            .zip(&integral)
                            .fold(GaussRat::zero(), |acc, (x, y)| &acc + &(x * y))
                    })
                    .collect()
            })
            .collect();
        let gram_inv = invert(&gram).ok_or_else(|| bad(last, "the pairing ∫ a·b is degenerate"))?;
        Ok(CohomRing {
            id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
            names: self.names,
            degrees: self.degrees,
            unit,
            mul,
            integral,
            chern,
            dim_y: self.dim_y.unwrap_or(0),
            gram_inv,
        })
    }
}
