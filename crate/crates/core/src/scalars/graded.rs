//! Polynomials in the Chern variables `c1, c2, c3` over [`GaussRat`], graded
//! by `deg c_k = k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::GaussRat;

/// The monomial `c1^c1 · c2^c2 · c3^c3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChernMono {
    pub c1: u32,
    pub c2: u32,
    pub c3: u32,
}

impl ChernMono {
    pub const ONE: ChernMono = ChernMono {
        c1: 0,
        c2: 0,
        c3: 0,
    };

    pub fn new(c1: u32, c2: u32, c3: u32) -> Self {
        ChernMono { c1, c2, c3 }
    }

    pub fn c(k: u32) -> Self {
        match k {
            1 => ChernMono::new(1, 0, 0),
            2 => ChernMono::new(0, 1, 0),
            3 => ChernMono::new(0, 0, 1),
            _ => panic!("no Chern variable c{k}"),
        }
    }

    pub fn degree(&self) -> u32 {
        self.c1 + 2 * self.c2 + 3 * self.c3
    }

    pub fn is_one(&self) -> bool {
        *self == ChernMono::ONE
    }

    pub fn mul(&self, other: &ChernMono) -> ChernMono {
        ChernMono::new(self.c1 + other.c1, self.c2 + other.c2, self.c3 + other.c3)
    }

    pub fn exponent(&self, k: u32) -> u32 {
        match k {
            1 => self.c1,
            2 => self.c2,
            3 => self.c3,
            _ => 0,
        }
    }

    /// Every monomial of graded degree `d`, in increasing order.
    pub fn all_of_degree(d: u32) -> Vec<ChernMono> {
        let mut out = Vec::new();
        for c3 in 0..=d / 3 {
            for c2 in 0..=(d - 3 * c3) / 2 {
                let c1 = d - 3 * c3 - 2 * c2;
                out.push(ChernMono::new(c1, c2, c3));
            }
        }
        out.sort();
        out
    }

    /// `c1^a*c2^b*c3^c` with all three exponents; the K-matrix file form.
    pub fn full_form(&self) -> String {
        format!("c1^{}*c2^{}*c3^{}", self.c1, self.c2, self.c3)
    }
}

/// Short form: `1`, `c1`, `c1^2*c3`.
impl fmt::Display for ChernMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for k in 1..=3 {
            let e = self.exponent(k);
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "c{k}")?;
            } else {
                write!(f, "c{k}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Result of a homogeneity query on a nonzero-or-zero polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomogeneousDegree {
    /// The zero polynomial, homogeneous of every degree.
    Any,
    Exactly(u32),
}

impl HomogeneousDegree {
    pub fn admits(&self, d: u32) -> bool {
        match self {
            HomogeneousDegree::Any => true,
            HomogeneousDegree::Exactly(e) => *e == d,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedPoly {
    terms: BTreeMap<ChernMono, GaussRat>,
}

impl GradedPoly {
    pub fn constant(c: GaussRat) -> Self {
        GradedPoly::monomial(ChernMono::ONE, c)
    }

    pub fn monomial(m: ChernMono, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GradedPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ChernMono, &GaussRat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &ChernMono) -> GaussRat {
        self.terms.get(m).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn add_term(&mut self, m: ChernMono, c: &GaussRat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(GaussRat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// The constant value if this polynomial has no Chern variables.
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => self.terms.get(&ChernMono::ONE).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &GaussRat) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero();
        }
        GradedPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn homogeneous_degree(&self) -> Option<HomogeneousDegree> {
        let mut degrees = self.terms.keys().map(ChernMono::degree);
        match degrees.next() {
            None => Some(HomogeneousDegree::Any),
            Some(d) => degrees
                .all(|e| e == d)
                .then_some(HomogeneousDegree::Exactly(d)),
        }
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.homogeneous_degree().is_some_and(|h| h.admits(d))
    }
}

/// Returns the graded degree of `p` if it is homogeneous.
pub fn poly_homogeneous_degree(p: &GradedPoly) -> Option<HomogeneousDegree> {
    p.homogeneous_degree()
}

impl Zero for GradedPoly {
    fn zero() -> Self {
        GradedPoly::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for GradedPoly {
    fn one() -> Self {
        GradedPoly::constant(GaussRat::one())
    }
}

impl<'b> Add<&'b GradedPoly> for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &'b GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl<'b> Sub<&'b GradedPoly> for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &'b GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, &-c);
        }
        out
    }
}

impl<'b> Mul<&'b GradedPoly> for &GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &'b GradedPoly) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl Add for GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: GradedPoly) -> GradedPoly {
        &self + &rhs
    }
}

impl Sub for GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: GradedPoly) -> GradedPoly {
        &self - &rhs
    }
}

impl Mul for GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: GradedPoly) -> GradedPoly {
        &self * &rhs
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        GradedPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        -&self
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &GaussRat) -> fmt::Result {
    if c.is_compound() {
        write!(f, "({c})")
    } else {
        write!(f, "{c}")
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write_coeff(f, c)?;
            if !m.is_one() {
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}
