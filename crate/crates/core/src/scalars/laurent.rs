//! Truncated Laurent series in `u` with [`GradedPoly`] coefficients.
//!
//! A series carries an optional truncation order `N`: coefficients of `u^k`
//! for `k ≤ N` are known, coefficients above `N` are unknown (not zero).
//! `None` marks an exact series, i.e. a Laurent polynomial. Arithmetic
//! propagates the weakest known order of its operands.

use std::cmp::min;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{ChernMono, GaussRat, GradedPoly};
use crate::error::{Error, ParseError, Result};
use crate::textfmt;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ULaurent {
    terms: BTreeMap<i64, GradedPoly>,
    order: Option<i64>,
}

fn min_order(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(min(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl ULaurent {
    pub fn monomial(k: i64, c: GradedPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        ULaurent { terms, order: None }
    }

    pub fn scalar_monomial(k: i64, c: GaussRat) -> Self {
        ULaurent::monomial(k, GradedPoly::constant(c))
    }

    pub fn scalar(c: GaussRat) -> Self {
        ULaurent::scalar_monomial(0, c)
    }

    /// `(i·u)^n = i^n · u^n`, exact.
    pub fn iu_power(n: i64) -> Self {
        ULaurent::scalar_monomial(n, GaussRat::i_pow(n))
    }

    /// `(−i·u)^n`, exact.
    pub fn minus_iu_power(n: i64) -> Self {
        ULaurent::scalar_monomial(n, GaussRat::i_pow(-n))
    }

    /// `O(u^{order+1})`: zero through `u^order`, unknown beyond.
    pub fn truncated_zero(order: i64) -> Self {
        ULaurent {
            terms: BTreeMap::new(),
            order: Some(order),
        }
    }

    /// Builds a series from explicit coefficients, dropping zero ones and
    /// anything above `order`.
    pub fn from_terms<I>(terms: I, order: Option<i64>) -> Self
    where
        I: IntoIterator<Item = (i64, GradedPoly)>,
    {
        let mut out = ULaurent {
            terms: BTreeMap::new(),
            order,
        };
        for (k, c) in terms {
            out.add_coeff(k, &c);
        }
        out
    }

    pub fn from_scalars<I>(terms: I, order: Option<i64>) -> Self
    where
        I: IntoIterator<Item = (i64, GaussRat)>,
    {
        ULaurent::from_terms(
            terms.into_iter().map(|(k, c)| (k, GradedPoly::constant(c))),
            order,
        )
    }

    /// Adds `c·u^k`; ignored when `k` lies above the truncation order.
    pub fn add_coeff(&mut self, k: i64, c: &GradedPoly) {
        if c.is_zero() || self.order.is_some_and(|o| k > o) {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(slot) => {
                *slot = &*slot + c;
                if slot.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c.clone());
            }
        }
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn lowest(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn highest(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `Some(c)` for known coefficients (zero included), `None` above the
    /// truncation order.
    pub fn coeff(&self, k: i64) -> Option<GradedPoly> {
        if self.order.is_some_and(|o| k > o) {
            return None;
        }
        Some(self.terms.get(&k).cloned().unwrap_or_else(GradedPoly::zero))
    }

    /// Scalar coefficient; `None` if unknown or not a constant polynomial.
    pub fn scalar_coeff(&self, k: i64) -> Option<GaussRat> {
        self.coeff(k)?.as_constant()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &GradedPoly)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_scalar(&self) -> bool {
        self.terms.values().all(|c| c.as_constant().is_some())
    }

    /// Truncates to order `min(self.order, n)`.
    pub fn truncate(&self, n: i64) -> ULaurent {
        let order = min_order(self.order, Some(n));
        ULaurent {
            terms: self
                .terms
                .range(..=order.unwrap_or(i64::MAX))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            order,
        }
    }

    /// Multiplies by `c·u^shift` exactly.
    pub fn shift_scale(&self, shift: i64, c: &GaussRat) -> ULaurent {
        if c.is_zero() {
            return ULaurent::zero();
        }
        ULaurent {
            terms: self
                .terms
                .iter()
                .map(|(k, p)| (k + shift, p.scale(c)))
                .collect(),
            order: self.order.map(|o| o + shift),
        }
    }

    pub fn scale(&self, c: &GaussRat) -> ULaurent {
        self.shift_scale(0, c)
    }

    /// Valuation used for precision bookkeeping: a truncated zero is known
    /// to vanish through its order. `None` for the exact zero.
    fn precision_valuation(&self) -> Option<i64> {
        self.lowest().or(self.order.map(|o| o + 1))
    }

    /// First exponent at which the two series differ within their common
    /// known range; `None` if they agree there.
    pub fn first_discrepancy(&self, other: &ULaurent) -> Option<i64> {
        let limit = min_order(self.order, other.order).unwrap_or(i64::MAX);
        let keys: std::collections::BTreeSet<i64> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .filter(|k| *k <= limit)
            .collect();
        keys.into_iter()
            .find(|k| self.terms.get(k) != other.terms.get(k))
    }

    pub fn agrees_with(&self, other: &ULaurent) -> bool {
        self.first_discrepancy(other).is_none()
    }

    /// Splits a polynomial-coefficient series into scalar series, one per
    /// Chern monomial. Each part keeps the truncation order.
    pub fn split_by_monomial(&self) -> BTreeMap<ChernMono, ULaurent> {
        let mut out: BTreeMap<ChernMono, ULaurent> = BTreeMap::new();
        for (k, p) in &self.terms {
            for (m, c) in p.terms() {
                out.entry(*m)
                    .or_insert_with(|| ULaurent {
                        terms: BTreeMap::new(),
                        order: self.order,
                    })
                    .add_coeff(*k, &GradedPoly::constant(c.clone()));
            }
        }
        out
    }

    /// `self / divisor`, computed through `u^max_order` at most. The divisor
    /// must have a nonzero constant lowest coefficient.
    pub fn div(&self, divisor: &ULaurent, max_order: i64) -> Result<ULaurent> {
        let vb = divisor.lowest().ok_or(Error::NonInvertible)?;
        let lead = divisor.terms[&vb]
            .as_constant()
            .and_then(|c| c.inv())
            .ok_or(Error::NonInvertible)?;
        let Some(va) = self.precision_valuation() else {
            return Ok(ULaurent::zero());
        };
        let mut target = max_order;
        if let Some(oa) = self.order {
            target = min(target, oa - vb);
        }
        if let Some(ob) = divisor.order {
            target = min(target, va - vb + (ob - vb));
        }
        let start = va - vb;
        let mut quotient: BTreeMap<i64, GradedPoly> = BTreeMap::new();
        let mut n = start;
        while n <= target {
            let mut acc = self.terms.get(&(n + vb)).cloned().unwrap_or_default();
            for (&k, bk) in divisor.terms.range(vb + 1..) {
                let j = k - vb;
                if let Some(q) = quotient.get(&(n - j)) {
                    acc = &acc - &(bk * q);
                }
            }
            let q = acc.scale(&lead);
            if !q.is_zero() {
                quotient.insert(n, q);
            }
            n += 1;
        }
        Ok(ULaurent {
            terms: quotient,
            order: Some(target),
        })
    }

    pub fn pow(&self, e: u32) -> ULaurent {
        let mut acc = ULaurent::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Parses `c*u^k` sums with an optional `O(u^M)` tail (order `M − 1`).
    /// Coefficients may involve `c1, c2, c3`.
    pub fn parse(text: &str) -> std::result::Result<ULaurent, ParseError> {
        let sum = textfmt::parse_sum(text)?;
        let mut out = ULaurent::zero();
        if let Some((atom, e)) = &sum.big_o {
            if atom != "u" {
                return Err(ParseError::new(1, 0, format!("O({atom}...) must be in u")));
            }
            out.order = Some(e - 1);
        }
        for (powers, c) in sum.terms {
            let mut k = 0;
            let mut mono = ChernMono::ONE;
            for (atom, e) in powers {
                match atom.as_str() {
                    "u" => k = e,
                    "c1" | "c2" | "c3" if e >= 0 => {
                        let idx = atom.as_bytes()[1] - b'0';
                        mono = mono.mul(&match idx {
                            1 => ChernMono::new(e as u32, 0, 0),
                            2 => ChernMono::new(0, e as u32, 0),
                            _ => ChernMono::new(0, 0, e as u32),
                        });
                    }
                    _ => {
                        return Err(ParseError::new(
                            1,
                            0,
                            format!("unexpected symbol `{atom}^{e}` in a series in u"),
                        ))
                    }
                }
            }
            if out.order.is_some_and(|o| k > o) {
                return Err(ParseError::new(
                    1,
                    0,
                    format!("term u^{k} lies inside the O(...) tail"),
                ));
            }
            out.add_coeff(k, &GradedPoly::monomial(mono, c));
        }
        Ok(out)
    }
}

impl Zero for ULaurent {
    fn zero() -> Self {
        ULaurent::default()
    }

    /// True when no nonzero coefficient is known (truncated zeros included).
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ULaurent {
    fn one() -> Self {
        ULaurent::scalar(GaussRat::one())
    }
}

impl<'b> Add<&'b ULaurent> for &ULaurent {
    type Output = ULaurent;
    fn add(self, rhs: &'b ULaurent) -> ULaurent {
        let order = min_order(self.order, rhs.order);
        let mut out = self.truncate(order.unwrap_or(i64::MAX));
        out.order = order;
        for (k, c) in &rhs.terms {
            out.add_coeff(*k, c);
        }
        out
    }
}

impl<'b> Sub<&'b ULaurent> for &ULaurent {
    type Output = ULaurent;
    fn sub(self, rhs: &'b ULaurent) -> ULaurent {
        self + &(-rhs)
    }
}

impl<'b> Mul<&'b ULaurent> for &ULaurent {
    type Output = ULaurent;
    fn mul(self, rhs: &'b ULaurent) -> ULaurent {
        let (Some(va), Some(vb)) = (self.precision_valuation(), rhs.precision_valuation()) else {
            // an exact zero factor annihilates regardless of precision
            return ULaurent::zero();
        };
        let order = match (self.order, rhs.order) {
            (None, None) => None,
            (Some(oa), None) => Some(oa + vb),
            (None, Some(ob)) => Some(ob + va),
            (Some(oa), Some(ob)) => Some(min(oa + vb, ob + va)),
        };
        let mut out = ULaurent {
            terms: BTreeMap::new(),
            order,
        };
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                out.add_coeff(k1 + k2, &(c1 * c2));
            }
        }
        out
    }
}

impl Add for ULaurent {
    type Output = ULaurent;
    fn add(self, rhs: ULaurent) -> ULaurent {
        &self + &rhs
    }
}

impl Sub for ULaurent {
    type Output = ULaurent;
    fn sub(self, rhs: ULaurent) -> ULaurent {
        &self - &rhs
    }
}

impl Mul for ULaurent {
    type Output = ULaurent;
    fn mul(self, rhs: ULaurent) -> ULaurent {
        &self * &rhs
    }
}

impl Neg for &ULaurent {
    type Output = ULaurent;
    fn neg(self) -> ULaurent {
        ULaurent {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            order: self.order,
        }
    }
}

impl Neg for ULaurent {
    type Output = ULaurent;
    fn neg(self) -> ULaurent {
        -&self
    }
}

/// `-1 - 1i*u + 1/2*u^2 + O(u^3)`; polynomial coefficients are
/// parenthesized, e.g. `(c1 + 2*c2)*u^-1`.
impl fmt::Display for ULaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, p) in &self.terms {
            let upow = match k {
                0 => String::new(),
                _ => textfmt::power("u", *k),
            };
            match p.as_constant() {
                Some(c) => textfmt::push_term(&mut out, &c, &upow),
                None => {
                    let body = if upow.is_empty() {
                        format!("({p})")
                    } else {
                        format!("({p})*{upow}")
                    };
                    textfmt::push_term(&mut out, &GaussRat::one(), &body);
                }
            }
        }
        if let Some(o) = self.order {
            let tail = format!("O({})", textfmt::power("u", o + 1));
            if out.is_empty() {
                out = tail;
            } else {
                out.push_str(" + ");
                out.push_str(&tail);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(terms: &[(i64, i64)], order: Option<i64>) -> ULaurent {
        ULaurent::from_scalars(
            terms.iter().map(|&(k, c)| (k, GaussRat::from_int(c))),
            order,
        )
    }

    #[test]
    fn product_tracks_truncation() {
        // (u^-1 + 1 + O(u^2)) * (u + O(u^3)) is known through u^1
        let a = s(&[(-1, 1), (0, 1)], Some(1));
        let b = s(&[(1, 1)], Some(2));
        let p = &a * &b;
        assert_eq!(p.order(), Some(1));
        assert_eq!(p, s(&[(0, 1), (1, 1)], Some(1)));
    }

    #[test]
    fn exact_zero_annihilates() {
        let a = ULaurent::truncated_zero(3);
        assert_eq!(&a * &ULaurent::zero(), ULaurent::zero());
        // truncated zero times u^-2 is known through u^1
        let p = &a * &s(&[(-2, 1)], None);
        assert_eq!(p.order(), Some(1));
        assert!(p.is_zero());
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = s(&[(-1, 2), (0, 3), (2, -1)], None);
        let b = s(&[(1, 1), (2, 5)], None);
        let q = (&a * &b).div(&b, 6).unwrap();
        assert!(q.agrees_with(&a));
        assert_eq!(q.order(), Some(6));
        assert!(a.div(&ULaurent::zero(), 3).is_err());
    }

    #[test]
    fn discrepancy_is_located() {
        let a = s(&[(0, 1), (3, 2)], Some(5));
        let b = s(&[(0, 1), (3, 1)], None);
        assert_eq!(a.first_discrepancy(&b), Some(3));
        assert_eq!(a.first_discrepancy(&a.truncate(2)), None);
    }

    #[test]
    fn display_parse_round_trip() {
        let c1 = GradedPoly::monomial(ChernMono::c(1), GaussRat::complex(1, 2));
        let mut x =
            ULaurent::from_scalars([(-2, GaussRat::ratio(-1, 3)), (1, GaussRat::i())], Some(4));
        x.add_coeff(0, &c1);
        let text = x.to_string();
        assert_eq!(ULaurent::parse(&text).unwrap(), x);
        assert_eq!(ULaurent::truncated_zero(2).to_string(), "O(u^3)");
        assert_eq!(
            ULaurent::parse("O(u^3)").unwrap(),
            ULaurent::truncated_zero(2)
        );
        assert_eq!(ULaurent::parse("0").unwrap(), ULaurent::zero());
    }
}
