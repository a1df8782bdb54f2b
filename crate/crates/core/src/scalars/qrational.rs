//! Rational functions in `q` over [`GaussRat`] and their expansion under the
//! substitution `−q = e^{iu}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{GaussRat, ULaurent};
use crate::error::{Error, ParseError, Result};
use crate::textfmt;

/// Dense univariate polynomial, coefficients in increasing degree, no
/// trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<GaussRat>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| GaussRat::from_int(c)).collect())
    }

    pub fn constant(c: GaussRat) -> Self {
        QPoly::new(vec![c])
    }

    /// `q^k`.
    pub fn q_power(k: usize) -> Self {
        let mut v = vec![GaussRat::zero(); k + 1];
        v[k] = GaussRat::one();
        QPoly { coeffs: v }
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&GaussRat> {
        self.coeffs.last()
    }

    pub fn eval(&self, q: &GaussRat) -> GaussRat {
        self.coeffs
            .iter()
            .rev()
            .fold(GaussRat::zero(), |acc, c| &(&acc * q) + c)
    }

    pub fn scale(&self, c: &GaussRat) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d
            .leading()
            .and_then(GaussRat::inv)
            .expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let Some(n) = self.degree().filter(|&n| n >= dd) else {
            return (QPoly::zero(), self.clone());
        };
        let mut quot = vec![GaussRat::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &(&c * dj);
            }
            quot[k] = c;
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.divrem(&y).1;
            x = y;
            y = r;
        }
        x.monic()
    }

    pub fn monic(&self) -> QPoly {
        match self.leading().and_then(GaussRat::inv) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    /// Multiplicity of `q = −1` as a root.
    pub fn order_at_minus_one(&self) -> usize {
        let root = QPoly::from_ints(&[1, 1]);
        let mut p = self.clone();
        let mut n = 0;
        while !p.is_zero() && p.eval(&GaussRat::from_int(-1)).is_zero() {
            p = p.divrem(&root).0;
            n += 1;
        }
        n
    }

    /// Expansion of `p(−e^{iu})` through `u^order`:
    /// `Σ_k p_k (−1)^k Σ_n (ik)^n/n! · u^n`.
    pub fn expand_at_minus_one(&self, order: i64) -> ULaurent {
        let mut out = Vec::new();
        for n in 0..=order.max(-1) {
            let mut acc = GaussRat::zero();
            for (k, pk) in self.coeffs.iter().enumerate() {
                if pk.is_zero() {
                    continue;
                }
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let ik = GaussRat::complex(0, k as i64).pow(n);
                acc += &(&(pk * &ik) * &GaussRat::from_int(sign));
            }
            out.push((n, &acc * &inv_factorial(n)));
        }
        ULaurent::from_scalars(out, Some(order))
    }

    fn fmt_in(&self, out: &mut String) {
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let body = match k {
                0 => String::new(),
                _ => textfmt::power("q", k as i64),
            };
            textfmt::push_term(out, c, &body);
        }
        if out.is_empty() {
            out.push('0');
        }
    }
}

fn inv_factorial(n: i64) -> GaussRat {
    let mut f = GaussRat::one();
    for k in 2..=n {
        f = f.scale_int(k);
    }
    f.inv().expect("factorial is nonzero")
}

/// `e^{c·u}` through `u^order`.
pub fn exp_series(c: &GaussRat, order: i64) -> ULaurent {
    ULaurent::from_scalars(
        (0..=order.max(-1)).map(|n| (n, &c.pow(n) * &inv_factorial(n))),
        Some(order),
    )
}

impl Zero for QPoly {
    fn zero() -> Self {
        QPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for QPoly {
    fn one() -> Self {
        QPoly::constant(GaussRat::one())
    }
}

impl<'b> Add<&'b QPoly> for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &'b QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = GaussRat::zero();
        QPoly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl<'b> Sub<&'b QPoly> for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &'b QPoly) -> QPoly {
        self + &rhs.scale(&GaussRat::from_int(-1))
    }
}

impl<'b> Mul<&'b QPoly> for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &'b QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        QPoly::new(out)
    }
}

impl Add for QPoly {
    type Output = QPoly;
    fn add(self, rhs: QPoly) -> QPoly {
        &self + &rhs
    }
}

impl Mul for QPoly {
    type Output = QPoly;
    fn mul(self, rhs: QPoly) -> QPoly {
        &self * &rhs
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.fmt_in(&mut s);
        f.write_str(&s)
    }
}

/// A reduced fraction `num/den`: `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QRational {
    num: QPoly,
    den: QPoly,
}

impl QRational {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(QRational::zero());
        }
        let g = QPoly::gcd(&num, &den);
        let num = num.divrem(&g).0;
        let den = den.divrem(&g).0;
        let inv = den
            .leading()
            .and_then(GaussRat::inv)
            .expect("nonzero denominator");
        Ok(QRational {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn poly(p: QPoly) -> Self {
        QRational {
            num: p,
            den: QPoly::one(),
        }
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den == QPoly::one()
    }

    /// Order of the pole at `q = −1` (0 when regular there).
    pub fn pole_order_at_minus_one(&self) -> usize {
        self.den.order_at_minus_one()
    }

    pub fn inv(&self) -> Result<QRational> {
        QRational::new(self.den.clone(), self.num.clone())
    }

    /// Parses `(num)/(den)`, a bare polynomial, or a Laurent polynomial in
    /// `q` (negative powers are moved into the denominator).
    pub fn parse(text: &str) -> std::result::Result<QRational, ParseError> {
        let (num_text, den_text, den_col) = match split_fraction(text) {
            Some((n, d, at)) => (n, Some(d), at),
            None => (text, None, 0),
        };
        let num = laurent_poly(num_text, 0)?;
        let den = match den_text {
            Some(d) => laurent_poly(d, den_col)?,
            None => (QPoly::one(), 0),
        };
        // num = Nq^a, den = Dq^b
        let (mut n, a) = num;
        let (mut d, b) = den;
        let shift = a - b;
        if shift >= 0 {
            n = &n * &QPoly::q_power(shift as usize);
        } else {
            d = &d * &QPoly::q_power((-shift) as usize);
        }
        QRational::new(n, d).map_err(|_| ParseError::new(1, den_col.max(1), "zero denominator"))
    }
}

/// Splits `(A)/(B)` at a top-level `/` that follows a closing parenthesis.
fn split_fraction(text: &str) -> Option<(&str, &str, usize)> {
    let mut depth = 0i32;
    let mut prev = ' ';
    for (at, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 && prev == ')' => {
                return Some((&text[..at], &text[at + 1..], at + 2));
            }
            _ => {}
        }
        if !c.is_whitespace() {
            prev = c;
        }
    }
    None
}

/// A Laurent polynomial in `q` as `(poly, lowest exponent)`.
fn laurent_poly(text: &str, col_offset: usize) -> std::result::Result<(QPoly, i64), ParseError> {
    let shift_col = |mut e: ParseError| {
        if col_offset > 0 {
            e.column += col_offset - 1;
        }
        e
    };
    let sum = textfmt::parse_sum(text).map_err(shift_col)?;
    if sum.big_o.is_some() {
        return Err(shift_col(ParseError::new(
            1,
            1,
            "rational functions cannot carry O(...) terms",
        )));
    }
    let terms = sum
        .univariate("q")
        .map_err(|m| shift_col(ParseError::new(1, 1, m)))?;
    let low = terms.iter().map(|(e, _)| *e).min().unwrap_or(0).min(0);
    let high = terms.iter().map(|(e, _)| *e).max().unwrap_or(0);
    let mut coeffs = vec![GaussRat::zero(); (high - low + 1) as usize];
    for (e, c) in terms {
        coeffs[(e - low) as usize] += &c;
    }
    Ok((QPoly::new(coeffs), low))
}

impl Zero for QRational {
    fn zero() -> Self {
        QRational {
            num: QPoly::zero(),
            den: QPoly::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for QRational {
    fn one() -> Self {
        QRational::poly(QPoly::one())
    }
}

impl<'b> Add<&'b QRational> for &QRational {
    type Output = QRational;
    fn add(self, rhs: &'b QRational) -> QRational {
        QRational::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("product of nonzero denominators")
    }
}

impl<'b> Sub<&'b QRational> for &QRational {
    type Output = QRational;
    fn sub(self, rhs: &'b QRational) -> QRational {
        self + &(-rhs)
    }
}

impl<'b> Mul<&'b QRational> for &QRational {
    type Output = QRational;
    fn mul(self, rhs: &'b QRational) -> QRational {
        QRational::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("product of nonzero denominators")
    }
}

impl Neg for &QRational {
    type Output = QRational;
    fn neg(self) -> QRational {
        QRational {
            num: self.num.scale(&GaussRat::from_int(-1)),
            den: self.den.clone(),
        }
    }
}

impl Add for QRational {
    type Output = QRational;
    fn add(self, rhs: QRational) -> QRational {
        &self + &rhs
    }
}

impl Mul for QRational {
    type Output = QRational;
    fn mul(self, rhs: QRational) -> QRational {
        &self * &rhs
    }
}

/// Polynomials print bare; proper fractions as `(num)/(den)`.
impl fmt::Display for QRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Expands `(−q)^{−d/2} · f(q)` at `−q = e^{iu}` through `u^order`, reading
/// `(−q)^{1/2}` as `e^{iu/2}`.
///
/// Fails with [`Error::TruncationTooSmall`] when `order` lies below the
/// most negative exponent the expansion can have.
pub fn expand_change_of_variables(f: &QRational, half_power: i64, order: i64) -> Result<ULaurent> {
    let v = f.pole_order_at_minus_one() as i64;
    if order < -v {
        return Err(Error::TruncationTooSmall { order, lowest: -v });
    }
    if f.is_zero() {
        return Ok(ULaurent::zero());
    }
    let num = f.num.expand_at_minus_one(order + v);
    let den = f.den.expand_at_minus_one(order + 2 * v);
    let quotient = num.div(&den, order)?;
    let prefactor = exp_series(&GaussRat::ratio(-half_power, 2).scale_i(), order + v);
    Ok((&quotient * &prefactor).truncate(order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> QRational {
        QRational::parse(text).unwrap()
    }

    #[test]
    fn reduces_and_normalizes() {
        let f = q("(q^2 - 1)/(2*q + 2)");
        assert_eq!(
            f,
            QRational::poly(QPoly::new(vec![
                GaussRat::ratio(-1, 2),
                GaussRat::ratio(1, 2)
            ]))
        );
        assert_eq!(q("q^-1 + 1"), q("(q + 1)/(q)"));
        assert!(QRational::parse("(1)/(0)").is_err());
    }

    #[test]
    fn display_round_trip() {
        for text in [
            "(q + 1)/(q^2 - 1i*q + 3/2)",
            "-2*q^3 + (1+1i)",
            "0",
            "(1)/(q + 1)",
        ] {
            let f = q(text);
            assert_eq!(q(&f.to_string()), f, "{text}");
        }
    }

    #[test]
    fn minus_e_iu() {
        let s = expand_change_of_variables(&q("q"), 0, 2).unwrap();
        let expect = ULaurent::from_scalars(
            [
                (0, GaussRat::from_int(-1)),
                (1, GaussRat::complex(0, -1)),
                (2, GaussRat::ratio(1, 2)),
            ],
            Some(2),
        );
        assert_eq!(s, expect);
    }

    #[test]
    fn prefactor_only() {
        let s = expand_change_of_variables(&QRational::one(), 2, 1).unwrap();
        let expect = ULaurent::from_scalars(
            [(0, GaussRat::one()), (1, GaussRat::complex(0, -1))],
            Some(1),
        );
        assert_eq!(s, expect);
    }

    #[test]
    fn pole_bounds_truncation() {
        let f = q("(1)/(q^2 + 2*q + 1)");
        assert_eq!(f.pole_order_at_minus_one(), 2);
        assert!(expand_change_of_variables(&f, 0, -3).is_err());
        let s = expand_change_of_variables(&f, 0, -2).unwrap();
        assert_eq!(s.lowest(), Some(-2));
    }
}
