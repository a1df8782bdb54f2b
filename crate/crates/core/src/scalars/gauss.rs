//! Exact Gaussian rationals `re + im·i` with `i² = −1`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// `num/den`, real. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    pub fn complex(re: i64, im: i64) -> Self {
        GaussRat::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn i() -> Self {
        GaussRat::complex(0, 1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRat::new(&self.re / &n, -&self.im / &n))
    }

    /// Integer power; negative exponents invert. Panics for `0^k`, `k < 0`.
    pub fn pow(&self, exp: i64) -> Self {
        let base = if exp < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = GaussRat::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        acc
    }

    /// `i^k` without any multiplication.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => GaussRat::one(),
            1 => GaussRat::i(),
            2 => GaussRat::from_int(-1),
            _ => GaussRat::complex(0, -1),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        let n = BigRational::from_integer(n.into());
        GaussRat::new(&self.re * &n, &self.im * &n)
    }

    /// `i·self`.
    pub fn scale_i(&self) -> Self {
        GaussRat::new(-&self.im, self.re.clone())
    }

    /// True when the printed form needs parentheses to be used as a factor.
    pub fn is_compound(&self) -> bool {
        !self.re.is_zero() && !self.im.is_zero()
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::new(BigRational::one(), BigRational::zero())
    }
}

impl Default for GaussRat {
    fn default() -> Self {
        GaussRat::zero()
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        GaussRat::from_int(n)
    }
}

impl From<BigRational> for GaussRat {
    fn from(r: BigRational) -> Self {
        GaussRat::new(r, BigRational::zero())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: GaussRat) -> GaussRat {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: &'a GaussRat) -> GaussRat {
                (&self).$method(rhs)
            }
        }
    };
}

impl<'b> Add<&'b GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &'b GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'b> Sub<&'b GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &'b GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'b> Mul<&'b GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &'b GaussRat) -> GaussRat {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRat::new(&self.re * &rhs.re, BigRational::zero());
        }
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'b> Div<&'b GaussRat> for &GaussRat {
    type Output = GaussRat;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'b GaussRat) -> GaussRat {
        self * &rhs.inv().expect("division by zero")
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-&self.re, -&self.im)
    }
}

impl<'a> AddAssign<&'a GaussRat> for GaussRat {
    fn add_assign(&mut self, rhs: &'a GaussRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign for GaussRat {
    fn add_assign(&mut self, rhs: GaussRat) {
        *self += &rhs;
    }
}

impl<'a> SubAssign<&'a GaussRat> for GaussRat {
    fn sub_assign(&mut self, rhs: &'a GaussRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl<'a> MulAssign<&'a GaussRat> for GaussRat {
    fn mul_assign(&mut self, rhs: &'a GaussRat) {
        *self = &*self * rhs;
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Prints `re`, `imi`, or `re+imi` / `re-imi`; e.g. `-3/2`, `1/2i`, `1-2i`.
/// The imaginary part is always written with an explicit magnitude, so `i`
/// prints as `1i`.
impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_ratio(&self.re)),
            (true, false) => write!(f, "{}i", fmt_ratio(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "{}{}{}i",
                    fmt_ratio(&self.re),
                    sign,
                    fmt_ratio(&self.im.abs())
                )
            }
        }
    }
}

fn parse_ratio(s: &str) -> Option<BigRational> {
    let (sign, body) = match s.as_bytes().first()? {
        b'+' => (1, &s[1..]),
        b'-' => (-1, &s[1..]),
        _ => (1, s),
    };
    if body.is_empty() {
        return Some(BigRational::from_integer(BigInt::from(sign)));
    }
    let valid = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let r = match body.split_once('/') {
        Some((n, d)) => {
            if !valid(n) || !valid(d) {
                return None;
            }
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            BigRational::new(n.parse().ok()?, d)
        }
        None => {
            if !valid(body) {
                return None;
            }
            BigRational::from_integer(body.parse().ok()?)
        }
    };
    Some(if sign < 0 { -r } else { r })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseGaussRatError(pub String);

impl fmt::Display for ParseGaussRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid Gaussian rational `{}`", self.0)
    }
}

impl std::error::Error for ParseGaussRatError {}

/// Accepts `3`, `-3/4`, `i`, `-i`, `2i`, `3/4i`, `1+2i`, `-1/2-i`, optionally
/// wrapped in one pair of parentheses.
impl FromStr for GaussRat {
    type Err = ParseGaussRatError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || ParseGaussRatError(text.to_string());
        let mut s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.starts_with('(') && s.ends_with(')') {
            s = s[1..s.len() - 1].to_string();
        }
        if s.is_empty() {
            return Err(err());
        }
        if let Some(body) = s.strip_suffix('i') {
            // split at the last sign that is not the leading one
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(_, c)| c == '+' || c == '-')
                .map(|(i, _)| i)
                .last();
            let (re, im) = match split {
                Some(at) => (parse_ratio(&body[..at]).ok_or_else(err)?, &body[at..]),
                None => (BigRational::zero(), body),
            };
            let im = if im.is_empty() { "1" } else { im };
            let im = parse_ratio(im).ok_or_else(err)?;
            Ok(GaussRat::new(re, im))
        } else {
            Ok(GaussRat::from(parse_ratio(&s).ok_or_else(err)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_inverse() {
        let z = GaussRat::complex(3, -4);
        assert_eq!(&z * &z.inv().unwrap(), GaussRat::one());
        assert!(GaussRat::zero().inv().is_none());
    }

    #[test]
    fn i_squared() {
        assert_eq!(GaussRat::i().pow(2), GaussRat::from_int(-1));
        for k in -6..6 {
            assert_eq!(GaussRat::i_pow(k), GaussRat::i().pow(k));
        }
    }

    #[test]
    fn display_and_parse() {
        let cases = [
            ("3", GaussRat::from_int(3)),
            ("-3/4", GaussRat::ratio(-3, 4)),
            ("1i", GaussRat::i()),
            (
                "-1/2+3i",
                GaussRat::new(
                    BigRational::new((-1).into(), 2.into()),
                    BigRational::from_integer(3.into()),
                ),
            ),
            ("2-1i", GaussRat::complex(2, -1)),
        ];
        for (text, value) in cases {
            assert_eq!(value.to_string(), text);
            assert_eq!(text.parse::<GaussRat>().unwrap(), value);
        }
        assert_eq!("i".parse::<GaussRat>().unwrap(), GaussRat::i());
        assert_eq!("-i".parse::<GaussRat>().unwrap(), GaussRat::complex(0, -1));
        assert_eq!(
            "(1+i)".parse::<GaussRat>().unwrap(),
            GaussRat::complex(1, 1)
        );
        assert!("1/0".parse::<GaussRat>().is_err());
        assert!("x".parse::<GaussRat>().is_err());
        assert!("".parse::<GaussRat>().is_err());
    }
}
