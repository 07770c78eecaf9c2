//! Exact scalars over the rationals or the Gaussian rationals ℚ(i).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

fn is_int(r: &BigRational) -> bool {
    r.denom().is_one()
}

// Integer fast paths skip the gcd normalization of `BigRational`.
fn radd(a: &BigRational, b: &BigRational) -> BigRational {
    if is_int(a) && is_int(b) {
        BigRational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

fn rsub(a: &BigRational, b: &BigRational) -> BigRational {
    if is_int(a) && is_int(b) {
        BigRational::from_integer(a.numer() - b.numer())
    } else {
        a - b
    }
}

fn rmul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() || b.is_zero() {
        BigRational::zero()
    } else if is_int(a) && is_int(b) {
        BigRational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

fn rdiv(a: &BigRational, b: &BigRational) -> BigRational {
    if is_int(a) && is_int(b) {
        let (q, r) = num_integer::Integer::div_rem(a.numer(), b.numer());
        if r.is_zero() {
            return BigRational::from_integer(q);
        }
    }
    a / b
}

/// Ground field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Rational,
    Gaussian,
}

/// An element of ℚ(i). The imaginary part is identically zero for rational
/// scalars. Both parts are kept in lowest terms by `BigRational`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|² as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Self::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(Scalar { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.im.is_zero() && other.im.is_zero() {
            return Some(Self::real(rdiv(&self.re, &other.re)));
        }
        other.inv().map(|inv| self * &inv)
    }

    pub fn to_f64(&self) -> f64 {
        self.re.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Sign used for canonical normalization: the sign of the real part, or of
    /// the imaginary part for purely imaginary values.
    pub fn is_negative_like(&self) -> bool {
        if !self.re.is_zero() {
            self.re.is_negative()
        } else {
            self.im.is_negative()
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact rational from an `f64` decimal string such as "-0.25" or "3".
    pub fn parse_decimal(text: &str) -> Option<BigRational> {
        let t = text.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (mantissa, exp) = match body.find(['e', 'E']) {
            Some(k) => (&body[..k], body[k + 1..].parse::<i32>().ok()?),
            None => (body, 0),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(k) => (&mantissa[..k], &mantissa[k + 1..]),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let scale = exp - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let mut r = BigRational::from_integer(num);
        if scale >= 0 {
            r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
        } else {
            r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
        }
        Some(if neg { -r } else { r })
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Grammar-compatible rendering: `3/2`, `-i`, `3/2*i`, `(1/2 - 3*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let imag = |v: &BigRational| -> String {
            if v.abs().is_one() {
                "i".to_string()
            } else {
                format!("{}*i", fmt_rational(&v.abs()))
            }
        };
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            return write!(f, "{sign}{}", imag(&self.im));
        }
        let op = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "({} {op} {})", fmt_rational(&self.re), imag(&self.im))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: radd(&self.re, &rhs.re), im: radd(&self.im, &rhs.im) }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { re: rsub(&self.re, &rhs.re), im: rsub(&self.im, &rhs.im) }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(rmul(&self.re, &rhs.re));
        }
        Scalar {
            re: rsub(&rmul(&self.re, &rhs.re), &rmul(&self.im, &rhs.im)),
            im: radd(&rmul(&self.re, &rhs.im), &rmul(&self.im, &rhs.re)),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re = radd(&self.re, &rhs.re);
        if !rhs.im.is_zero() {
            self.im = radd(&self.im, &rhs.im);
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re = rsub(&self.re, &rhs.re);
        if !rhs.im.is_zero() {
            self.im = rsub(&self.im, &rhs.im);
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::real(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_ratio(3, 2).to_string(), "3/2");
        assert_eq!(Scalar::from_ratio(-4, 2).to_string(), "-2");
        let z = Scalar::new(BigRational::zero(), BigRational::new(3.into(), 2.into()));
        assert_eq!(z.to_string(), "3/2*i");
        assert_eq!((-Scalar::i()).to_string(), "-i");
        let w = Scalar::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer((-3).into()));
        assert_eq!(w.to_string(), "(1/2 - 3*i)");
    }

    #[test]
    fn gaussian_inverse() {
        let z = Scalar::new(BigRational::from_integer(1.into()), BigRational::from_integer(2.into()));
        let inv = z.inv().unwrap();
        assert!((&z * &inv).is_one());
        assert!(Scalar::zero().inv().is_none());
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(Scalar::parse_decimal("-0.25"), Some(BigRational::new((-1).into(), 4.into())));
        assert_eq!(Scalar::parse_decimal("1e-1"), Some(BigRational::new(1.into(), 10.into())));
        assert_eq!(Scalar::parse_decimal("2"), Some(BigRational::from_integer(2.into())));
        assert_eq!(Scalar::parse_decimal("abc"), None);
    }
}
