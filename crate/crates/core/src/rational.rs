//! Exact arbitrary-precision rationals: the only number type used by the
//! solver. Values are always kept in lowest terms with a positive
//! denominator, and every comparison is exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number backed by arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `num / den` reduced to lowest terms. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(value: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Largest integer `k` with `k <= self`.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Parses `"p"` or `"p/q"`. Input need not be in lowest terms.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        let bad = |detail: String| Error::Schema { detail };
        match text.split_once('/') {
            None => {
                let num = BigInt::from_str(text)
                    .map_err(|_| bad(format!("invalid rational literal {text:?}")))?;
                Ok(Rational(BigRational::from_integer(num)))
            }
            Some((p, q)) => {
                let num = BigInt::from_str(p.trim())
                    .map_err(|_| bad(format!("invalid numerator in {text:?}")))?;
                let den = BigInt::from_str(q.trim())
                    .map_err(|_| bad(format!("invalid denominator in {text:?}")))?;
                if den.is_zero() {
                    return Err(bad(format!("zero denominator in {text:?}")));
                }
                Ok(Rational(BigRational::new(num, den)))
            }
        }
    }

    /// Decimal rendering with at most `sig_digits` significant digits,
    /// rounded half away from zero. For human-readable output only; exact
    /// values travel as `p/q` strings.
    pub fn to_decimal_string(&self, sig_digits: usize) -> String {
        let sig = sig_digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let negative = self.is_negative();
        let num = self.0.numer().abs();
        let den = self.0.denom().clone();
        let ten = BigInt::from(10);

        let int_part = &num / &den;
        let mut rem = &num % &den;
        let int_digits: Vec<u8> = if int_part.is_zero() {
            vec![]
        } else {
            int_part.to_string().bytes().map(|b| b - b'0').collect()
        };

        let mut frac_digits: Vec<u8> = Vec::new();
        let mut significant = int_digits.len();
        let mut seen_nonzero = !int_digits.is_empty();
        while significant < sig && !rem.is_zero() {
            rem *= &ten;
            let d = u8::try_from(&rem / &den).expect("single decimal digit");
            rem = &rem % &den;
            frac_digits.push(d);
            if d != 0 {
                seen_nonzero = true;
            }
            if seen_nonzero {
                significant += 1;
            }
        }

        // Round half away from zero on the first dropped digit.
        if !rem.is_zero() {
            let next = u8::try_from(&(&rem * &ten) / &den).expect("single decimal digit");
            if next >= 5 {
                let mut digits: Vec<u8> = int_digits
                    .iter()
                    .chain(frac_digits.iter())
                    .copied()
                    .collect();
                let int_len = int_digits.len();
                let mut carry = true;
                for d in digits.iter_mut().rev() {
                    if carry {
                        if *d == 9 {
                            *d = 0;
                        } else {
                            *d += 1;
                            carry = false;
                        }
                    }
                }
                let mut int_digits2 = digits[..int_len].to_vec();
                let frac_digits2 = digits[int_len..].to_vec();
                if carry {
                    int_digits2.insert(0, 1);
                }
                return assemble_decimal(negative, &int_digits2, &frac_digits2);
            }
        }
        assemble_decimal(negative, &int_digits, &frac_digits)
    }
}

fn assemble_decimal(negative: bool, int_digits: &[u8], frac_digits: &[u8]) -> String {
    let mut frac = frac_digits.to_vec();
    while frac.last() == Some(&0) {
        frac.pop();
    }
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if int_digits.is_empty() {
        out.push('0');
    } else {
        for d in int_digits {
            out.push((b'0' + d) as char);
        }
    }
    if !frac.is_empty() {
        out.push('.');
        for d in &frac {
            out.push((b'0' + d) as char);
        }
    }
    if out == "-0" {
        return "0".to_string();
    }
    out
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse(s)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_int(value)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        (&self).div(&rhs)
    }
}

impl Div<&Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        (&self).div(rhs)
    }
}

impl Div<Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        self.div(&rhs)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Ok(small) = i64::try_from(self.0.numer().clone()) {
                return serializer.serialize_i64(small);
            }
        }
        serializer.serialize_str(&self.to_string())
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "an integer or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        Rational::parse(v).map_err(|e| E::custom(e.to_string()))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Compares `a/b` and `c/d` by integer cross-multiplication; test oracle for
/// the derived `Ord`.
pub fn cross_compare(a: &Rational, b: &Rational) -> Ordering {
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}
