//! Numbers the classifier compares: `f64` with a normalized tolerance, or
//! exact rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance for floating-point comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync {
    fn from_int(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` when `o` is zero.
    fn div(&self, o: &Self) -> Option<Self>;
    fn compare(&self, o: &Self) -> Ordering;
    fn to_f64(&self) -> f64;

    fn lt(&self, o: &Self) -> bool {
        self.compare(o) == Ordering::Less
    }
    fn le(&self, o: &Self) -> bool {
        self.compare(o) != Ordering::Greater
    }
    fn gt(&self, o: &Self) -> bool {
        self.compare(o) == Ordering::Greater
    }
    fn ge(&self, o: &Self) -> bool {
        self.compare(o) != Ordering::Less
    }
    fn equals(&self, o: &Self) -> bool {
        self.compare(o) == Ordering::Equal
    }
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (*o != 0.0).then(|| self / o)
    }
    fn compare(&self, o: &Self) -> Ordering {
        let scale = 1f64.max(self.abs()).max(o.abs());
        let d = self - o;
        if d.abs() <= FLOAT_TOLERANCE * scale {
            Ordering::Equal
        } else if d < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// An exact rational; serialized as a string such as `"5/2"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn new(num: i64, den: i64) -> Self {
        Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

impl Scalar for Exact {
    fn from_int(n: i64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(n)))
    }
    fn add(&self, o: &Self) -> Self {
        Exact(&self.0 + &o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        Exact(&self.0 - &o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Exact(&self.0 * &o.0)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (!o.0.is_zero()).then(|| Exact(&self.0 / &o.0))
    }
    fn compare(&self, o: &Self) -> Ordering {
        self.0.cmp(&o.0)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("0{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut v = BigRational::from_integer(all);
    if shift >= 0 {
        v *= num_traits::pow(ten, shift as usize);
    } else {
        v /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if neg { -v } else { v })
}

impl FromStr for Exact {
    type Err = Error;

    /// Accepts integers, decimals (with optional exponent) and fractions `a/b`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { pos: 0, msg: format!("not an exact number: {s:?}") };
        let v = match s.split_once('/') {
            Some((a, b)) => {
                let (a, b) = (parse_decimal(a).ok_or_else(bad)?, parse_decimal(b).ok_or_else(bad)?);
                if b.is_zero() {
                    return Err(bad());
                }
                a / b
            }
            None => parse_decimal(s).ok_or_else(bad)?,
        };
        Ok(Exact(v))
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Exact::from_int(n)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Exact {
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}
