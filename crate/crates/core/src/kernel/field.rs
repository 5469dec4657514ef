//! Coefficient fields.
//!
//! Every algebraic routine in the kernel is generic over [`Field`]. Two
//! instantiations are provided: [`ExactComplex`] (Gaussian rationals with
//! arbitrary precision) for zero-testing, and [`Complex64`] for the
//! floating pipelines.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A commutative field of characteristic zero.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_int(n: i64) -> Self;
    /// Magnitude used to choose elimination pivots. Only its ordering matters.
    fn pivot_weight(&self) -> f64;
    /// Nearest double-precision complex value.
    fn to_complex(&self) -> Complex64;
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn pivot_weight(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

/// Gaussian rational `re + i·im` with both parts kept reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion of a finite double (every finite double is a dyadic rational).
    pub fn from_complex(z: Complex64) -> Option<Self> {
        Some(Self {
            re: BigRational::from_float(z.re)?,
            im: BigRational::from_float(z.im)?,
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

fn ratio_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) => v,
        None => {
            // numerator and denominator overflow f64 separately; drop common low bits
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl fmt::Display for ExactComplex {
    /// `p/q` for real values, `p/q+r/si` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", ratio_to_string(&self.re));
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}i",
            ratio_to_string(&self.re),
            sign,
            ratio_to_string(&self.im.abs())
        )
    }
}

impl Serialize for ExactComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            re: String,
            im: String,
        }
        Repr {
            re: ratio_to_string(&self.re),
            im: ratio_to_string(&self.im),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            re: String,
            im: String,
        }
        let r = Repr::deserialize(deserializer)?;
        let re = parse_rational(&r.re).map_err(serde::de::Error::custom)?;
        let im = parse_rational(&r.im).map_err(serde::de::Error::custom)?;
        Ok(Self { re, im })
    }
}

impl Add for ExactComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for ExactComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for ExactComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Self::real(self.re * rhs.re);
        }
        Self {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for ExactComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.im.is_zero() {
            return Self {
                re: self.re / &rhs.re,
                im: self.im / &rhs.re,
            };
        }
        let d = rhs.norm_sqr();
        let num = self * rhs.conj();
        Self {
            re: num.re / &d,
            im: num.im / d,
        }
    }
}

impl Neg for ExactComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Field for ExactComplex {
    fn zero() -> Self {
        Self::real(BigRational::zero())
    }
    fn one() -> Self {
        Self::real(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }
    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactParseError {
    #[error("empty token")]
    Empty,
    #[error("`{0}` is not an exact rational (expected p or p/q)")]
    NotRational(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("`{0}` is not an exact complex token (expected p/q, p/qi or p/q+r/si)")]
    NotComplex(String),
}

/// Parses `p` or `p/q` with optional sign.
pub fn parse_rational(text: &str) -> Result<BigRational, ExactParseError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ExactParseError::Empty);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let is_int = |s: &str| {
        let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num) || den.is_some_and(|d| !is_int(d) || d.starts_with(['+', '-'])) {
        return Err(ExactParseError::NotRational(t.to_string()));
    }
    let n = BigInt::from_str(num.trim_start_matches('+'))
        .map_err(|_| ExactParseError::NotRational(t.to_string()))?;
    let d = match den {
        Some(d) => BigInt::from_str(d).map_err(|_| ExactParseError::NotRational(t.to_string()))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(ExactParseError::ZeroDenominator(t.to_string()));
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for ExactComplex {
    type Err = ExactParseError;

    /// Accepts `p/q`, `p/qi`, `i`, `-i` and `p/q+r/si` / `p/q-r/si`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(ExactParseError::Empty);
        }
        let imag_part = |body: &str| -> Result<BigRational, ExactParseError> {
            match body {
                "" | "+" => Ok(BigRational::one()),
                "-" => Ok(-BigRational::one()),
                other => parse_rational(other),
            }
        };
        let Some(body) = t.strip_suffix('i') else {
            return parse_rational(&t).map(ExactComplex::real);
        };
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        match split {
            Some(i) => {
                let re = parse_rational(&body[..i])
                    .map_err(|_| ExactParseError::NotComplex(t.clone()))?;
                let im =
                    imag_part(&body[i..]).map_err(|_| ExactParseError::NotComplex(t.clone()))?;
                Ok(ExactComplex::new(re, im))
            }
            None => {
                let im = imag_part(body).map_err(|_| ExactParseError::NotComplex(t.clone()))?;
                Ok(ExactComplex::new(BigRational::zero(), im))
            }
        }
    }
}
