use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic mode of a scalar or matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Rational => f.write_str("rational"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// Either an exact rational (always in lowest terms, positive denominator)
/// or a double.
///
/// Arithmetic between the two modes is rejected with [`Error::MixedMode`].
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Rational(_) => Mode::Rational,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Rational => Scalar::Rational(BigRational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Rational => Scalar::Rational(BigRational::one()),
            Mode::Float => Scalar::Float(1.0),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Scalar::Rational(BigRational::new(num.into(), den.into())))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(n.into()))
    }

    /// Parses `"n"`, `"n/d"` or a finite decimal such as `"-1.25"` into an
    /// exact rational.
    pub fn parse_rational(s: &str) -> Result<Self> {
        parse_big_rational(s).map(Scalar::Rational)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a - b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a - b)),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a / b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a / b)),
            _ => Err(Error::MixedMode),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Fall back to a scaled division when numerator or denominator overflow.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
    let n = n >> shift;
    let d = d >> shift;
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if b != 0.0 => a / b,
        _ => f64::NAN,
    }
}

pub(crate) fn parse_big_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_fractions_and_decimals() {
        assert_eq!(Scalar::parse_rational("2").unwrap(), Scalar::from_int(2));
        assert_eq!(
            Scalar::parse_rational("-6/4").unwrap(),
            Scalar::from_ratio(-3, 2).unwrap()
        );
        assert_eq!(
            Scalar::parse_rational("0.5").unwrap(),
            Scalar::from_ratio(1, 2).unwrap()
        );
        assert_eq!(
            Scalar::parse_rational("1.25e1").unwrap(),
            Scalar::from_ratio(25, 2).unwrap()
        );
        assert!(Scalar::parse_rational("1/0").is_err());
        assert!(Scalar::parse_rational("abc").is_err());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let s = Scalar::from_ratio(4, -6).unwrap();
        let r = s.as_rational().unwrap();
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
    }

    #[test]
    fn mixed_mode_is_rejected() {
        let a = Scalar::from_int(1);
        let b = Scalar::Float(1.0);
        assert_eq!(a.add(&b), Err(Error::MixedMode));
        assert_eq!(b.mul(&a), Err(Error::MixedMode));
    }

    #[test]
    fn huge_rationals_convert_to_finite_floats() {
        let big = BigRational::new(
            num_traits::pow(BigInt::from(3), 900),
            num_traits::pow(BigInt::from(3), 899),
        );
        assert!((rational_to_f64(&big) - 3.0).abs() < 1e-12);
        let unreduced = BigRational::new_raw(
            num_traits::pow(BigInt::from(2), 1500) * 5,
            num_traits::pow(BigInt::from(2), 1500),
        );
        assert!((rational_to_f64(&unreduced) - 5.0).abs() < 1e-12);
    }
}
