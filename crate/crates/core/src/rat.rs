//! Exact rationals and their canonical text form.
//!
//! Every rational that crosses a file or CLI boundary is written as `p/q`
//! with `q > 1` and `gcd(p, q) = 1`, or as `p` when the denominator is one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatParseError {
    #[error("empty rational")]
    Empty,
    #[error("malformed rational {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("rational {0:?} is not reduced")]
    NotReduced(String),
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n / d`, reduced. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn is_canonical_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

/// Parses the canonical `p/q` or `p` form. Non-reduced input such as `2/4`
/// or `3/1`, leading zeros, and signs on the denominator are rejected so that
/// parsing and printing round-trip byte for byte.
pub fn parse_rat(text: &str) -> Result<Rat, RatParseError> {
    if text.is_empty() {
        return Err(RatParseError::Empty);
    }
    let malformed = || RatParseError::Malformed(text.to_string());
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text),
    };
    let (num_s, den_s) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    if !is_canonical_digits(num_s) {
        return Err(malformed());
    }
    let num: BigInt = num_s.parse().map_err(|_| malformed())?;
    if sign < 0 && num.is_zero() {
        return Err(malformed());
    }
    let num = if sign < 0 { -num } else { num };
    match den_s {
        None => Ok(Rat::from_integer(num)),
        Some(d) => {
            if d == "0" {
                return Err(RatParseError::ZeroDenominator(text.to_string()));
            }
            if !is_canonical_digits(d) {
                return Err(malformed());
            }
            let den: BigInt = d.parse().map_err(|_| malformed())?;
            if den.is_one() || !num.gcd(&den).is_one() {
                return Err(RatParseError::NotReduced(text.to_string()));
            }
            Ok(Rat::new_raw(num, den))
        }
    }
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Least common multiple of the denominators.
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn pow(r: &Rat, p: u32) -> Rat {
    num_traits::pow(r.clone(), p as usize)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn min_max<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Option<(Rat, Rat)> {
    let mut it = values.into_iter();
    let first = it.next()?.clone();
    Some(it.fold((first.clone(), first), |(lo, hi), v| {
        (if v < &lo { v.clone() } else { lo }, if v > &hi { v.clone() } else { hi })
    }))
}
