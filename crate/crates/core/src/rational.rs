//! Exact rational arithmetic used throughout the crate.
//!
//! Every probability and expected length is a [`Rational`]: an
//! arbitrary-precision fraction kept in lowest terms with a positive
//! denominator. There is no floating point anywhere in the decision
//! paths; decimals appear only in display helpers and are labeled
//! approximate.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always reduced, denominator > 0.
pub type Rational = num_rational::BigRational;

/// Shorthand constructor for small rationals.
///
/// Panics if `den == 0`, which never happens for literal arguments.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Error raised when a text token cannot be read as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("InvalidRational: cannot parse {input:?} as an exact rational ({reason})")]
pub struct InvalidRational {
    pub input: String,
    pub reason: String,
}

fn invalid(input: &str, reason: &str) -> InvalidRational {
    InvalidRational {
        input: input.to_string(),
        reason: reason.to_string(),
    }
}

/// Parses `"a/b"`, an integer, or a decimal literal as an exact rational.
///
/// Decimal literals are read over a power of ten, so `0.125` becomes
/// exactly `1/8`. Signs are accepted; range checks (positivity, sums)
/// belong to PMF validation, not parsing.
pub fn parse_rational(s: &str) -> Result<Rational, InvalidRational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(invalid(s, "empty token"));
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| invalid(s, "numerator is not an integer"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| invalid(s, "denominator is not an integer"))?;
        if d.is_zero() {
            return Err(invalid(s, "denominator is zero"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let (sign, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac_part.is_empty())
        {
            return Err(invalid(s, "not a decimal literal"));
        }
        let digits = format!("{}{}", int_digits, frac_part);
        let n: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| invalid(s, "bad digits"))?
        };
        let d = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Ok(Rational::new(BigInt::from(sign) * n, d));
    }
    let n: BigInt = t.parse().map_err(|_| invalid(s, "not an integer"))?;
    Ok(Rational::from_integer(n))
}

/// Renders a rational exactly: `"a/b"`, or just `"a"` when the
/// denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with `sig` significant digits. Approximate by
/// construction; never parsed back.
pub fn decimal_approx(r: &Rational, sig: usize) -> String {
    let v = r.to_f64().unwrap_or(f64::NAN);
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return format!("{:.*}", sig.saturating_sub(1), 0.0);
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - magnitude).clamp(0, 17) as usize;
    format!("{:.*}", decimals, v)
}

/// Serde helpers rendering rationals as exact `"a/b"` strings.
pub mod serde_exact {
    use super::{format_rational, Rational};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(r))
    }

    pub mod option {
        use super::{format_rational, Rational};
        use serde::Serializer;

        pub fn serialize<S: Serializer>(
            r: &Option<Rational>,
            ser: S,
        ) -> Result<S::Ok, S::Error> {
            match r {
                Some(v) => ser.serialize_some(&format_rational(v)),
                None => ser.serialize_none(),
            }
        }
    }

    pub mod vec {
        use super::{format_rational, Rational};
        use serde::ser::{SerializeSeq, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rational], ser: S) -> Result<S::Ok, S::Error> {
            let mut seq = ser.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }
    }
}

/// True iff `n == d^k` for some integer `k >= 1`; returns the exponent.
/// Exact integer arithmetic, no logarithms.
pub fn power_exponent(n: usize, d: usize) -> Option<u32> {
    debug_assert!(n >= 2 && d >= 2);
    let mut value = d;
    let mut exp = 1u32;
    while value < n {
        value = value.checked_mul(d)?;
        exp += 1;
    }
    (value == n).then_some(exp)
}
