//! Exact rational scalars.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator; its `Display` form is the canonical `"p/q"` (or
//! `"p"` for integers) used by every serialization in this workspace.

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Convenience constructor for integer-valued rationals.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` as a rational; panics if `q == 0` (test/internal use only).
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Canonical text form: `"p"` or `"p/q"` with q > 0 and gcd(|p|, q) = 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalParseError {
    /// Input was empty or had no digits where digits were required.
    MissingDigits,
    /// A character outside `[0-9/+-]` appeared.
    InvalidCharacter(char),
    /// The denominator was zero.
    ZeroDenominator,
    /// A second `/` or a sign in the denominator.
    Malformed,
}

impl fmt::Display for RationalParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalParseError::MissingDigits => write!(f, "expected digits"),
            RationalParseError::InvalidCharacter(c) => {
                write!(f, "invalid character {c:?} in rational")
            }
            RationalParseError::ZeroDenominator => write!(f, "denominator is zero"),
            RationalParseError::Malformed => write!(f, "malformed rational"),
        }
    }
}

/// Parse `"p"` or `"p/q"` with an optional leading sign on `p`.
///
/// This is a hand-rolled parser so that a zero denominator is a reported
/// error rather than a panic.
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let s = s.trim();
    let (num_part, den_part) = match s.find('/') {
        Some(pos) => {
            let den = &s[pos + 1..];
            if den.contains('/') {
                return Err(RationalParseError::Malformed);
            }
            (&s[..pos], Some(den))
        }
        None => (s, None),
    };
    let num = parse_signed(num_part)?;
    let den = match den_part {
        Some(d) => parse_unsigned(d)?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(RationalParseError::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

fn parse_signed(s: &str) -> Result<BigInt, RationalParseError> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let v = parse_unsigned(digits)?;
    Ok(if neg { -v } else { v })
}

fn parse_unsigned(s: &str) -> Result<BigInt, RationalParseError> {
    if s.is_empty() {
        return Err(RationalParseError::MissingDigits);
    }
    if let Some(c) = s.chars().find(|c| !c.is_ascii_digit()) {
        return Err(RationalParseError::InvalidCharacter(c));
    }
    Ok(s.bytes()
        .fold(BigInt::zero(), |acc, b| acc * 10 + (b - b'0')))
}

/// Exact integer square root when `n` is a perfect square.
pub fn sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_and_display() {
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&ratio(8, 4)), "2");
        assert_eq!(format_rational(&rat(0)), "0");
    }

    #[test]
    fn parse_round_trips() {
        for s in ["0", "-3/2", "7", "5/2", "-12"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("+4/6").unwrap(), ratio(2, 3));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert_eq!(
            parse_rational("1/0"),
            Err(RationalParseError::ZeroDenominator)
        );
        assert_eq!(parse_rational(""), Err(RationalParseError::MissingDigits));
        assert_eq!(parse_rational("1/-2"), Err(RationalParseError::InvalidCharacter('-')));
        assert_eq!(parse_rational("1/2/3"), Err(RationalParseError::Malformed));
        assert_eq!(parse_rational("a"), Err(RationalParseError::InvalidCharacter('a')));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(sqrt_exact(&BigInt::from(49)), Some(BigInt::from(7)));
        assert_eq!(sqrt_exact(&BigInt::from(50)), None);
        assert_eq!(sqrt_exact(&BigInt::from(-4)), None);
        assert_eq!(sqrt_exact(&BigInt::from(0)), Some(BigInt::from(0)));
    }
}
