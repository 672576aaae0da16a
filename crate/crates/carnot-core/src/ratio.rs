//! Exact rational scalars.
//!
//! All linear algebra in this crate runs over arbitrary-precision rationals;
//! coefficients enter the system as strings (`"p/q"` or plain integers) and
//! never pass through floating point.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Ratio = BigRational;

pub fn zero() -> Ratio {
    Ratio::zero()
}

pub fn one() -> Ratio {
    Ratio::one()
}

pub fn from_i64(v: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Ratio {
    assert!(q != 0);
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

/// Parse `"p/q"` or `"p"` with arbitrary-precision integer parts.
pub fn parse_ratio(text: &str) -> Result<Ratio> {
    let bad = || Error::BadRational {
        literal: text.to_string(),
    };
    let mut parts = text.splitn(2, '/');
    let num_str = parts.next().ok_or_else(bad)?.trim();
    let numer: BigInt = num_str.parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(Ratio::from_integer(numer)),
        Some(den_str) => {
            let denom: BigInt = den_str.trim().parse().map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(Error::ZeroDenominator {
                    literal: text.to_string(),
                });
            }
            Ok(Ratio::new(numer, denom))
        }
    }
}

/// Render as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_ratio(r: &Ratio) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Ratio) -> f64 {
    // Good enough for display and for the float-mode lab; exact paths never
    // round-trip through here.
    let numer = r.numer();
    let denom = r.denom();
    let scale = |x: &BigInt| -> f64 {
        let digits = x.to_string();
        digits.parse::<f64>().unwrap_or(if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        })
    };
    scale(numer) / scale(denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_ratio("7").unwrap(), from_i64(7));
        assert_eq!(parse_ratio("-3/6").unwrap(), frac(-1, 2));
        assert_eq!(parse_ratio(" 2/4 ").unwrap(), frac(1, 2));
    }

    #[test]
    fn rejects_zero_denominator() {
        match parse_ratio("1/0") {
            Err(Error::ZeroDenominator { .. }) => {}
            other => panic!("expected ZeroDenominator, got {other:?}"),
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_ratio("").is_err());
        assert!(parse_ratio("a/b").is_err());
        assert!(parse_ratio("1.5").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for s in ["0", "5", "-5", "1/3", "-7/2"] {
            assert_eq!(format_ratio(&parse_ratio(s).unwrap()), s);
        }
    }
}
