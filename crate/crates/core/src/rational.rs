//! Exact scalar helpers on top of [`num::BigRational`].
//!
//! `BigRational` keeps every value in lowest terms with a positive
//! denominator, and its `floor` rounds toward negative infinity, which is the
//! convention every cut and signature in this crate relies on.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact mathematical floor as an integer.
pub fn floor(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

pub fn is_integral(x: &Rational) -> bool {
    x.is_integer()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn l1_norm(v: &[Rational]) -> Rational {
    v.iter().fold(Rational::zero(), |acc, x| acc + x.abs())
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Euclidean norm of an exact vector, computed in floating point from the
/// exact sum of squares.
pub fn l2_norm_f64(v: &[Rational]) -> f64 {
    let sq = v.iter().fold(Rational::zero(), |acc, x| acc + x * x);
    to_f64(&sq).sqrt()
}

pub fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

/// Parses `p/q` or a bare integer.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses a comma-separated rational vector such as `3/4,1/5`.
pub fn parse_vector(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse).collect()
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn render(x: &Rational) -> String {
    x.to_string()
}

pub fn render_vector(v: &[Rational]) -> String {
    v.iter().map(render).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floor_of_negative_half_rounds_down() {
        assert_eq!(floor(&ratio(-3, 2)), BigInt::from(-2));
        assert_eq!(floor(&ratio(3, 2)), BigInt::from(1));
        assert_eq!(floor(&int(-4)), BigInt::from(-4));
        assert_eq!(ceil(&ratio(-3, 2)), BigInt::from(-1));
    }

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let x = ratio(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(parse("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse(" -7 ").unwrap(), int(-7));
        assert_eq!(parse("4/2").unwrap(), int(2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert_eq!(render(&ratio(-6, 4)), "-3/2");
        assert_eq!(render(&int(5)), "5");
        assert_eq!(parse_vector("3/4,1/5").unwrap(), vec![ratio(3, 4), ratio(1, 5)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn floor_matches_integer_division(p in -100_000i64..100_000, q in 1i64..1000) {
            // div_euclid with positive divisor is the mathematical floor
            prop_assert_eq!(floor(&ratio(p, q)), BigInt::from(p.div_euclid(q)));
        }

        #[test]
        fn render_parse_roundtrip(p in -1000i64..1000, q in 1i64..1000) {
            let x = ratio(p, q);
            prop_assert_eq!(parse(&render(&x)).unwrap(), x);
        }
    }
}
