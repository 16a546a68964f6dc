//! Exact arithmetic over **Q** and quadratic fields, plus the square-class
//! machinery every later stage leans on.

mod f2;
mod factor;
mod padic;
mod quad;

pub use f2::{dot, nullspace, rank as f2_rank, F2Span};
pub use factor::{factor_integer, is_prime, primes_up_to, squarefree_part, Factorization};
pub use padic::{
    hilbert_symbol, is_square_in_qp, legendre, padic_sqrt, qp_square_class, square_class_dim, unit_part, valuation,
    Place,
};
pub(crate) use padic::{mod_inverse, valuation_int};
pub use quad::{quad_is_square, square_class_support, QuadElement, SquareClass};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number. Always kept in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("zero is not allowed here")]
    Zero,
    #[error("{0} is not an odd prime")]
    NotOddPrime(BigInt),
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("division by zero element")]
    DivisionByZero,
    #[error("field mismatch: Q(sqrt {0}) vs Q(sqrt {1})")]
    FieldMismatch(BigInt, BigInt),
    #[error("{0} is not a squarefree field discriminant")]
    BadDiscriminant(BigInt),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact square root in **Q**, if one exists.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    if q.is_zero() {
        return Some(Rational::zero());
    }
    let n = integer_sqrt_exact(q.numer())?;
    let d = integer_sqrt_exact(q.denom())?;
    Some(Rational::new(n, d))
}

pub fn is_rational_square(q: &Rational) -> bool {
    rational_sqrt(q).is_some()
}

pub fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Parses `"a"`, `"a/b"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, fracpart)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let digits = fracpart.len() as u32;
        if !fracpart.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let int_abs: BigInt = if int == "-" || int.is_empty() || int == "+" {
            BigInt::zero()
        } else {
            int.trim_start_matches(['-', '+']).parse().ok()?
        };
        let frac_val: BigInt = if fracpart.is_empty() {
            BigInt::zero()
        } else {
            fracpart.parse().ok()?
        };
        let scale = BigInt::from(10u32).pow(digits);
        let mut n = int_abs * &scale + frac_val;
        if neg {
            n = -n;
        }
        return Some(Rational::new(n, scale));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter writing rationals as exact fraction strings.
pub mod serde_rational {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod vec {
        use super::super::{fmt_rational, parse_rational, Rational};
        use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(fmt_rational).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
                .collect()
        }
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod serde_bigint {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("bad integer {s:?}")))
    }

    pub mod arr3 {
        use num_bigint::BigInt;
        use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[BigInt; 3], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|n| n.to_string()).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigInt; 3], D::Error> {
            let v: Vec<String> = Vec::deserialize(d)?;
            let n: Vec<BigInt> = v
                .iter()
                .map(|s| s.parse().map_err(|_| D::Error::custom(format!("bad integer {s:?}"))))
                .collect::<Result<_, _>>()?;
            n.try_into().map_err(|_| D::Error::custom("expected three integers"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-23/2"), Some(frac(-23, 2)));
        assert_eq!(parse_rational("4/6"), Some(frac(2, 3)));
        assert_eq!(parse_rational("-1.25"), Some(frac(-5, 4)));
        assert_eq!(parse_rational("-0.5"), Some(frac(-1, 2)));
        assert_eq!(parse_rational("17"), Some(rat(17)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(fmt_rational(&frac(-46, 4)), "-23/2");
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(rational_sqrt(&frac(2025, 4)), Some(frac(45, 2)));
        assert_eq!(rational_sqrt(&rat(2)), None);
        assert_eq!(rational_sqrt(&rat(-4)), None);
    }
}
