use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{is_prime, AlgebraError, Rational};

/// A place of **Q**: the real embedding or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

pub fn valuation_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut m = n.clone();
    let pb = BigInt::from(p);
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `v_p(q)` for nonzero `q`.
pub fn valuation(q: &Rational, p: u64) -> i64 {
    valuation_int(q.numer(), p) - valuation_int(q.denom(), p)
}

/// `q / p^v_p(q)`.
pub fn unit_part(q: &Rational, p: u64) -> Rational {
    let v = valuation(q, p);
    let pv = BigInt::from(p).pow(v.unsigned_abs() as u32);
    if v >= 0 {
        q / Rational::from_integer(pv)
    } else {
        q * Rational::from_integer(pv)
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Residue of a `p`-integral rational modulo `m` (a power of `p`).
pub(crate) fn residue(q: &Rational, m: &BigInt) -> BigInt {
    let inv = mod_inverse(q.denom(), m).expect("denominator is a unit");
    (q.numer() * inv).mod_floor(m)
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: &BigInt, p: &BigInt) -> Result<i8, AlgebraError> {
    if p <= &BigInt::from(2) || p.is_even() || !is_prime(p) {
        return Err(AlgebraError::NotOddPrime(p.clone()));
    }
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Ok(0);
    }
    let e = (p - 1u32) / 2u32;
    let r = a.modpow(&e, p);
    Ok(if r.is_one() { 1 } else { -1 })
}

fn check_prime(p: u64) -> Result<(), AlgebraError> {
    if is_prime(&BigInt::from(p)) {
        Ok(())
    } else {
        Err(AlgebraError::NotPrime(BigInt::from(p)))
    }
}

/// Whether nonzero `q` is a square in the completion of **Q** at `place`.
pub fn is_square_in_qp(q: &Rational, place: Place) -> Result<bool, AlgebraError> {
    if q.is_zero() {
        return Err(AlgebraError::Zero);
    }
    match place {
        Place::Real => Ok(q.is_positive()),
        Place::Prime(p) => {
            check_prime(p)?;
            Ok(qp_square_class(q, place) == 0)
        }
    }
}

/// Dimension over **F**_2 of `Q_v^* / (Q_v^*)^2`.
pub fn square_class_dim(place: Place) -> usize {
    match place {
        Place::Real => 1,
        Place::Prime(2) => 3,
        Place::Prime(_) => 2,
    }
}

/// Coordinates of `q` in `Q_v^* / (Q_v^*)^2` as a bit vector.
///
/// Real: bit 0 is the sign. Odd `p`: bit 0 is `v_p mod 2`, bit 1 is "unit is a
/// nonresidue". `p = 2`: bit 0 is `v_2 mod 2`, and the unit `u = (-1)^a 5^b`
/// mod 8 contributes `a` in bit 1 and `b` in bit 2.
pub fn qp_square_class(q: &Rational, place: Place) -> u8 {
    assert!(!q.is_zero(), "square class of zero");
    match place {
        Place::Real => u8::from(q.is_negative()),
        Place::Prime(p) => {
            let v = valuation(q, p);
            let u = unit_part(q, p);
            let parity = (v.rem_euclid(2)) as u8;
            if p == 2 {
                let r = residue(&u, &BigInt::from(8)).to_u8().unwrap();
                let a = u8::from(r % 4 == 3);
                let b = u8::from(r == 3 || r == 5);
                parity | (a << 1) | (b << 2)
            } else {
                let pb = BigInt::from(p);
                let r = residue(&u, &pb);
                let e = (&pb - 1u32) / 2u32;
                let nonres = !r.modpow(&e, &pb).is_one();
                parity | (u8::from(nonres) << 1)
            }
        }
    }
}

fn tonelli_shanks(a: &BigInt, p: &BigInt) -> BigInt {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return a;
    }
    let one = BigInt::one();
    let pm1: BigInt = p - 1u32;
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while z.modpow(&(&pm1 >> 1), p) != pm1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) >> 1), p);
    while t != one {
        let mut i = 0;
        let mut tt = t.clone();
        while tt != one {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    r
}

/// One Newton step record for a `p`-adic square root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtStep {
    pub approx: BigInt,
    /// `v_p(approx^2 - u)`, capped at the working precision.
    pub error_valuation: i64,
}

/// Newton iterates for the square root of a `p`-adic unit square `u`, worked
/// modulo `p^precision`. Returns `None` when `u` is not a unit square.
pub fn padic_sqrt(u: &Rational, p: u64, precision: u32, steps: usize) -> Option<Vec<SqrtStep>> {
    if u.is_zero() || valuation(u, p) != 0 || qp_square_class(u, Place::Prime(p)) != 0 {
        return None;
    }
    let pb = BigInt::from(p);
    let modulus = pb.pow(precision);
    let ures = residue(u, &modulus);
    let mut y = if p == 2 {
        BigInt::one()
    } else {
        tonelli_shanks(&ures, &pb)
    };
    let err = |y: &BigInt| -> i64 {
        let d = (y * y - &ures).mod_floor(&modulus);
        if d.is_zero() {
            precision as i64
        } else {
            valuation_int(&d, p)
        }
    };
    let mut out = vec![SqrtStep { approx: y.clone(), error_valuation: err(&y) }];
    for _ in 0..steps {
        let num: BigInt = &y * &y + &ures;
        let half = if p == 2 {
            num >> 1
        } else {
            num * mod_inverse(&BigInt::from(2), &modulus).unwrap()
        };
        let inv = mod_inverse(&y, &modulus)?;
        y = (half * inv).mod_floor(&modulus);
        out.push(SqrtStep { approx: y.clone(), error_valuation: err(&y) });
    }
    Some(out)
}

/// Hilbert symbol `(a, b)_v` for nonzero rationals: `1` when `a x^2 + b y^2 = z^2`
/// has a nontrivial solution over the completion, `-1` otherwise.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: Place) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    match place {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            let (al, be) = (valuation(a, p), valuation(b, p));
            let (u, w) = (unit_part(a, p), unit_part(b, p));
            if p == 2 {
                let r = |q: &Rational| residue(q, &BigInt::from(8)).to_u8().unwrap();
                let (u8_, w8) = (r(&u), r(&w));
                let eps = |x: u8| ((x - 1) / 2) % 2;
                let omega = |x: u8| ((x * x - 1) / 8) % 2;
                let e = (eps(u8_) * eps(w8)) as i64 + al * omega(w8) as i64 + be * omega(u8_) as i64;
                if e.rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            } else {
                let pb = BigInt::from(p);
                let leg = |q: &Rational| -> i8 {
                    let e = (&pb - 1u32) / 2u32;
                    if residue(q, &pb).modpow(&e, &pb).is_one() {
                        1
                    } else {
                        -1
                    }
                };
                let mut s: i8 = if (al * be).rem_euclid(2) == 1 && p % 4 == 3 { -1 } else { 1 };
                if be.rem_euclid(2) == 1 {
                    s *= leg(&u);
                }
                if al.rem_euclid(2) == 1 {
                    s *= leg(&w);
                }
                s
            }
        }
    }
}
