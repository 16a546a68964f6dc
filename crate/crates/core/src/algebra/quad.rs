use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{factor_integer, fmt_rational, rational_sqrt, AlgebraError, Rational};

/// `a + b*sqrt(d)` in **Q**(√d). `d` is squarefree and nonzero; `d = 1` is
/// the degenerate tag for **Q** itself and then `b` is always zero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadElement {
    #[serde(with = "super::serde_rational")]
    pub a: Rational,
    #[serde(with = "super::serde_rational")]
    pub b: Rational,
    #[serde(with = "super::serde_bigint")]
    pub d: BigInt,
}

impl fmt::Debug for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", fmt_rational(&self.a))
        } else {
            write!(
                f,
                "{} + {}*sqrt({})",
                fmt_rational(&self.a),
                fmt_rational(&self.b),
                self.d
            )
        }
    }
}

fn is_squarefree(d: &BigInt) -> bool {
    if d.is_zero() {
        return false;
    }
    match factor_integer(d) {
        Ok(f) => f.factors.iter().all(|(_, e)| *e == 1),
        Err(_) => false,
    }
}

impl QuadElement {
    pub fn new(a: Rational, b: Rational, d: BigInt) -> Result<Self, AlgebraError> {
        if !is_squarefree(&d) {
            return Err(AlgebraError::BadDiscriminant(d));
        }
        if d.is_one() && !b.is_zero() {
            return Err(AlgebraError::BadDiscriminant(d));
        }
        Ok(Self { a, b, d })
    }

    /// Caller guarantees `d` is squarefree.
    pub(crate) fn raw(a: Rational, b: Rational, d: BigInt) -> Self {
        debug_assert!(!d.is_one() || b.is_zero());
        Self { a, b, d }
    }

    pub fn rational(a: Rational, d: &BigInt) -> Self {
        Self::raw(a, Rational::zero(), d.clone())
    }

    /// `sqrt(d)` itself.
    pub fn root(d: &BigInt) -> Self {
        assert!(!d.is_one(), "sqrt(1) is not a generator");
        Self::raw(Rational::zero(), Rational::one(), d.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::raw(self.a.clone(), -&self.b, self.d.clone())
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(self.d.clone()) * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    fn same_field(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(AlgebraError::FieldMismatch(self.d.clone(), other.d.clone()))
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_field(other)?;
        let d = Rational::from_integer(self.d.clone());
        Ok(Self::raw(
            &self.a * &other.a + d * &self.b * &other.b,
            &self.a * &other.b + &self.b * &other.a,
            self.d.clone(),
        ))
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::raw(&self.a / &n, -&self.b / &n, self.d.clone()))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_mul(&other.inv()?)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::raw(&self.a * q, &self.b * q, self.d.clone())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::rational(Rational::one(), &self.d);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl<'a> Add for &'a QuadElement {
    type Output = QuadElement;
    fn add(self, o: &'a QuadElement) -> QuadElement {
        assert_eq!(self.d, o.d, "field mismatch");
        QuadElement::raw(&self.a + &o.a, &self.b + &o.b, self.d.clone())
    }
}

impl<'a> Sub for &'a QuadElement {
    type Output = QuadElement;
    fn sub(self, o: &'a QuadElement) -> QuadElement {
        assert_eq!(self.d, o.d, "field mismatch");
        QuadElement::raw(&self.a - &o.a, &self.b - &o.b, self.d.clone())
    }
}

impl<'a> Mul for &'a QuadElement {
    type Output = QuadElement;
    fn mul(self, o: &'a QuadElement) -> QuadElement {
        self.try_mul(o).expect("field mismatch")
    }
}

impl Neg for &QuadElement {
    type Output = QuadElement;
    fn neg(self) -> QuadElement {
        QuadElement::raw(-&self.a, -&self.b, self.d.clone())
    }
}

/// Decides whether `e` is a square in its field.
///
/// `(u + v√d)^2 = a + b√d` forces `u^2 - d v^2 = ±n` with `n^2 = N(e)`, hence
/// `u^2 = (a ± n)/2`; when `b = 0` the element is a square iff `a` or `a/d` is
/// a rational square.
pub fn quad_is_square(e: &QuadElement) -> Result<bool, AlgebraError> {
    if e.is_zero() {
        return Err(AlgebraError::Zero);
    }
    if e.b.is_zero() {
        if rational_sqrt(&e.a).is_some() {
            return Ok(true);
        }
        if e.d.is_one() {
            return Ok(false);
        }
        return Ok(rational_sqrt(&(&e.a / Rational::from_integer(e.d.clone()))).is_some());
    }
    let n = match rational_sqrt(&e.norm()) {
        Some(n) => n,
        None => return Ok(false),
    };
    let two = Rational::from_integer(BigInt::from(2));
    for cand in [(&e.a + &n) / &two, (&e.a - &n) / &two] {
        if cand.is_zero() {
            continue;
        }
        if let Some(u) = rational_sqrt(&cand) {
            let v = &e.b / (&two * &u);
            let root = QuadElement::raw(u, v, e.d.clone());
            if &root.square() == e {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Primes that may carry the square class of `e`: those dividing `2d`, the
/// numerator or denominator of the norm, or the common denominator of the
/// coordinates. The last set catches split primes where `e` has opposite
/// valuations at the two primes above `p`.
pub fn square_class_support(e: &QuadElement) -> Result<BTreeSet<BigUint>, AlgebraError> {
    if e.is_zero() {
        return Err(AlgebraError::Zero);
    }
    let mut out = BTreeSet::new();
    out.insert(BigUint::from(2u32));
    let n = e.norm();
    let den = num_integer::Integer::lcm(e.a.denom(), e.b.denom());
    for m in [e.d.clone(), n.numer().clone(), n.denom().clone(), den] {
        if m.abs().is_one() {
            continue;
        }
        for p in factor_integer(&m)?.primes() {
            out.insert(p.clone());
        }
    }
    Ok(out)
}

/// A coset in `L^* / (L^*)^2` for `L = Q(√d)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquareClass {
    pub representative: QuadElement,
    #[serde(with = "support_serde")]
    pub support: BTreeSet<BigUint>,
}

mod support_serde {
    use std::collections::BTreeSet;

    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &BTreeSet<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|p| p.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeSet<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(|_| D::Error::custom(format!("bad prime {s:?}"))))
            .collect()
    }
}

impl SquareClass {
    pub fn new(representative: QuadElement) -> Result<Self, AlgebraError> {
        let support = square_class_support(&representative)?;
        Ok(Self { representative, support })
    }

    pub fn d(&self) -> &BigInt {
        &self.representative.d
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        Self::new(self.representative.try_mul(&other.representative)?)
    }

    pub fn is_trivial(&self) -> bool {
        quad_is_square(&self.representative).expect("nonzero representative")
    }

    /// Equality modulo squares, decided on the ratio.
    pub fn same_class(&self, other: &Self) -> Result<bool, AlgebraError> {
        quad_is_square(&self.representative.try_div(&other.representative)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{frac, rat};
    use proptest::prelude::*;

    fn qe(a: Rational, b: Rational, d: i64) -> QuadElement {
        QuadElement::new(a, b, BigInt::from(d)).unwrap()
    }

    fn primes(v: &[u32]) -> BTreeSet<BigUint> {
        v.iter().map(|&p| BigUint::from(p)).collect()
    }

    #[test]
    fn norm_and_conjugate() {
        let d = BigInt::from(-7);
        assert_eq!(QuadElement::rational(rat(5), &d).norm(), rat(25));
        let s = QuadElement::root(&d);
        assert_eq!(s.norm(), rat(7));
        assert_eq!(&s * &(-&s), QuadElement::rational(rat(7), &d));
        let x = qe(rat(3), frac(1, 2), -7);
        assert_eq!(&x * &x.inv().unwrap(), QuadElement::rational(rat(1), &d));
        assert_eq!(x.conj().conj(), x);
        assert!(QuadElement::rational(rat(0), &d).inv().is_err());
        assert!(QuadElement::new(rat(1), rat(1), BigInt::from(12)).is_err());
        assert!(x.try_mul(&qe(rat(1), rat(1), 11)).is_err());
    }

    #[test]
    fn square_examples() {
        assert!(quad_is_square(&qe(rat(1), rat(0), -7)).unwrap());
        assert!(quad_is_square(&qe(rat(-7), rat(0), -7)).unwrap());
        assert!(!quad_is_square(&qe(frac(5, 2), rat(0), -7)).unwrap());
        // (1 + √2)^2 = 3 + 2√2
        assert!(quad_is_square(&qe(rat(3), rat(2), 2)).unwrap());
        assert!(!quad_is_square(&qe(rat(3), rat(1), 2)).unwrap());
        assert!(quad_is_square(&qe(rat(0), rat(0), 2)).is_err());
        // Q itself
        assert!(quad_is_square(&qe(rat(9), rat(0), 1)).unwrap());
        assert!(!quad_is_square(&qe(rat(-9), rat(0), 1)).unwrap());
    }

    #[test]
    fn support_examples() {
        assert_eq!(square_class_support(&qe(rat(1), rat(0), -7)).unwrap(), primes(&[2, 7]));
        assert_eq!(square_class_support(&qe(rat(-7), rat(0), -7)).unwrap(), primes(&[2, 7]));
        assert_eq!(square_class_support(&qe(rat(18), rat(0), 11)).unwrap(), primes(&[2, 3, 11]));
    }

    fn arb_elem(d: i64) -> impl Strategy<Value = QuadElement> {
        (-60i64..60, 1i64..30, -60i64..60, 1i64..30).prop_filter_map("nonzero", move |(a, da, b, db)| {
            let e = QuadElement::raw(frac(a, da), frac(b, db), BigInt::from(d));
            (!e.is_zero()).then_some(e)
        })
    }

    fn arb_field() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![-1i64, 2, -2, 3, -7, -14, 11, 13, -23, 5, -31, 62])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn squares_are_squares(e in arb_field().prop_flat_map(arb_elem)) {
            prop_assert!(quad_is_square(&e.square()).unwrap());
        }

        #[test]
        fn square_class_stable_under_square_factors(
            (e, f) in arb_field().prop_flat_map(|d| (arb_elem(d), arb_elem(d)))
        ) {
            let g = &e * &f.square();
            prop_assert_eq!(quad_is_square(&e).unwrap(), quad_is_square(&g).unwrap());
        }

        #[test]
        fn ring_axioms(
            (x, y, z) in arb_field().prop_flat_map(|d| (arb_elem(d), arb_elem(d), arb_elem(d)))
        ) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        }
    }
}
