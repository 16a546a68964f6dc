//! The two elliptic quotients of an even sextic, 2-descent on them, and
//! pullback of their points to the Jacobian.

mod descent;
mod search;

pub use descent::{
    bad_primes, delta, local_image, selmer_group, two_descent, verify_descent, DescentBounds, DescentResult, LocalImage, SelmerGroup,
};
pub use search::{cover_search, point_search, FoundPoint};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{fmt_rational, valuation, Rational};
use crate::curve::{rational_roots, Genus2Curve};
use crate::mudescent::DivisorClass;
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EllError {
    #[error("the sextic is not even, so it has no bielliptic quotients of this shape")]
    NotEven,
    #[error("the cubic {0} does not split over Q; full rational 2-torsion is required")]
    IrrationalTwoTorsion(String),
    #[error("the cubic {0} is singular")]
    Singular(String),
    #[error("point ({0}, {1}) is not on the curve")]
    NotOnCurve(String, String),
    #[error("u = 0 has no preimage on the second chart")]
    ZeroOnSecondChart,
    #[error("local image at {place} reached only dimension {got} of {want}")]
    LocalImage { place: String, got: usize, want: usize },
}

/// Which bielliptic quotient: `E1` via `(x, y) -> (x^2, y)`, `E2` via
/// `(x, y) -> (1/x^2, y/x^3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quotient {
    E1,
    E2,
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quotient::E1 => write!(f, "E1"),
            Quotient::E2 => write!(f, "E2"),
        }
    }
}

/// `Y^2 = c3 u^3 + c2 u^2 + c1 u + c0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCubic {
    #[serde(with = "crate::algebra::serde_rational::vec")]
    pub coeffs: Vec<Rational>,
}

impl RawCubic {
    pub fn poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn contains(&self, u: &Rational, y: &Rational) -> bool {
        &(y * y) == &self.poly().eval(u)
    }
}

impl fmt::Display for RawCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y^2 = {}", self.poly())
    }
}

/// A point on a Weierstrass cubic; `None` is the point at infinity.
pub type Point = Option<(Rational, Rational)>;

/// `Y^2 = (X - e1)(X - e2)(X - e3)` with distinct integers `e_i`, together with
/// the change of variables `X = lambda u`, `Y = mu Y_raw` from a raw model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticCurve {
    #[serde(with = "crate::algebra::serde_bigint::arr3")]
    pub e: [BigInt; 3],
    #[serde(with = "crate::algebra::serde_rational")]
    pub lambda: Rational,
    #[serde(with = "crate::algebra::serde_rational")]
    pub mu: Rational,
    pub raw: RawCubic,
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = |e: &BigInt| {
            if e.is_negative() {
                format!("(X + {})", -e)
            } else {
                format!("(X - {e})")
            }
        };
        write!(f, "Y^2 = {}{}{}", t(&self.e[0]), t(&self.e[1]), t(&self.e[2]))
    }
}

impl EllipticCurve {
    /// Monic model from integer roots, with the identity change of variables.
    pub fn from_roots(e: [i64; 3]) -> Result<Self, EllError> {
        let raw = RawCubic {
            coeffs: Poly::product(e.iter().map(|&r| Poly::linear_root(&Rational::from_integer(r.into()))).collect::<Vec<_>>().iter())
                .coeffs()
                .to_vec(),
        };
        integralize(&raw)
    }

    fn er(&self, i: usize) -> Rational {
        Rational::from_integer(self.e[i].clone())
    }

    /// The same curve with its roots listed in another order, which changes
    /// the coordinates of `delta`.
    pub fn with_root_order(&self, order: [usize; 3]) -> Self {
        let mut sorted = order;
        sorted.sort_unstable();
        assert_eq!(sorted, [0, 1, 2], "not a permutation");
        Self { e: order.map(|i| self.e[i].clone()), ..self.clone() }
    }

    pub fn rhs(&self, x: &Rational) -> Rational {
        (x - self.er(0)) * (x - self.er(1)) * (x - self.er(2))
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            None => true,
            Some((x, y)) => y * y == self.rhs(x),
        }
    }

    /// `a2` and `a4` of `Y^2 = X^3 + a2 X^2 + a4 X + a6`.
    fn a2_a4(&self) -> (Rational, Rational) {
        let (e1, e2, e3) = (self.er(0), self.er(1), self.er(2));
        (-(&e1 + &e2 + &e3), &e1 * &e2 + &e1 * &e3 + &e2 * &e3)
    }

    pub fn neg(&self, p: &Point) -> Point {
        p.as_ref().map(|(x, y)| (x.clone(), -y))
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
            return p.clone().or_else(|| q.clone());
        };
        let (a2, a4) = self.a2_a4();
        let slope = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return None;
            }
            let three = Rational::from_integer(3.into());
            let two = Rational::from_integer(2.into());
            (three * x1 * x1 + &two * &a2 * x1 + &a4) / (two * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &slope * &slope - &a2 - x1 - x2;
        let y3 = -(y1 + &slope * (&x3 - x1));
        Some((x3, y3))
    }

    pub fn mul(&self, k: u64, p: &Point) -> Point {
        let mut acc: Point = None;
        let mut base = p.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Torsion test by the order bound 12 (Mazur) on multiples.
    pub fn is_torsion(&self, p: &Point) -> bool {
        let mut q = p.clone();
        for _ in 1..=12 {
            if q.is_none() {
                return true;
            }
            q = self.add(&q, p);
        }
        q.is_none()
    }

    pub fn two_torsion(&self) -> [Point; 3] {
        [0, 1, 2].map(|i| Some((self.er(i), Rational::zero())))
    }

    pub fn to_raw(&self, p: &Point) -> Point {
        p.as_ref().map(|(x, y)| (x / &self.lambda, y / &self.mu))
    }

    pub fn from_raw(&self, p: &Point) -> Point {
        p.as_ref().map(|(u, y)| (u * &self.lambda, y * &self.mu))
    }
}

/// Brings `Y^2 = c (u - r1)(u - r2)(u - r3)` to `Y'^2 = (X - e1)(X - e2)(X - e3)`
/// with integers `e_i`, via `X = c k^2 u`, `Y' = c k^3 Y` for the smallest
/// suitable rational `k`.
pub fn integralize(raw: &RawCubic) -> Result<EllipticCurve, EllError> {
    let g = raw.poly();
    if g.degree() != Some(3) {
        return Err(EllError::Singular(raw.to_string()));
    }
    let roots = rational_roots(&g);
    if roots.len() != 3 {
        return Err(EllError::IrrationalTwoTorsion(g.to_string()));
    }
    let c = g.leading();
    let scaled: Vec<Rational> = roots.iter().map(|r| r * &c).collect();
    // k = prod p^ceil(max(-v_p)/2) over denominators of c r_i
    let den = scaled.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut k = Rational::one();
    if !den.is_one() {
        let f = crate::algebra::factor_integer(&den).expect("nonzero");
        for (p, _) in &f.factors {
            let pu = num_traits::ToPrimitive::to_u64(p).expect("small prime");
            let need = scaled.iter().filter(|q| !q.is_zero()).map(|q| -valuation(q, pu)).max().unwrap_or(0).max(0);
            let e = (need + 1) / 2;
            k *= Rational::from_integer(BigInt::from(pu).pow(e as u32));
        }
    }
    let k2 = &k * &k;
    let mut e: Vec<BigInt> = scaled.iter().map(|q| (q * &k2).to_integer()).collect();
    // remove a common square factor
    let gcd = e.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !gcd.is_zero() {
        let f = crate::algebra::factor_integer(&gcd).expect("nonzero");
        for (p, mult) in &f.factors {
            let pb = BigInt::from(p.clone());
            let s = pb.pow(mult / 2);
            if !s.is_one() {
                for x in e.iter_mut() {
                    *x = &*x / (&s * &s);
                }
                k /= Rational::from_integer(s);
            }
        }
    }
    let lambda = &c * &k * &k;
    let mu = &c * &k * &k * &k;
    Ok(EllipticCurve { e: [e[0].clone(), e[1].clone(), e[2].clone()], lambda, mu, raw: raw.clone() })
}

/// Raw quotient models: `E1: Y^2 = g(u)` with `g(x^2) = F(x)`, and
/// `E2: Y^2 = u^3 g(1/u)`.
pub fn bielliptic_quotients(c: &Genus2Curve) -> Result<(RawCubic, RawCubic), EllError> {
    if !c.is_even() {
        return Err(EllError::NotEven);
    }
    let g = c.poly().even_part();
    let e1 = RawCubic { coeffs: g.coeffs().to_vec() };
    let e2 = RawCubic { coeffs: g.reversed(3).coeffs().to_vec() };
    Ok((e1, e2))
}

/// Image of a curve point under the quotient map; `None` when it lands at
/// infinity.
pub fn quotient_map(which: Quotient, x: &Rational, y: &Rational) -> Point {
    match which {
        Quotient::E1 => Some((x * x, y.clone())),
        Quotient::E2 => {
            if x.is_zero() {
                None
            } else {
                Some((Rational::one() / (x * x), y / (x * x * x)))
            }
        }
    }
}

/// The class `{P1, P2}` on the genus-2 curve lying over a raw quotient point.
///
/// On `E1` the preimages of `(u0, y0)` are `(+-sqrt(u0), y0)`; on `E2` they are
/// `x = +-1/sqrt(u0)` with `y = (y0/u0) x`. The point at infinity of `E1` pulls
/// back to `{inf+, inf-}`, the identity class.
pub fn pullback(c: &Genus2Curve, which: Quotient, p: &Point) -> Result<DivisorClass, EllError> {
    let Some((u0, y0)) = p else {
        return Ok(DivisorClass::Identity);
    };
    let (e1, e2) = bielliptic_quotients(c)?;
    let raw = if which == Quotient::E1 { &e1 } else { &e2 };
    if !raw.contains(u0, y0) {
        return Err(EllError::NotOnCurve(fmt_rational(u0), fmt_rational(y0)));
    }
    let d = match which {
        Quotient::E1 => DivisorClass::mumford(Rational::zero(), -u0.clone(), Rational::zero(), y0.clone()),
        Quotient::E2 => {
            if u0.is_zero() {
                return Err(EllError::ZeroOnSecondChart);
            }
            DivisorClass::mumford(Rational::zero(), -(Rational::one() / u0), y0 / u0, Rational::zero())
        }
    };
    assert!(d.is_on(c), "pullback of a quotient point must lie on the curve");
    Ok(d)
}

/// Rank of the Jacobian from the ranks of the two quotients, which is
/// invariant under the isogeny `J ~ E1 x E2`.
pub fn jacobian_rank(r1: Option<u32>, r2: Option<u32>) -> Option<u32> {
    Some(r1? + r2?)
}
