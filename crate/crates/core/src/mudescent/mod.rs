//! The descent map `mu: J(Q)/2J(Q) -> L^*/(L^*)^2 Q^*` for `L = Q[X]/(F)`.
//!
//! With `F = f6 * prod q_i` over rational irreducible factors, `L` splits as the
//! product of the fields `L_i = Q(theta_i)`, and a class with Mumford
//! polynomial `u` maps to `(u(theta_i))_i`.

mod kernel;

pub use kernel::{
    certify_kernel, no_rational_divisor_class_deg1, saturation_check, ConicTest, KernelReport, KernelVerdict, NamedClass, SaturationEntry,
    SaturationReport,
};

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    quad_is_square, rational_sqrt, square_class_support, squarefree_part, QuadElement, Rational,
};
use crate::curve::{FactoredSextic, Genus2Curve};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MuError {
    #[error("divisor is not on the curve")]
    NotOnCurve,
    #[error("class has {got} components but the algebra has {want}")]
    Shape { got: usize, want: usize },
    #[error("too many classes for an exhaustive rank computation ({0})")]
    TooMany(usize),
}

/// A rational point of `J`, as `[P1 + P2 - D_inf]` with
/// `u = X^2 - s X + n`, `v = l X + m`, `v^2 = F mod u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DivisorClass {
    Identity,
    Mumford {
        #[serde(with = "crate::algebra::serde_rational")]
        s: Rational,
        #[serde(with = "crate::algebra::serde_rational")]
        n: Rational,
        #[serde(with = "crate::algebra::serde_rational")]
        l: Rational,
        #[serde(with = "crate::algebra::serde_rational")]
        m: Rational,
    },
}

impl DivisorClass {
    pub fn mumford(s: Rational, n: Rational, l: Rational, m: Rational) -> Self {
        DivisorClass::Mumford { s, n, l, m }
    }

    pub fn u(&self) -> Option<Poly> {
        match self {
            DivisorClass::Identity => None,
            DivisorClass::Mumford { s, n, .. } => Some(Poly::new(vec![n.clone(), -s.clone(), Rational::one()])),
        }
    }

    pub fn v(&self) -> Option<Poly> {
        match self {
            DivisorClass::Identity => None,
            DivisorClass::Mumford { l, m, .. } => Some(Poly::new(vec![m.clone(), l.clone()])),
        }
    }

    /// The two points `(x, l x + m)` with `x = s/2 +- (r/2) sqrt(d)` where
    /// `s^2 - 4n = d r^2`. They are conjugate over **Q**(sqrt d) unless the
    /// discriminant is a square.
    pub fn points(&self) -> Option<[(QuadElement, QuadElement); 2]> {
        let DivisorClass::Mumford { s, n, l, m } = self else { return None };
        let two = Rational::from_integer(2.into());
        let disc = s * s - &two * &two * n;
        let mk = |x: QuadElement| {
            let y = &x.scale(l) + &QuadElement::rational(m.clone(), &x.d);
            (x, y)
        };
        let one = BigInt::one();
        if let Some(root) = rational_sqrt(&disc) {
            let x1 = QuadElement::rational((s + &root) / &two, &one);
            let x2 = QuadElement::rational((s - &root) / &two, &one);
            return Some([mk(x1), mk(x2)]);
        }
        let (d, r) = squarefree_part(&disc).expect("nonsquare is nonzero");
        let x1 = QuadElement::raw(s / &two, &r / &two, d.clone());
        let x2 = x1.conj();
        Some([mk(x1), mk(x2)])
    }

    /// `u | F - v^2`.
    pub fn is_on(&self, c: &Genus2Curve) -> bool {
        match (self.u(), self.v()) {
            (Some(u), Some(v)) => c.poly().sub(&v.mul(&v)).divrem(&u).1.is_zero(),
            _ => true,
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.u(), self.v()) {
            (Some(u), Some(v)) => write!(f, "[{u}, {v}]"),
            _ => write!(f, "0"),
        }
    }
}

/// An element of `L^*/(L^*)^2`, one component per factor of `F`; compared
/// modulo the diagonal image of `Q^*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanClass {
    pub components: Vec<QuadElement>,
}

impl fmt::Display for BooleanClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|z| z.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl BooleanClass {
    pub fn one(fs: &FactoredSextic) -> Self {
        Self { components: fs.factors.iter().map(|f| QuadElement::rational(Rational::one(), f.d())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.components.len(), o.components.len());
        Self { components: self.components.iter().zip(&o.components).map(|(a, b)| a * b).collect() }
    }

    /// Replaces each component by a smaller representative of its square class,
    /// keeping products from growing without bound.
    pub fn reduce(&self) -> Self {
        Self { components: self.components.iter().map(reduce_component).collect() }
    }
}

fn reduce_component(z: &QuadElement) -> QuadElement {
    if z.b.is_zero() {
        let (d, _) = squarefree_part(&z.a).expect("nonzero component");
        return QuadElement::rational(Rational::from_integer(d), &z.d);
    }
    // clear the rational square content of the coordinates
    let num = num_integer::Integer::gcd(z.a.numer(), z.b.numer());
    let den = num_integer::Integer::lcm(z.a.denom(), z.b.denom());
    let g = Rational::new(num, den);
    let (_, r) = squarefree_part(&g).expect("nonzero");
    z.scale(&(Rational::one() / (&r * &r)))
}

/// `mu` of a class. Where `u(theta) = 0` the value is replaced by
/// `F'(theta) (s - 2 theta)`, the evaluation of `u` at `theta` after moving the
/// divisor off the Weierstrass point within its class.
pub fn mu(c: &Genus2Curve, fs: &FactoredSextic, d: &DivisorClass) -> Result<BooleanClass, MuError> {
    let DivisorClass::Mumford { s, .. } = d else {
        return Ok(BooleanClass::one(fs));
    };
    if !d.is_on(c) {
        return Err(MuError::NotOnCurve);
    }
    let u = d.u().expect("mumford");
    let df = c.poly().derivative();
    let mut components = Vec::with_capacity(fs.factors.len());
    for f in &fs.factors {
        let theta = &f.root;
        let z = u.eval_quad(theta);
        if !z.is_zero() {
            components.push(z);
            continue;
        }
        let two_theta = theta.scale(&Rational::from_integer(2.into()));
        let s_q = QuadElement::rational(s.clone(), &theta.d);
        let w = &df.eval_quad(theta) * &(&s_q - &two_theta);
        // nonzero: a double root of u at theta would force F'(theta) = 0
        debug_assert!(!w.is_zero());
        components.push(w);
    }
    Ok(BooleanClass { components })
}

/// Allowed rational multipliers for one component, modulo squares: `w` makes
/// `w z` a square in `L_i` iff `w` is in the returned set. `None` if no
/// rational multiplier works.
fn component_multipliers(z: &QuadElement) -> Option<Vec<BigInt>> {
    let sqf = |q: &Rational| squarefree_part(q).expect("nonzero").0;
    let r = if z.b.is_zero() {
        z.a.clone()
    } else {
        // w z = (x + y sqrt d)^2 needs N(z) to be a rational square k^2, and
        // then (a + k + b sqrt d)^2 = 2 (a + k) z
        let k = rational_sqrt(&z.norm())?;
        let t = &z.a + &k;
        let t = if t.is_zero() { &z.a - &k } else { t };
        t * Rational::from_integer(2.into())
    };
    let base = sqf(&r);
    if z.d.is_one() {
        return Some(vec![base]);
    }
    let other = sqf(&Rational::from_integer(&base * &z.d));
    Some(vec![base, other])
}

/// Decides triviality in `L^*/(L^*)^2 Q^*` in closed form. Returns the
/// squarefree rational `w` with `w z_i` a square in every `L_i`.
pub fn class_is_trivial(x: &BooleanClass) -> Option<BigInt> {
    let mut allowed: Option<BTreeSet<BigInt>> = None;
    for z in &x.components {
        let here: BTreeSet<BigInt> = component_multipliers(z)?.into_iter().collect();
        allowed = Some(match allowed {
            None => here,
            Some(prev) => prev.intersection(&here).cloned().collect(),
        });
    }
    let w = allowed.map_or(Some(BigInt::one()), |s| s.into_iter().next())?;
    debug_assert!(x.components.iter().all(|z| quad_is_square(&z.scale(&Rational::from_integer(w.clone()))).unwrap()));
    Some(w)
}

/// The same decision by enumerating every `w` built from `-1` and the primes
/// that can occur in the square class of some component.
pub fn class_is_trivial_exhaustive(x: &BooleanClass) -> Option<BigInt> {
    let mut primes: BTreeSet<BigUint> = BTreeSet::new();
    for z in &x.components {
        primes.extend(square_class_support(z).expect("nonzero"));
    }
    let gens: Vec<BigInt> = std::iter::once(BigInt::from(-1)).chain(primes.into_iter().map(BigInt::from)).collect();
    assert!(gens.len() < 24, "support too large for enumeration");
    for mask in 0u32..(1 << gens.len()) {
        let w: BigInt = gens.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, g)| g.clone()).product();
        let wq = Rational::from_integer(w.clone());
        if x.components.iter().all(|z| quad_is_square(&z.scale(&wq)).expect("nonzero")) {
            return Some(w);
        }
    }
    None
}

pub fn classes_product(xs: &[&BooleanClass]) -> BooleanClass {
    let mut it = xs.iter();
    let first = (*it.next().expect("at least one class")).clone();
    it.fold(first, |acc, x| acc.mul(x).reduce())
}

pub fn classes_equal(a: &BooleanClass, b: &BooleanClass) -> bool {
    class_is_trivial(&a.mul(b)).is_some()
}

/// A subset of the inputs whose product is trivial, with the rational witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub indices: Vec<usize>,
    #[serde(with = "crate::algebra::serde_bigint")]
    pub witness: BigInt,
}

/// Subset products are enumerated, so the input size is capped.
pub const MAX_RANK_INPUTS: usize = 8;

/// `dim_F2` of the span of the classes, with one relation per dependent
/// input (empty relations list iff the inputs are independent).
pub fn f2_rank(xs: &[BooleanClass]) -> Result<(usize, Vec<Relation>), MuError> {
    if xs.len() > MAX_RANK_INPUTS {
        return Err(MuError::TooMany(xs.len()));
    }
    // independent indices and the products of all their subsets
    let mut basis: Vec<usize> = Vec::new();
    let mut subsets: Vec<(Vec<usize>, Option<BooleanClass>)> = vec![(Vec::new(), None)];
    let mut relations = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let x = x.reduce();
        let mut dependent = None;
        for (idx, prod) in &subsets {
            let cand = match prod {
                None => x.clone(),
                Some(p) => p.mul(&x),
            };
            if let Some(w) = class_is_trivial(&cand) {
                let mut indices = idx.clone();
                indices.push(i);
                dependent = Some(Relation { indices, witness: w });
                break;
            }
        }
        match dependent {
            Some(r) => relations.push(r),
            None => {
                basis.push(i);
                let n = subsets.len();
                for k in 0..n {
                    let (idx, prod) = subsets[k].clone();
                    let mut idx = idx;
                    idx.push(i);
                    let p = match prod {
                        None => x.clone(),
                        Some(p) => p.mul(&x).reduce(),
                    };
                    subsets.push((idx, Some(p)));
                }
            }
        }
    }
    Ok((basis.len(), relations))
}
