//! Genus-2 models `Y^2 = F(X)` with `deg F = 6`, their factorization over
//! **Q**, rational 2-torsion, and the root-configuration conditions used to
//! rule out rational divisor classes of degree one.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    factor_integer, fmt_rational, is_prime, parse_rational, rational_sqrt, squarefree_part,
    AlgebraError, QuadElement, Rational,
};
use crate::poly::{self, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} is not congruent to 7 mod 8")]
    NotSevenModEight(u64),
    #[error("a = {a} excluded: {reason}")]
    ExcludedParameter { a: i64, reason: &'static str },
    #[error("F must have degree exactly 6")]
    Degree,
    #[error("F has a repeated root, so the model is singular")]
    Singular,
    #[error("unsupported factor profile: {0}")]
    UnsupportedFactorProfile(String),
    #[error("the sextic is not even (odd-degree coefficients present)")]
    NotEven,
    #[error("cannot parse curve input: {0}")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub p: u64,
    pub a: i64,
}

/// `Y^2 = f6 X^6 + ... + f0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genus2Curve {
    /// `f0, f1, ..., f6`.
    #[serde(with = "crate::algebra::serde_rational::vec")]
    coeffs: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<FamilyParams>,
}

impl fmt::Display for Genus2Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(FamilyParams { p, a }) = self.family {
            let a_s = if a < 0 { format!("- {}", -a) } else { format!("+ {a}") };
            return write!(f, "Y^2 = 2(X^2 + {p})(X^2 + {})(X^2 {a_s})", 2 * p);
        }
        write!(f, "Y^2 = {}", self.poly())
    }
}

impl Genus2Curve {
    /// Coefficients in ascending order `f0..f6`.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, CurveError> {
        if coeffs.len() != 7 || coeffs[6].is_zero() {
            return Err(CurveError::Degree);
        }
        let c = Self { coeffs, family: None };
        if poly::discriminant(&c.poly()).is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(c)
    }

    /// Parses `f6, f5, ..., f0` given as integers, fractions or decimals.
    pub fn from_descending_strs(fs: &[&str]) -> Result<Self, CurveError> {
        if fs.len() != 7 {
            return Err(CurveError::Parse(format!("expected 7 coefficients, got {}", fs.len())));
        }
        let mut coeffs = fs
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| CurveError::Parse(format!("bad coefficient {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        coeffs.reverse();
        Self::new(coeffs)
    }

    pub fn from_ints_descending(fs: [i64; 7]) -> Result<Self, CurveError> {
        let mut c: Vec<Rational> = fs.iter().map(|&x| Rational::from_integer(x.into())).collect();
        c.reverse();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn family(&self) -> Option<FamilyParams> {
        self.family
    }

    pub fn poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn leading(&self) -> &Rational {
        &self.coeffs[6]
    }

    pub fn is_even(&self) -> bool {
        self.poly().is_even()
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        &(y * y) == &self.poly().eval(x)
    }
}

/// `Y^2 = 2(X^2 + p)(X^2 + 2p)(X^2 + a)`.
pub fn family_curve(p: u64, a: i64) -> Result<Genus2Curve, CurveError> {
    if !is_prime(&BigInt::from(p)) {
        return Err(CurveError::NotPrime(p));
    }
    if p % 8 != 7 {
        return Err(CurveError::NotSevenModEight(p));
    }
    let reason = if a == 0 {
        Some("a = 0 excluded")
    } else if a as i128 == p as i128 {
        Some("a = p excluded")
    } else if a as i128 == 2 * p as i128 {
        Some("a = 2p excluded")
    } else {
        None
    };
    if let Some(reason) = reason {
        return Err(CurveError::ExcludedParameter { a, reason });
    }
    let q = |c: i128| Poly::new(vec![Rational::from_integer(c.into()), Rational::zero(), Rational::one()]);
    let p = p as i128;
    let f = q(p)
        .mul(&q(2 * p))
        .mul(&q(a as i128))
        .scale(&Rational::from_integer(2.into()));
    let mut c = Genus2Curve::new(f.coeffs().to_vec())?;
    c.family = Some(FamilyParams { p: p as u64, a });
    Ok(c)
}

pub fn discriminant(c: &Genus2Curve) -> Rational {
    poly::discriminant(&c.poly())
}

/// One irreducible monic factor of `F` together with a chosen root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    /// Monic, ascending coefficients, degree 1 or 2.
    #[serde(with = "crate::algebra::serde_rational::vec")]
    pub coeffs: Vec<Rational>,
    /// `theta = a + b sqrt(d)`; `d = 1` for a linear factor.
    pub root: QuadElement,
}

impl Factor {
    pub fn poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn d(&self) -> &BigInt {
        &self.root.d
    }

    fn linear(r: Rational) -> Self {
        Self {
            coeffs: vec![-r.clone(), Rational::one()],
            root: QuadElement::rational(r, &BigInt::one()),
        }
    }

    /// `X^2 + b X + c`, assumed irreducible.
    fn quadratic(b: Rational, c: Rational) -> Result<Self, AlgebraError> {
        let disc = &b * &b - Rational::from_integer(4.into()) * &c;
        let (d, r) = squarefree_part(&disc)?;
        let two = Rational::from_integer(2.into());
        let root = QuadElement::new(-&b / &two, r / two, d)?;
        Ok(Self { coeffs: vec![c, b, Rational::one()], root })
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly())
    }
}

/// `F = unit * prod factors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredSextic {
    #[serde(with = "crate::algebra::serde_rational")]
    pub unit: Rational,
    pub factors: Vec<Factor>,
}

impl FactoredSextic {
    pub fn expand(&self) -> Poly {
        Poly::product(self.factors.iter().map(|f| f.poly()).collect::<Vec<_>>().iter())
            .scale(&self.unit)
    }
}

/// Roots of a polynomial over **C**, by Durand-Kerner iteration.
fn complex_roots(p: &Poly) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    let lead = p.leading();
    let c: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|x| Complex64::new((x / &lead).to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k);
    let bound = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm() / (1.0 + roots[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Positive divisors of `|n|`, ascending. Intended for leading coefficients of
/// modest size.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let f = factor_integer(n).expect("nonzero");
    let mut out = vec![BigInt::one()];
    for (p, e) in &f.factors {
        let p = BigInt::from(p.clone());
        let mut next = Vec::new();
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=*e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Integer polynomial with the same roots: cleared denominators, primitive.
fn primitive_integer(p: &Poly) -> Vec<BigInt> {
    let l = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn round_big(x: f64) -> Option<BigInt> {
    if !x.is_finite() {
        return None;
    }
    BigInt::from_f64(x.round())
}

/// All rational roots, each verified by exact evaluation.
pub fn rational_roots(p: &Poly) -> Vec<Rational> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let ints = primitive_integer(p);
    let dens = divisors(ints.last().unwrap());
    let mut out: Vec<Rational> = Vec::new();
    if p.coeff(0).is_zero() {
        out.push(Rational::zero());
    }
    for z in complex_roots(p) {
        if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
            continue;
        }
        for den in &dens {
            let Some(num) = round_big(z.re * den.to_f64().unwrap_or(f64::INFINITY)) else { continue };
            let r = Rational::new(num, den.clone());
            let close = (r.to_f64().unwrap_or(f64::NAN) - z.re).abs() <= 1e-8 * (1.0 + z.re.abs());
            if close && !out.contains(&r) && p.eval(&r).is_zero() {
                out.push(r);
                break;
            }
        }
    }
    out.sort();
    out
}

/// Rational monic quadratic factors `X^2 + bX + c` proposed from root pairs and
/// verified by exact division.
fn quadratic_factor(p: &Poly) -> Option<(Rational, Rational)> {
    let roots = complex_roots(p);
    let ints = primitive_integer(p);
    let dens = divisors(ints.last().unwrap());
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let s = roots[i] + roots[j];
            let m = roots[i] * roots[j];
            if s.im.abs() > 1e-6 * (1.0 + s.re.abs()) || m.im.abs() > 1e-6 * (1.0 + m.re.abs()) {
                continue;
            }
            for den in &dens {
                let df = den.to_f64().unwrap_or(f64::INFINITY);
                let (Some(g1), Some(g0)) = (round_big(-s.re * df), round_big(m.re * df)) else { continue };
                let b = Rational::new(g1, den.clone());
                let c = Rational::new(g0, den.clone());
                let q = Poly::monic_quadratic(b.clone(), c.clone());
                if p.divrem(&q).1.is_zero() {
                    return Some((b, c));
                }
            }
        }
    }
    None
}

fn split_quadratic(b: Rational, c: Rational) -> Result<Vec<Factor>, AlgebraError> {
    let disc = &b * &b - Rational::from_integer(4.into()) * &c;
    if let Some(r) = rational_sqrt(&disc) {
        let two = Rational::from_integer(2.into());
        let r1 = (-&b + &r) / &two;
        let r2 = (-&b - &r) / &two;
        return Ok(vec![Factor::linear(r1), Factor::linear(r2)]);
    }
    Ok(vec![Factor::quadratic(b, c)?])
}

/// Factorization through the cubic `g(u)` with `g(X^2) = F(X)`.
fn factor_even(c: &Genus2Curve) -> Result<FactoredSextic, CurveError> {
    let f = c.poly();
    let g = f.even_part();
    let roots = rational_roots(&g);
    let unit = c.leading().clone();
    let mut factors = Vec::new();
    let mut rest = g.monic();
    for u0 in &roots {
        factors.extend(split_quadratic(Rational::zero(), -u0.clone())?);
        rest = rest.divrem(&Poly::linear_root(u0)).0;
    }
    match rest.degree() {
        Some(0) | None => {}
        Some(2) => {
            // X^4 + beta X^2 + gamma = (X^2 + alpha X + delta)(X^2 - alpha X + delta)
            // with delta^2 = gamma and alpha^2 = 2 delta - beta.
            let beta = rest.coeff(1);
            let gamma = rest.coeff(0);
            let mut found = false;
            if let Some(dl) = rational_sqrt(&gamma) {
                for delta in [dl.clone(), -dl] {
                    let two = Rational::from_integer(2.into());
                    if let Some(alpha) = rational_sqrt(&(&two * &delta - &beta)) {
                        if alpha.is_zero() {
                            continue;
                        }
                        factors.extend(split_quadratic(alpha.clone(), delta.clone())?);
                        factors.extend(split_quadratic(-alpha, delta)?);
                        found = true;
                        break;
                    }
                }
            }
            if !found {
                return Err(CurveError::UnsupportedFactorProfile(format!(
                    "irreducible quartic factor {}",
                    rest.substitute_square()
                )));
            }
        }
        _ => {
            return Err(CurveError::UnsupportedFactorProfile(format!(
                "the cubic {g} in u = X^2 has no rational root"
            )));
        }
    }
    Ok(FactoredSextic { unit, factors })
}

/// Factorization from exact rational roots and verified quadratic factors.
fn factor_general(c: &Genus2Curve) -> Result<FactoredSextic, CurveError> {
    let mut rest = c.poly().monic();
    let mut factors = Vec::new();
    for r in rational_roots(&rest) {
        factors.push(Factor::linear(r.clone()));
        rest = rest.divrem(&Poly::linear_root(&r)).0;
    }
    while rest.degree().unwrap_or(0) > 2 {
        match quadratic_factor(&rest) {
            Some((b, cc)) => {
                rest = rest.divrem(&Poly::monic_quadratic(b.clone(), cc.clone())).0;
                factors.push(Factor::quadratic(b, cc)?);
            }
            None => {
                return Err(CurveError::UnsupportedFactorProfile(format!(
                    "irreducible factor of degree {} ({rest})",
                    rest.degree().unwrap()
                )))
            }
        }
    }
    if rest.degree() == Some(2) {
        factors.push(Factor::quadratic(rest.coeff(1), rest.coeff(0))?);
    }
    Ok(FactoredSextic { unit: c.leading().clone(), factors })
}

fn factor_key(f: &Factor) -> (usize, Vec<Rational>) {
    (f.degree(), f.coeffs.clone())
}

/// Factorization into linear and quadratic irreducible factors over **Q**.
///
/// Even sextics go through the cubic in `u = X^2`; other sextics through
/// rational roots and verified quadratic factors. For family curves the
/// factors are listed as `X^2 + p, X^2 + 2p, X^2 + a` when irreducible.
pub fn factor_sextic(c: &Genus2Curve) -> Result<FactoredSextic, CurveError> {
    let mut fs = if c.is_even() { factor_even(c)? } else { factor_general(c)? };
    fs.factors.sort_by_key(factor_key);
    if let Some(FamilyParams { p, a }) = c.family {
        let order = [p as i128, 2 * p as i128, a as i128];
        let pos = |f: &Factor| {
            order
                .iter()
                .position(|&k| f.degree() == 2 && f.coeffs[0] == Rational::from_integer(k.into()) && f.coeffs[1].is_zero())
                .unwrap_or(3)
        };
        fs.factors.sort_by_key(|f| (pos(f), factor_key(f)));
    }
    debug_assert_eq!(fs.expand(), c.poly());
    Ok(fs)
}

/// Label of a root of `F`: factor index and which conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootLabel {
    pub factor: usize,
    pub conjugate: bool,
}

fn root_labels(fs: &FactoredSextic) -> Vec<RootLabel> {
    let mut v = Vec::new();
    for (i, f) in fs.factors.iter().enumerate() {
        v.push(RootLabel { factor: i, conjugate: false });
        if f.degree() == 2 {
            v.push(RootLabel { factor: i, conjugate: true });
        }
    }
    v
}

/// The Galois action on the roots factors through the multiquadratic field
/// generated by the `sqrt(d_i)`. It is recorded as the set of realizable flip
/// patterns: `flip[i]` says whether the conjugation of factor `i` is applied.
/// A pattern is realizable iff it is trivial on every product of the `d_i`
/// that is a rational square.
pub fn galois_flips(fs: &FactoredSextic) -> Vec<Vec<bool>> {
    let quad: Vec<usize> = (0..fs.factors.len()).filter(|&i| fs.factors[i].degree() == 2).collect();
    let m = quad.len();
    let mut relations = Vec::new();
    for mask in 1u32..(1 << m) {
        let prod = (0..m)
            .filter(|k| mask >> k & 1 == 1)
            .fold(BigInt::one(), |acc, k| acc * fs.factors[quad[k]].d());
        if rational_sqrt(&Rational::from_integer(prod)).is_some() {
            relations.push(mask);
        }
    }
    let mut out = Vec::new();
    for f in 0u32..(1 << m) {
        if relations.iter().all(|r| (r & f).count_ones() % 2 == 0) {
            let mut flip = vec![false; fs.factors.len()];
            for k in 0..m {
                flip[quad[k]] = f >> k & 1 == 1;
            }
            out.push(flip);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaConditions {
    /// `F` has no rational root.
    pub cond_i: bool,
    /// No splitting of the six roots into two 3-sets that are each defined over
    /// **Q** or are conjugate over a quadratic field.
    pub cond_ii: bool,
    /// Galois-stable 3|3 partitions, listed by the 3-set containing root 0.
    pub stable_partitions: Vec<Vec<RootLabel>>,
    /// Number of realizable flip patterns (the order of the Galois image).
    pub galois_order: usize,
}

pub fn lemma_conditions(fs: &FactoredSextic) -> LemmaConditions {
    let labels = root_labels(fs);
    let flips = galois_flips(fs);
    let act = |flip: &[bool], r: RootLabel| RootLabel { factor: r.factor, conjugate: r.conjugate ^ flip[r.factor] };
    let mut stable = Vec::new();
    for i in 1..6 {
        for j in i + 1..6 {
            let set = [labels[0], labels[i], labels[j]];
            let inside = |r: &RootLabel| set.contains(r);
            let ok = flips.iter().all(|f| {
                let img: Vec<RootLabel> = set.iter().map(|&r| act(f, r)).collect();
                img.iter().all(inside) || img.iter().all(|r| !inside(r))
            });
            if ok {
                stable.push(set.to_vec());
            }
        }
    }
    LemmaConditions {
        cond_i: fs.factors.iter().all(|f| f.degree() != 1),
        cond_ii: stable.is_empty(),
        stable_partitions: stable,
        galois_order: flips.len(),
    }
}

/// A rational 2-torsion class: the two Weierstrass points cut out by a monic
/// rational quadratic `q | F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionClass {
    #[serde(with = "crate::algebra::serde_rational::vec")]
    pub quadratic: Vec<Rational>,
    pub factors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoTorsionBasis {
    pub dim: u32,
    pub classes: Vec<TorsionClass>,
}

pub fn two_torsion(fs: &FactoredSextic) -> TwoTorsionBasis {
    let mut classes = Vec::new();
    let n = fs.factors.len();
    for i in 0..n {
        let fi = &fs.factors[i];
        if fi.degree() == 2 {
            classes.push(TorsionClass { quadratic: fi.coeffs.clone(), factors: vec![i] });
        }
        for j in i + 1..n {
            let fj = &fs.factors[j];
            if fi.degree() == 1 && fj.degree() == 1 {
                classes.push(TorsionClass { quadratic: fi.poly().mul(&fj.poly()).coeffs().to_vec(), factors: vec![i, j] });
            }
        }
    }
    let count = classes.len() + 1;
    assert!(count.is_power_of_two(), "2-torsion count {count} is not a power of two");
    TwoTorsionBasis { dim: count.trailing_zeros(), classes }
}

impl fmt::Display for FactoredSextic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.unit))?;
        for fac in &self.factors {
            write!(f, " * ({fac})")?;
        }
        Ok(())
    }
}
