//! Solvability of `Y^2 = F(X)` over **R** and over each `Q_p`.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    factor_integer, is_prime, is_square_in_qp, padic_sqrt, qp_square_class, valuation, AlgebraError, Place,
    Rational,
};
use crate::curve::{self, Genus2Curve};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("disc search at p = {p} reached depth bound {bound} without a decision")]
    DepthExhausted { p: u64, bound: u32 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Which affine piece of the two-chart cover a witness lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// `x` in `Z_p`, equation `Y^2 = F(x)`.
    Affine,
    /// `x' = 1/x` in `p Z_p`, equation `Y'^2 = x'^6 F(1/x')`.
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// One of `2, -p, -2p` is a square at the place, giving a point at
    /// infinity or a Weierstrass point of a family curve.
    FastPath {
        #[serde(with = "crate::algebra::serde_rational")]
        square: Rational,
        point: String,
    },
    /// `f6 > 0`, so the points at infinity are real.
    LeadingCoefficient,
    /// `F` has real roots, giving real Weierstrass points.
    RealRoots { count: usize },
    /// `f6 < 0` and `F` has no real root, so `F < 0` on **R**.
    NegativeDefinite,
    /// `F(x)` (or its reversed form) is a nonzero square in `Q_p`.
    Point {
        chart: Chart,
        #[serde(with = "crate::algebra::serde_rational")]
        x: Rational,
        valuation: i64,
        /// Newton iterates for the square root of the unit part of `F(x)`,
        /// each paired with the valuation of its error.
        #[serde(with = "newton_serde")]
        newton: Vec<(BigInt, i64)>,
        precision: u32,
    },
    /// `x` is a rational root of the chart polynomial, so `(x, 0)` is a point.
    Weierstrass {
        chart: Chart,
        #[serde(with = "crate::algebra::serde_rational")]
        x: Rational,
    },
    /// Every residue disc of both charts was refuted.
    Exhausted { max_depth: u32, bound: u32, discs: u64 },
}

mod newton_serde {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(BigInt, i64)], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|(a, e)| (a.to_string(), *e)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigInt, i64)>, D::Error> {
        Vec::<(String, i64)>::deserialize(d)?
            .into_iter()
            .map(|(a, e)| Ok((a.parse().map_err(|_| D::Error::custom(format!("bad integer {a:?}")))?, e)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReport {
    pub place: Place,
    pub solvable: bool,
    pub evidence: Evidence,
}

/// Precision used for recorded Newton iterates.
const WITNESS_PRECISION: u32 = 40;

/// `F` scaled by a square so that all coefficients are integers.
pub fn integral_model(f: &Poly) -> Poly {
    let l = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    f.scale(&Rational::from_integer(&l * &l))
}

fn chart_poly(f: &Poly, chart: Chart) -> Poly {
    match chart {
        Chart::Affine => f.clone(),
        Chart::Infinity => f.reversed(6),
    }
}

/// Places that need an explicit check: 2, the primes up to 13, and the primes
/// of bad reduction of the integral model. At any other prime the reduction is
/// a smooth genus-2 curve with at least `p + 1 - 4 sqrt(p) > 0` points over
/// `F_p`, and a smooth point lifts by Hensel's lemma.
pub fn relevant_primes(c: &Genus2Curve) -> BTreeSet<u64> {
    let f = integral_model(&c.poly());
    let disc = crate::poly::discriminant(&f);
    let mut out: BTreeSet<u64> = [2u64, 3, 5, 7, 11, 13].into_iter().collect();
    for m in [disc.numer().clone(), disc.denom().clone(), f.leading().to_integer()] {
        if m.abs() <= BigInt::one() {
            continue;
        }
        for p in factor_integer(&m).expect("nonzero").primes() {
            out.insert(p.to_u64().expect("bad prime fits in u64"));
        }
    }
    out
}

pub fn has_real_point(c: &Genus2Curve) -> LocalReport {
    let evidence = if c.leading().is_positive() {
        Evidence::LeadingCoefficient
    } else {
        match c.poly().count_real_roots() {
            0 => Evidence::NegativeDefinite,
            n => Evidence::RealRoots { count: n },
        }
    };
    let solvable = !matches!(evidence, Evidence::NegativeDefinite);
    LocalReport { place: Place::Real, solvable, evidence }
}

/// For `Y^2 = 2(X^2+p)(X^2+2p)(X^2+a)`: a point at infinity when 2 is a square
/// at the place, a Weierstrass point `(sqrt(-p), 0)` or `(sqrt(-2p), 0)` when
/// `-p` or `-2p` is.
pub fn family_fast_path(p: u64, a: i64, place: Place) -> Option<LocalReport> {
    let _ = a;
    let cands = [
        (Rational::from_integer(2.into()), "infinity"),
        (Rational::from_integer(-BigInt::from(p)), "weierstrass"),
        (Rational::from_integer(-BigInt::from(2 * p)), "weierstrass"),
    ];
    for (sq, point) in cands {
        if is_square_in_qp(&sq, place).ok()? {
            return Some(LocalReport {
                place,
                solvable: true,
                evidence: Evidence::FastPath { square: sq, point: point.to_string() },
            });
        }
    }
    None
}

fn pow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// Search state for one prime.
struct DiscSearch {
    p: u64,
    bound: u32,
    discs: u64,
    max_depth: u32,
}

impl DiscSearch {
    /// Minimum number of extra digits that pin down the square class of a unit.
    fn unit_precision(&self) -> i64 {
        if self.p == 2 {
            3
        } else {
            1
        }
    }

    /// Examines the disc `{c + p^k t : t in Z_p}` of the chart polynomial.
    fn examine(&mut self, poly: &Poly, c: &BigInt, k: u32) -> DiscState {
        self.discs += 1;
        self.max_depth = self.max_depth.max(k);
        let shifted = poly.shift(&Rational::from_integer(c.clone()));
        let pk = Rational::from_integer(pow(self.p, k));
        let mut scale = Rational::one();
        let mut taylor = Vec::with_capacity(shifted.coeffs().len());
        for coef in shifted.coeffs() {
            taylor.push(coef * &scale);
            scale *= &pk;
        }
        let q0 = taylor.first().cloned().unwrap_or_else(Rational::zero);
        if q0.is_zero() {
            return DiscState::Root;
        }
        if qp_square_class(&q0, Place::Prime(self.p)) == 0 {
            return DiscState::Square;
        }
        let v0 = valuation(&q0, self.p);
        let m = taylor[1..].iter().filter(|x| !x.is_zero()).map(|x| valuation(x, self.p)).min();
        let gap = m.map_or(i64::MAX, |m| m - v0);
        let settled = if v0 % 2 != 0 { gap >= 1 } else { gap >= self.unit_precision() };
        if settled {
            DiscState::Refuted
        } else {
            DiscState::Open
        }
    }

    /// Breadth-first refinement over both charts. Discs around a `p`-adic
    /// root never settle on their own, so siblings at the same depth are
    /// examined before anything deeper.
    fn run(&mut self, f: &Poly) -> Result<Option<(Chart, BigInt, bool)>, LocalError> {
        let polys = [chart_poly(f, Chart::Affine), chart_poly(f, Chart::Infinity)];
        let mut queue: VecDeque<(usize, BigInt, u32)> = VecDeque::new();
        queue.push_back((0, BigInt::zero(), 0));
        queue.push_back((1, BigInt::zero(), 1));
        let charts = [Chart::Affine, Chart::Infinity];
        while let Some((ci, c, k)) = queue.pop_front() {
            match self.examine(&polys[ci], &c, k) {
                DiscState::Root => return Ok(Some((charts[ci], c, true))),
                DiscState::Square => return Ok(Some((charts[ci], c, false))),
                DiscState::Refuted => {}
                DiscState::Open => {
                    if k >= self.bound {
                        return Err(LocalError::DepthExhausted { p: self.p, bound: self.bound });
                    }
                    let step = pow(self.p, k);
                    for j in 0..self.p {
                        queue.push_back((ci, &c + &step * BigInt::from(j), k + 1));
                    }
                }
            }
        }
        Ok(None)
    }
}

enum DiscState {
    Root,
    Square,
    Refuted,
    Open,
}

fn newton_witness(value: &Rational, p: u64) -> (i64, Vec<(BigInt, i64)>) {
    let v = valuation(value, p);
    let unit = value / Rational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32)).pow(v.signum() as i32);
    let steps = padic_sqrt(&unit, p, WITNESS_PRECISION, 3).expect("unit part of a square is a unit square");
    (v, steps.into_iter().map(|s| (s.approx, s.error_valuation)).collect())
}

/// Depth bound `v_p(16 disc(F) f6) + 4` on the integral model.
pub fn depth_bound(c: &Genus2Curve, p: u64) -> u32 {
    let f = integral_model(&c.poly());
    let disc = crate::poly::discriminant(&f);
    let v = valuation(&(disc * f.leading() * Rational::from_integer(16.into())), p);
    (v + 4) as u32
}

/// Decides whether the curve has a `Q_p`-point by residue-disc refinement on
/// both charts.
pub fn has_qp_point(c: &Genus2Curve, p: u64) -> Result<LocalReport, LocalError> {
    if !is_prime(&BigInt::from(p)) {
        return Err(LocalError::NotPrime(p));
    }
    let f = integral_model(&c.poly());
    let mut search = DiscSearch { p, bound: depth_bound(c, p), discs: 0, max_depth: 0 };
    if let Some((chart, x, root)) = search.run(&f)? {
        let x = Rational::from_integer(x);
        let evidence = if root {
            Evidence::Weierstrass { chart, x }
        } else {
            let (valuation, newton) = newton_witness(&chart_poly(&f, chart).eval(&x), p);
            Evidence::Point { chart, x, valuation, newton, precision: WITNESS_PRECISION }
        };
        return Ok(LocalReport { place: Place::Prime(p), solvable: true, evidence });
    }
    Ok(LocalReport {
        place: Place::Prime(p),
        solvable: false,
        evidence: Evidence::Exhausted { max_depth: search.max_depth, bound: search.bound, discs: search.discs },
    })
}

/// Re-checks a positive witness against the curve without searching.
pub fn verify_report(c: &Genus2Curve, r: &LocalReport) -> Result<(), String> {
    let f = integral_model(&c.poly());
    match (&r.evidence, r.place) {
        (Evidence::FastPath { square, point }, place) => {
            let fam = c.family().ok_or("fast path on a non-family curve")?;
            let allowed = [
                Rational::from_integer(2.into()),
                Rational::from_integer(-BigInt::from(fam.p)),
                Rational::from_integer(-BigInt::from(2 * fam.p)),
            ];
            if !allowed.contains(square) {
                return Err(format!("fast-path square {square} is not one of 2, -p, -2p"));
            }
            if (point == "infinity") != (square == &allowed[0]) {
                return Err("fast-path point label mismatch".into());
            }
            if !is_square_in_qp(square, place).map_err(|e| e.to_string())? {
                return Err(format!("{square} is not a square at {place}"));
            }
            Ok(())
        }
        (Evidence::LeadingCoefficient, Place::Real) => {
            if c.leading().is_positive() {
                Ok(())
            } else {
                Err("leading coefficient is not positive".into())
            }
        }
        (Evidence::RealRoots { count }, Place::Real) => {
            if *count > 0 && c.poly().count_real_roots() == *count {
                Ok(())
            } else {
                Err("real root count mismatch".into())
            }
        }
        (Evidence::NegativeDefinite, Place::Real) => {
            if c.leading().is_negative() && c.poly().count_real_roots() == 0 && !r.solvable {
                Ok(())
            } else {
                Err("negative-definite claim fails".into())
            }
        }
        (Evidence::Weierstrass { chart, x }, Place::Prime(p)) => {
            check_chart_domain(*chart, x, p)?;
            if chart_poly(&f, *chart).eval(x).is_zero() {
                Ok(())
            } else {
                Err(format!("{x} is not a root of the chart polynomial"))
            }
        }
        (Evidence::Point { chart, x, valuation: v, newton, precision }, Place::Prime(p)) => {
            check_chart_domain(*chart, x, p)?;
            let value = chart_poly(&f, *chart).eval(x);
            if value.is_zero() || valuation(&value, p) != *v {
                return Err("valuation mismatch".into());
            }
            if qp_square_class(&value, Place::Prime(p)) != 0 {
                return Err(format!("F({x}) is not a square in Q_{p}"));
            }
            let unit = &value / Rational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32)).pow(v.signum() as i32);
            let modulus = pow(p, *precision);
            let inv = crate::algebra::mod_inverse(unit.denom(), &modulus).ok_or("unit has p in denominator")?;
            let ures = (unit.numer() * inv).mod_floor(&modulus);
            let mut prev: Option<i64> = None;
            for (y, err) in newton {
                let diff = (y * y - &ures).mod_floor(&modulus);
                let actual = if diff.is_zero() {
                    *precision as i64
                } else {
                    crate::algebra::valuation_int(&diff, p)
                };
                if actual != *err {
                    return Err("Newton error valuation mismatch".into());
                }
                if let Some(a) = prev {
                    if actual < (2 * a - 2).min(*precision as i64) {
                        return Err("Newton iterates do not converge quadratically".into());
                    }
                }
                prev = Some(actual);
            }
            Ok(())
        }
        (Evidence::Exhausted { .. }, Place::Prime(p)) => {
            let again = has_qp_point(c, p).map_err(|e| e.to_string())?;
            if again.solvable || again.evidence != r.evidence {
                Err("exhaustion does not replay".into())
            } else {
                Ok(())
            }
        }
        (e, place) => Err(format!("evidence {e:?} does not apply at {place}")),
    }
}

fn check_chart_domain(chart: Chart, x: &Rational, p: u64) -> Result<(), String> {
    if !x.is_integer() {
        return Err("chart coordinate must be an integer representative".into());
    }
    if chart == Chart::Infinity && !(x.is_zero() || valuation(x, p) >= 1) {
        return Err("chart at infinity needs x' in pZ_p".into());
    }
    Ok(())
}

pub fn local_report(c: &Genus2Curve, place: Place) -> Result<LocalReport, LocalError> {
    if let Some(fam) = c.family() {
        if let Some(r) = family_fast_path(fam.p, fam.a, place) {
            return Ok(r);
        }
    }
    match place {
        Place::Real => Ok(has_real_point(c)),
        Place::Prime(p) => has_qp_point(c, p),
    }
}

/// The real place and every relevant prime, sorted by place.
pub fn is_everywhere_locally_solvable(c: &Genus2Curve) -> Result<(bool, Vec<LocalReport>), LocalError> {
    let mut places = vec![Place::Real];
    places.extend(relevant_primes(c).into_iter().map(Place::Prime));
    let reports = places
        .par_iter()
        .map(|&pl| local_report(c, pl))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((reports.iter().all(|r| r.solvable), reports))
}

/// Discriminant of the integral model, exposed for certificates.
pub fn integral_discriminant(c: &Genus2Curve) -> Rational {
    curve::discriminant(&Genus2Curve::new(integral_model(&c.poly()).coeffs().to_vec()).expect("same curve"))
}
