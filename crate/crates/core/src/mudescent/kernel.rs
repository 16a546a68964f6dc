//! Deciding whether `ker mu = 2 J(Q)` from the pulled-back quotient points.
//!
//! Let `G = phi1^* E1(Q) + phi2^* E2(Q)`. Since `phi1^* phi1_* + phi2^* phi2_* = 2`
//! on `J`, `2 J(Q)` lies in `G`, and the images of the quotient generators and
//! their 2-torsion span `mu(G)`. If that span has dimension `rank + dim J(Q)[2]`
//! then `mu` is injective on `J(Q)/2J(Q)`. A smaller span only proves
//! `ker mu != 2J(Q)` once `G = J(Q)` is known, which [`saturation_check`]
//! establishes class by class in `E1(Q)/2E1(Q)`.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{class_is_trivial, f2_rank, mu, BooleanClass, DivisorClass, MuError, Relation};
use crate::algebra::{factor_integer, hilbert_symbol, is_rational_square, F2Span, Place, Rational};
use crate::curve::{FactoredSextic, Genus2Curve, LemmaConditions, TorsionClass, TwoTorsionBasis};
use crate::ellrank::{pullback, DescentResult, EllipticCurve, Point, Quotient};

/// A named generator of `G/2G` with its image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedClass {
    pub label: String,
    pub divisor: DivisorClass,
    pub mu: BooleanClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelVerdict {
    /// `ker mu = 2 J(Q)`.
    Equal,
    /// `ker mu` is strictly larger than `2 J(Q)`.
    Larger,
    /// The images are dependent but `G = J(Q)` could not be shown.
    Unknown,
}

/// Solubility of `Y^2 - c Z^2 = A` over **Q**, decided by Hilbert symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicTest {
    #[serde(with = "crate::algebra::serde_rational")]
    pub c: Rational,
    #[serde(with = "crate::algebra::serde_rational")]
    pub a: Rational,
    /// Places where `(c, A)_v = -1`; empty iff the conic has a rational point.
    pub obstructions: Vec<Place>,
}

impl KernelReport {
    /// `ker mu = 2 J(Q)`.
    pub fn kernel_is_2j(&self) -> bool {
        self.verdict == KernelVerdict::Equal
    }
}

/// No rational divisor class of degree one exists when `F` has no rational
/// root, no Galois-stable 3|3 splitting of its roots, and `ker mu = 2 J(Q)`.
/// `false` means "not shown", not "exists".
pub fn no_rational_divisor_class_deg1(lemma: &LemmaConditions, kernel: KernelVerdict) -> bool {
    lemma.cond_i && lemma.cond_ii && kernel == KernelVerdict::Equal
}

impl ConicTest {
    pub fn new(c: Rational, a: Rational) -> Self {
        let mut places = vec![Place::Real, Place::Prime(2)];
        for q in [&c, &a] {
            for part in [q.numer(), q.denom()] {
                if part.is_zero() {
                    continue;
                }
                for p in factor_integer(part).expect("nonzero").primes() {
                    let p = Place::Prime(p.to_u64().expect("small prime"));
                    if !places.contains(&p) {
                        places.push(p);
                    }
                }
            }
        }
        places.sort();
        let obstructions = if is_rational_square(&c) {
            Vec::new()
        } else {
            places.into_iter().filter(|&v| hilbert_symbol(&c, &a, v) == -1).collect()
        };
        Self { c, a, obstructions }
    }

    pub fn soluble(&self) -> bool {
        self.obstructions.is_empty()
    }
}

/// One nonzero class of `E1(Q)/2E1(Q)` and why no `Z` in `J(Q)` has
/// `phi1_* Z` in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationEntry {
    pub label: String,
    /// `mu(phi1^* c) mu(phi2^* X)` is nontrivial for every `X` in
    /// `E2(Q)/2E2(Q)`, which `2Z = phi1^* c + phi2^* phi2_* Z` rules out.
    pub excluded_by_mu: bool,
    /// For a 2-torsion class: the conic whose rational points parametrize the
    /// `Z` with `phi1_* Z = tau`.
    pub conic: Option<ConicTest>,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub entries: Vec<SaturationEntry>,
    /// `G = J(Q)`.
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub generators: Vec<NamedClass>,
    /// `rank J(Q) + dim J(Q)[2]`.
    pub expected: usize,
    pub f2_rank: usize,
    pub relations: Vec<Relation>,
    pub saturation: Option<SaturationReport>,
    pub verdict: KernelVerdict,
}

fn raw_point(e: &EllipticCurve, p: &(Rational, Rational)) -> Point {
    e.to_raw(&Some(p.clone()))
}

/// Raw 2-torsion points of a quotient, first two of the three (a basis).
fn raw_torsion_basis(e: &EllipticCurve) -> Vec<Point> {
    e.two_torsion().iter().take(2).map(|t| e.to_raw(t)).collect()
}

struct QuotientGens {
    /// Labelled raw points: generators first, then a 2-torsion basis.
    points: Vec<(String, Point)>,
    classes: Vec<BooleanClass>,
}

fn quotient_gens(
    c: &Genus2Curve,
    fs: &FactoredSextic,
    which: Quotient,
    d: &DescentResult,
) -> Result<QuotientGens, MuError> {
    let tag = match which {
        Quotient::E1 => 1,
        Quotient::E2 => 2,
    };
    let mut points = Vec::new();
    for (k, g) in d.generators.iter().enumerate() {
        points.push((format!("P{tag}_{}", k + 1), raw_point(&d.curve, g)));
    }
    for (k, t) in raw_torsion_basis(&d.curve).into_iter().enumerate() {
        points.push((format!("t{tag}_{}", k + 1), t));
    }
    let mut classes = Vec::new();
    for (_, p) in &points {
        let dc = pullback(c, which, p).map_err(|_| MuError::NotOnCurve)?;
        classes.push(mu(c, fs, &dc)?);
    }
    Ok(QuotientGens { points, classes })
}

fn subset_product(fs: &FactoredSextic, classes: &[BooleanClass], mask: u32) -> BooleanClass {
    let mut acc = BooleanClass::one(fs);
    for (i, x) in classes.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc = acc.mul(x).reduce();
        }
    }
    acc
}

/// Shows `G = J(Q)` by excluding every nonzero class of `E1(Q)/2E1(Q)` from
/// `phi1_*(J(Q))`, using `mu` where possible and, for 2-torsion classes
/// `tau = (r, 0)`, insolubility of `(n + r)^2 - r s^2 = (r - r')(r - r'')`.
pub fn saturation_check(
    c: &Genus2Curve,
    fs: &FactoredSextic,
    d1: &DescentResult,
    d2: &DescentResult,
) -> Result<SaturationReport, MuError> {
    let g1 = quotient_gens(c, fs, Quotient::E1, d1)?;
    let g2 = quotient_gens(c, fs, Quotient::E2, d2)?;
    let n1 = g1.classes.len();
    let n2 = g2.classes.len();
    let ngen1 = d1.generators.len();
    let raw_roots: Vec<Rational> = d1.curve.two_torsion().iter().map(|t| d1.curve.to_raw(t).unwrap().0).collect();
    let mut entries = Vec::new();
    for mask in 1u32..(1 << n1) {
        let label = (0..n1).filter(|i| mask >> i & 1 == 1).map(|i| g1.points[i].0.clone()).collect::<Vec<_>>().join("+");
        let x1 = subset_product(fs, &g1.classes, mask);
        let excluded_by_mu =
            (0..1u32 << n2).all(|m2| class_is_trivial(&x1.mul(&subset_product(fs, &g2.classes, m2))).is_none());
        // pure torsion classes: torsion bits only
        let torsion_bits = mask >> ngen1;
        let conic = if mask & ((1 << ngen1) - 1) == 0 {
            // t_1, t_2 and t_1 + t_2 = t_3
            let j = match torsion_bits {
                1 => 0,
                2 => 1,
                _ => 2,
            };
            let r = raw_roots[j].clone();
            let others: Vec<&Rational> = (0..3).filter(|&k| k != j).map(|k| &raw_roots[k]).collect();
            let a = (&r - others[0]) * (&r - others[1]);
            Some(ConicTest::new(r, a))
        } else {
            None
        };
        // the conic argument needs the points at infinity of C to be irrational
        let conic_excludes = conic.as_ref().is_some_and(|t| !t.soluble()) && !is_rational_square(c.leading());
        entries.push(SaturationEntry { label, excluded_by_mu, excluded: excluded_by_mu || conic_excludes, conic });
    }
    let saturated = entries.iter().all(|e| e.excluded);
    Ok(SaturationReport { entries, saturated })
}

/// A basis of `J(Q)[2]` among the listed classes. A class is the set of roots
/// of its quadratic, and sums are symmetric differences modulo the full set.
fn torsion_basis<'a>(fs: &FactoredSextic, torsion: &'a TwoTorsionBasis) -> Vec<&'a TorsionClass> {
    let mut offsets = Vec::new();
    let mut next = 0u32;
    for f in &fs.factors {
        offsets.push(next);
        next += f.degree() as u32;
    }
    let all = (1u64 << next) - 1;
    let mut span = F2Span::new();
    span.insert(all);
    let mut out = Vec::new();
    for t in &torsion.classes {
        let mask = t.factors.iter().fold(0u64, |m, &i| m | (((1u64 << fs.factors[i].degree()) - 1) << offsets[i]));
        if span.insert(mask) {
            out.push(t);
        }
    }
    debug_assert_eq!(out.len(), torsion.dim as usize);
    out
}

/// Computes `mu` on the pulled-back generators and 2-torsion and decides
/// whether `ker mu = 2 J(Q)`. Both descents must have pinned their ranks.
pub fn certify_kernel(
    c: &Genus2Curve,
    fs: &FactoredSextic,
    torsion: &TwoTorsionBasis,
    d1: &DescentResult,
    d2: &DescentResult,
) -> Result<KernelReport, MuError> {
    let r1 = d1.rank.expect("E1 rank pinned") as usize;
    let r2 = d2.rank.expect("E2 rank pinned") as usize;
    let mut generators = Vec::new();
    for (which, d) in [(Quotient::E1, d1), (Quotient::E2, d2)] {
        // quotient 2-torsion pulls back into J(Q)[2], covered below
        let g = quotient_gens(c, fs, which, d)?;
        for ((label, p), x) in g.points.into_iter().zip(g.classes).take(d.generators.len()) {
            let divisor = pullback(c, which, &p).map_err(|_| MuError::NotOnCurve)?;
            generators.push(NamedClass { label, divisor, mu: x });
        }
    }
    for (k, t) in torsion_basis(fs, torsion).into_iter().enumerate() {
        let divisor = DivisorClass::mumford(-t.quadratic[1].clone(), t.quadratic[0].clone(), Rational::zero(), Rational::zero());
        let x = mu(c, fs, &divisor)?;
        generators.push(NamedClass { label: format!("T_{}", k + 1), divisor, mu: x });
    }
    let images: Vec<BooleanClass> = generators.iter().map(|g| g.mu.clone()).collect();
    let (rank, relations) = f2_rank(&images)?;
    let expected = r1 + r2 + torsion.dim as usize;
    assert!(rank <= expected, "mu image larger than J(Q)/2J(Q)");
    let (saturation, verdict) = if rank == expected {
        (None, KernelVerdict::Equal)
    } else {
        let s = saturation_check(c, fs, d1, d2)?;
        let v = if s.saturated { KernelVerdict::Larger } else { KernelVerdict::Unknown };
        (Some(s), v)
    };
    Ok(KernelReport { generators, expected, f2_rank: rank, relations, saturation, verdict })
}
