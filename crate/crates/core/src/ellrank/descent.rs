//! Complete 2-descent on `Y^2 = (X - e1)(X - e2)(X - e3)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::search::{cover_search, point_search};
use super::{EllError, EllipticCurve, Point};
use crate::algebra::{
    factor_integer, fmt_rational, is_square_in_qp, nullspace, qp_square_class, square_class_dim, squarefree_part,
    F2Span, Place, Rational,
};

/// `delta(P) = (x - e1, x - e2)` in `(Q^* / Q^*2)^2`, as rationals.
pub fn delta(e: &EllipticCurve, p: &Point) -> (Rational, Rational) {
    let Some((x, _)) = p else {
        return (Rational::one(), Rational::one());
    };
    let [e1, e2, e3] = [0, 1, 2].map(|i| Rational::from_integer(e.e[i].clone()));
    let d1 = x - &e1;
    let d2 = x - &e2;
    if d1.is_zero() {
        ((&e1 - &e2) * (&e1 - &e3), e1 - e2)
    } else if d2.is_zero() {
        (e2.clone() - &e1, (&e2 - &e1) * (&e2 - e3))
    } else {
        (d1, d2)
    }
}

/// Primes where the descent has to look: 2 and the primes of `e_i - e_j`.
pub fn bad_primes(e: &EllipticCurve) -> Vec<u64> {
    let mut out = BTreeSet::from([2u64]);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = &e.e[i] - &e.e[j];
        for p in factor_integer(&d).expect("distinct roots").primes() {
            out.insert(p.to_u64().expect("prime fits in u64"));
        }
    }
    out.into_iter().collect()
}

/// Coordinates for square classes supported on `{-1} + S`.
#[derive(Debug, Clone)]
struct Coords {
    primes: Vec<u64>,
}

impl Coords {
    fn width(&self) -> usize {
        self.primes.len() + 1
    }

    /// Bit 0 is the sign, bit `i + 1` the parity of `v_{p_i}`.
    fn encode(&self, q: &Rational) -> Option<u64> {
        let (d, _) = squarefree_part(q).ok()?;
        let mut bits = u64::from(d.is_negative());
        let mut rest = d.abs();
        for (i, &p) in self.primes.iter().enumerate() {
            let pb = BigInt::from(p);
            if (&rest % &pb).is_zero() {
                bits |= 1 << (i + 1);
                rest /= pb;
            }
        }
        rest.is_one().then_some(bits)
    }

    fn decode(&self, bits: u64) -> BigInt {
        let mut d = if bits & 1 == 1 { -BigInt::one() } else { BigInt::one() };
        for (i, &p) in self.primes.iter().enumerate() {
            if bits >> (i + 1) & 1 == 1 {
                d *= p;
            }
        }
        d
    }

    fn encode_pair(&self, (a, b): &(Rational, Rational)) -> u64 {
        let a = self.encode(a).expect("class supported on the bad primes");
        let b = self.encode(b).expect("class supported on the bad primes");
        a | b << self.width()
    }

    fn decode_pair(&self, v: u64) -> (BigInt, BigInt) {
        let mask = (1u64 << self.width()) - 1;
        (self.decode(v & mask), self.decode(v >> self.width()))
    }
}

/// `delta_v(E(Q_v))` for one place, spanned by sampled local points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalImage {
    pub place: Place,
    pub dim: usize,
    /// `x`-coordinates of local points whose images form a basis.
    #[serde(with = "crate::algebra::serde_rational::vec")]
    pub witnesses: Vec<Rational>,
}

fn local_class_pair(pair: &(Rational, Rational), place: Place) -> u64 {
    let w = square_class_dim(place);
    u64::from(qp_square_class(&pair.0, place)) | u64::from(qp_square_class(&pair.1, place)) << w
}

/// Expected dimension of `E(Q_v)/2E(Q_v)` with full rational 2-torsion.
fn expected_local_dim(place: Place) -> usize {
    match place {
        Place::Real => 1,
        Place::Prime(2) => 3,
        Place::Prime(_) => 2,
    }
}

fn local_candidates(e: &EllipticCurve, p: u64) -> Vec<Rational> {
    let mut xs = Vec::new();
    let pr = Rational::from_integer(BigInt::from(p));
    let ts: Vec<i64> = (-(2 * p as i64 + 3)..=(2 * p as i64 + 3)).filter(|&t| t != 0).collect();
    for k in -6i32..=8 {
        let pk = pr.pow(k);
        for r in &e.e {
            for &t in &ts {
                xs.push(Rational::from_integer(r.clone()) + Rational::from_integer(t.into()) * &pk);
            }
        }
        for &t in &ts {
            xs.push(Rational::from_integer(t.into()) * &pk);
        }
    }
    xs
}

/// Finds the image of the local Kummer map at `place` by sampling points
/// until the known dimension is reached.
pub fn local_image(e: &EllipticCurve, place: Place) -> Result<(LocalImage, F2Span), EllError> {
    let want = expected_local_dim(place);
    let mut span = F2Span::new();
    let mut witnesses = Vec::new();
    let mut consider = |x: &Rational, span: &mut F2Span| {
        let pt: Point = Some((x.clone(), Rational::zero()));
        let img = local_class_pair(&delta(e, &pt), place);
        if span.insert(img) {
            witnesses.push(x.clone());
        }
    };
    for t in e.two_torsion() {
        consider(&t.unwrap().0, &mut span);
    }
    let candidates = match place {
        Place::Real => (-50..=50).map(|n| Rational::from_integer(n.into())).chain(e.e.iter().map(|r| Rational::from_integer(r + 1))).collect(),
        Place::Prime(p) => local_candidates(e, p),
    };
    for x in candidates {
        if span.dim() >= want {
            break;
        }
        let y2 = e.rhs(&x);
        if y2.is_zero() || !is_square_in_qp(&y2, place).expect("prime place") {
            continue;
        }
        consider(&x, &mut span);
    }
    if span.dim() != want {
        return Err(EllError::LocalImage { place: place.to_string(), got: span.dim(), want });
    }
    Ok((LocalImage { place, dim: want, witnesses }, span))
}

/// The 2-Selmer group, as pairs `(b1, b2)` of squarefree integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerGroup {
    pub dim: usize,
    pub basis: Vec<(String, String)>,
    pub local_images: Vec<LocalImage>,
    pub primes: Vec<u64>,
}

impl SelmerGroup {
    fn coords(&self) -> Coords {
        Coords { primes: self.primes.clone() }
    }

    /// The group as packed bit vectors, rebuilt from the listed basis.
    pub(crate) fn span(&self) -> F2Span {
        let coords = self.coords();
        let mut span = F2Span::new();
        for (a, b) in &self.basis {
            let a: BigInt = a.parse().expect("integer basis entry");
            let b: BigInt = b.parse().expect("integer basis entry");
            span.insert(coords.encode_pair(&(Rational::from_integer(a), Rational::from_integer(b))));
        }
        span
    }

    pub fn contains(&self, pair: &(Rational, Rational)) -> bool {
        let coords = self.coords();
        coords
            .encode(&pair.0)
            .zip(coords.encode(&pair.1))
            .is_some_and(|(a, b)| self.span().contains(a | b << coords.width()))
    }

    /// All elements as `(b1, b2)`.
    pub fn elements(&self) -> Vec<(BigInt, BigInt)> {
        self.span().elements().into_iter().map(|v| self.coords().decode_pair(v)).collect()
    }
}

/// `Sel^(2)(E/Q)`: classes supported on the bad primes whose restriction to
/// every bad place lands in the local image.
pub fn selmer_group(e: &EllipticCurve) -> Result<SelmerGroup, EllError> {
    let primes = bad_primes(e);
    let places: Vec<Place> = std::iter::once(Place::Real).chain(primes.iter().map(|&p| Place::Prime(p))).collect();
    let images = places.iter().map(|&pl| local_image(e, pl)).collect::<Result<Vec<_>, _>>()?;
    Ok(selmer_from_images(primes, images))
}

fn selmer_from_images(primes: Vec<u64>, images: Vec<(LocalImage, F2Span)>) -> SelmerGroup {
    let coords = Coords { primes: primes.clone() };
    let w = coords.width();
    let n = 2 * w;
    assert!(n <= 64, "too many bad primes for packed descent");
    // restriction of each global basis vector, then orthogonality to the
    // annihilator of the local image
    let mut constraints: Vec<u64> = Vec::new();
    let mut local_images = Vec::new();
    for (img, span) in images {
        let place = img.place;
        local_images.push(img);
        let dv = square_class_dim(place);
        let mut res = Vec::with_capacity(n);
        for bit in 0..n {
            let q = Rational::from_integer(coords.decode(if bit < w { 1 << bit } else { 1 << (bit - w) }));
            let c = u64::from(qp_square_class(&q, place));
            res.push(if bit < w { c } else { c << dv });
        }
        for a in nullspace(span.basis(), 2 * dv) {
            let mut row = 0u64;
            for (bit, r) in res.iter().enumerate() {
                if crate::algebra::dot(*r, a) {
                    row |= 1 << bit;
                }
            }
            constraints.push(row);
        }
    }
    let mut span = F2Span::new();
    for v in nullspace(&constraints, n) {
        span.insert(v);
    }
    let basis = span
        .basis()
        .iter()
        .map(|&v| {
            let (a, b) = coords.decode_pair(v);
            (a.to_string(), b.to_string())
        })
        .collect();
    SelmerGroup { dim: span.dim(), basis, local_images, primes }
}

/// Rebuilds a local image from its witnesses, checking each is the
/// `x`-coordinate of a `Q_v`-point.
fn replay_local_image(e: &EllipticCurve, img: &LocalImage) -> Result<F2Span, String> {
    let mut span = F2Span::new();
    for x in &img.witnesses {
        let y2 = e.rhs(x);
        if !y2.is_zero() && !is_square_in_qp(&y2, img.place).map_err(|err| err.to_string())? {
            return Err(format!("witness x = {} is not a point over {}", fmt_rational(x), img.place));
        }
        span.insert(local_class_pair(&delta(e, &Some((x.clone(), Rational::zero()))), img.place));
    }
    if span.dim() != expected_local_dim(img.place) || img.dim != span.dim() {
        return Err(format!("local image at {} has dimension {}, expected {}", img.place, span.dim(), expected_local_dim(img.place)));
    }
    Ok(span)
}

/// Re-checks a stored descent from its witnesses: local points, the Selmer
/// group they determine, and the images of the listed generators.
pub fn verify_descent(d: &DescentResult) -> Result<(), String> {
    let e = &d.curve;
    let primes = bad_primes(e);
    if primes != d.selmer.primes {
        return Err(format!("bad primes {:?} do not match {:?}", d.selmer.primes, primes));
    }
    let places: Vec<Place> = std::iter::once(Place::Real).chain(primes.iter().map(|&p| Place::Prime(p))).collect();
    let listed: Vec<Place> = d.selmer.local_images.iter().map(|i| i.place).collect();
    if listed != places {
        return Err("local images do not cover the bad places".into());
    }
    let images = d
        .selmer
        .local_images
        .iter()
        .map(|img| Ok((img.clone(), replay_local_image(e, img)?)))
        .collect::<Result<Vec<_>, String>>()?;
    let replayed = selmer_from_images(primes, images);
    let (stored, again) = (d.selmer.span(), replayed.span());
    if d.selmer.dim != stored.dim() || again.dim() != stored.dim() || !stored.basis().iter().all(|&v| again.contains(v)) {
        return Err("Selmer group does not match its local images".into());
    }
    let coords = d.selmer.coords();
    let mut span = F2Span::new();
    for t in e.two_torsion() {
        span.insert(coords.encode_pair(&delta(e, &t)));
    }
    if d.generators.len() != d.generator_images.len() {
        return Err("generator images missing".into());
    }
    for (g, (b1, b2)) in d.generators.iter().zip(&d.generator_images) {
        let pt = Some(g.clone());
        if !e.contains(&pt) {
            return Err(format!("generator ({}, {}) is not on the curve", fmt_rational(&g.0), fmt_rational(&g.1)));
        }
        let v = coords.encode_pair(&delta(e, &pt));
        let (c1, c2) = coords.decode_pair(v);
        if c1.to_string() != *b1 || c2.to_string() != *b2 || !stored.contains(v) {
            return Err("generator image is wrong or outside the Selmer group".into());
        }
        span.insert(v);
    }
    let upper = stored.dim() as u32 - 2;
    let lower = span.dim() as u32 - 2;
    let rank = (lower == upper).then_some(lower);
    if (d.lower, d.upper, d.rank, d.sha2_dim) != (lower, upper, rank, rank.map(|_| 0)) {
        return Err("rank bounds do not follow from the listed evidence".into());
    }
    Ok(())
}

/// Outcome of a 2-descent: the rank is pinned when both bounds agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentResult {
    pub curve: EllipticCurve,
    pub selmer: SelmerGroup,
    /// Points on the integral model whose images, with the 2-torsion, span
    /// the image of `E(Q)/2E(Q)`.
    #[serde(with = "point_list")]
    pub generators: Vec<(Rational, Rational)>,
    pub lower: u32,
    pub upper: u32,
    /// `Some(r)` iff `lower == upper`, which also forces `Sha[2] = 0`.
    pub rank: Option<u32>,
    /// `dim Sha[2]`, known (and zero) exactly when the rank is.
    pub sha2_dim: Option<u32>,
    /// Squarefree `delta` images of the generators.
    pub generator_images: Vec<(String, String)>,
}

mod point_list {
    use super::{fmt_rational, Rational};
    use crate::algebra::parse_rational;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(Rational, Rational)], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|(x, y)| [fmt_rational(x), fmt_rational(y)]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Rational, Rational)>, D::Error> {
        Vec::<[String; 2]>::deserialize(d)?
            .into_iter()
            .map(|[x, y]| {
                let x = parse_rational(&x).ok_or_else(|| D::Error::custom("bad x"))?;
                let y = parse_rational(&y).ok_or_else(|| D::Error::custom("bad y"))?;
                Ok((x, y))
            })
            .collect()
    }
}

/// Search bounds for the descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentBounds {
    /// `|m|, n^2 <= height` for `x = m / n^2`.
    pub height: i64,
    /// `r, s <= cover` on each 2-covering.
    pub cover: i64,
}

impl Default for DescentBounds {
    fn default() -> Self {
        Self { height: 10_000, cover: 300 }
    }
}

/// Runs the full descent: Selmer group, naive point search, then a search on
/// the 2-coverings of every Selmer class not yet explained by a point.
pub fn two_descent(e: &EllipticCurve, bounds: DescentBounds) -> Result<DescentResult, EllError> {
    let selmer = selmer_group(e)?;
    let sel_span = selmer.span();
    let coords = selmer.coords();
    let mut span = F2Span::new();
    for t in e.two_torsion() {
        span.insert(coords.encode_pair(&delta(e, &t)));
    }
    let mut generators = Vec::new();
    let mut take = |pt: (Rational, Rational), span: &mut F2Span| {
        let v = coords.encode_pair(&delta(e, &Some(pt.clone())));
        debug_assert!(sel_span.contains(v), "image of a rational point lies in the Selmer group");
        if span.insert(v) {
            generators.push(pt);
        }
    };
    for pt in point_search(e, bounds.height) {
        if span.dim() == selmer.dim {
            break;
        }
        take((pt.x, pt.y), &mut span);
    }
    if span.dim() < selmer.dim {
        for v in sel_span.elements() {
            if span.contains(v) {
                continue;
            }
            let (b1, b2) = coords.decode_pair(v);
            if let Some(pt) = cover_search(e, &b1, &b2, bounds.cover) {
                take(pt, &mut span);
            }
            if span.dim() == selmer.dim {
                break;
            }
        }
    }
    let upper = (selmer.dim - 2) as u32;
    let lower = (span.dim() - 2) as u32;
    let rank = (lower == upper).then_some(lower);
    let generator_images = generators
        .iter()
        .map(|g| {
            let (b1, b2) = coords.decode_pair(coords.encode_pair(&delta(e, &Some(g.clone()))));
            (b1.to_string(), b2.to_string())
        })
        .collect();
    Ok(DescentResult {
        curve: e.clone(),
        selmer,
        generators,
        lower,
        upper,
        rank,
        sha2_dim: rank.map(|_| 0),
        generator_images,
    })
}
