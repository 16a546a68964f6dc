//! Point searches on `Y^2 = (X - e1)(X - e2)(X - e3)` and its 2-coverings.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use super::EllipticCurve;
use crate::algebra::{integer_sqrt_exact, rational_sqrt, Rational};

/// A rational point found by search, with `y >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundPoint {
    pub x: Rational,
    pub y: Rational,
    /// Finite order, detected by multiples up to 12.
    pub torsion: bool,
}

fn square_root_i128(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let r = v.sqrt();
    (r * r == v).then_some(r)
}

/// `prod (m - e_i k)` when it is a perfect square, as its root.
fn product_root(es: &[i128; 3], big: &[BigInt; 3], m: i128, k: i128) -> Option<BigInt> {
    let fast = (|| {
        let a = m.checked_sub(es[0].checked_mul(k)?)?;
        let b = m.checked_sub(es[1].checked_mul(k)?)?;
        let c = m.checked_sub(es[2].checked_mul(k)?)?;
        a.checked_mul(b)?.checked_mul(c)
    })();
    match fast {
        Some(v) => square_root_i128(v).map(BigInt::from),
        None => {
            let (m, k) = (BigInt::from(m), BigInt::from(k));
            let v: BigInt = big.iter().map(|e| &m - e * &k).product();
            integer_sqrt_exact(&v)
        }
    }
}

fn small_roots(e: &EllipticCurve) -> [i128; 3] {
    // out-of-range roots fall back to the big-integer path via overflow
    e.e.clone().map(|x| x.to_i128().unwrap_or(i128::MAX))
}

/// All points with `x = m / n^2`, `gcd(m, n) = 1`, `|m| <= height` and
/// `n^2 <= height`, ordered by `(n, |m|, m)`.
pub fn point_search(e: &EllipticCurve, height: i64) -> Vec<FoundPoint> {
    let es = small_roots(e);
    let big = e.e.clone();
    let h = height as i128;
    let nmax = h.sqrt();
    let mut found: Vec<(i128, i128, FoundPoint)> = (1..=nmax)
        .into_par_iter()
        .flat_map_iter(|n| {
            let k = n * n;
            let (es, big) = (es, big.clone());
            (-h..=h).filter_map(move |m| {
                if m.gcd(&n) != 1 {
                    return None;
                }
                let r = product_root(&es, &big, m, k)?;
                let x = Rational::new(BigInt::from(m), BigInt::from(k));
                let y = Rational::new(r, BigInt::from(k * n));
                Some((n, m, FoundPoint { x, y, torsion: false }))
            })
        })
        .collect();
    found.sort_by_key(|(n, m, _)| (*n, m.abs(), *m));
    found
        .into_iter()
        .map(|(_, _, mut p)| {
            p.torsion = e.is_torsion(&Some((p.x.clone(), p.y.clone())));
            p
        })
        .collect()
}

/// Searches the 2-covering attached to `(b1, b2)` for a point with
/// `x - e1 = b1 (r/s)^2`, `0 <= r, 1 <= s <= bound`.
pub fn cover_search(e: &EllipticCurve, b1: &BigInt, b2: &BigInt, bound: i64) -> Option<(Rational, Rational)> {
    let d12 = &e.e[0] - &e.e[1];
    let d13 = &e.e[0] - &e.e[2];
    let b12 = b1 * b2;
    let hit = (1..=bound).into_par_iter().find_map_first(|s| {
        let s2 = BigInt::from(s * s);
        (0..=bound).find_map(|r| {
            if r.gcd(&s) != 1 || (r == 0 && s != 1) {
                return None;
            }
            let br2 = b1 * BigInt::from(r * r);
            let q1 = b2 * (&br2 + &d12 * &s2);
            if q1.is_negative() || integer_sqrt_exact(&q1).is_none() {
                return None;
            }
            let q2 = &b12 * (&br2 + &d13 * &s2);
            if q2.is_negative() || integer_sqrt_exact(&q2).is_none() {
                return None;
            }
            Some((r, s))
        })
    })?;
    let (r, s) = hit;
    let x = Rational::from_integer(e.e[0].clone()) + Rational::new(b1 * BigInt::from(r * r), BigInt::from(s * s));
    let y = rational_sqrt(&e.rhs(&x)).expect("covering point lies on the curve");
    Some((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{frac, rat};
    use num_traits::Zero;

    #[test]
    fn finds_small_points() {
        let e = EllipticCurve::from_roots([-5, 0, 5]).unwrap();
        let pts = point_search(&e, 100);
        assert!(pts.iter().any(|p| p.x == rat(-4) && p.y == rat(6)));
        assert!(pts.iter().any(|p| p.x == frac(25, 4) && p.y == frac(75, 8)));
        for p in &pts {
            assert!(e.contains(&Some((p.x.clone(), p.y.clone()))));
        }
        // the three 2-torsion points are there as well, flagged as torsion
        assert_eq!(pts.iter().filter(|p| p.y.is_zero()).count(), 3);
        assert!(pts.iter().all(|p| p.torsion == p.y.is_zero()));
    }

    #[test]
    fn rank_zero_search_finds_only_torsion() {
        let e = EllipticCurve::from_roots([-1, 0, 1]).unwrap();
        let pts = point_search(&e, 2_000);
        assert!(pts.iter().all(|p| p.y.is_zero()));
    }

    #[test]
    fn covering_point() {
        let e = EllipticCurve::from_roots([-5, 0, 5]).unwrap();
        // (-4, 6): x + 5 = 1, x = -4, x - 5 = -9 -> class (1, -1)
        let (x, y) = cover_search(&e, &BigInt::from(1), &BigInt::from(-1), 20).unwrap();
        assert!(e.contains(&Some((x, y))));
        // y^2 = x^3 - x has rank 0, and (3, 1) is not a torsion image
        assert!(cover_search(&EllipticCurve::from_roots([-1, 0, 1]).unwrap(), &BigInt::from(3), &BigInt::from(1), 50).is_none());
    }
}
