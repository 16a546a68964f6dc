//! Brute-force oracles shared by the integration tests. They use machine
//! integers and plain enumeration only, nothing from the library's number
//! theory.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_integer::{Integer, Roots};
use rayon::prelude::*;

// ---------------------------------------------------------------- p-adic ----

fn legendre(a: i128, p: i128) -> i128 {
    let mut r = 1i128;
    let mut b = a.rem_euclid(p);
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Squareness in `Z_p` of an element known only modulo `p^k`.
/// `None` when the residue does not determine it.
pub fn square_mod_pk(value: i128, p: i128, k: u32) -> Option<bool> {
    let m = p.pow(k);
    let mut v = value.rem_euclid(m);
    if v == 0 {
        return None;
    }
    let mut val = 0;
    while v % p == 0 {
        v /= p;
        val += 1;
    }
    if val % 2 == 1 {
        return Some(false);
    }
    let left = k - val;
    if p == 2 {
        match left {
            0 | 1 => None,
            2 => (v % 4 == 3).then_some(false),
            _ => Some(v % 8 == 1),
        }
    } else {
        Some(legendre(v, p) == 1)
    }
}

fn eval_mod(coeffs: &[i64], x: i128, m: i128) -> i128 {
    coeffs.iter().rev().fold(0i128, |acc, &c| (acc * x + c as i128).rem_euclid(m))
}

/// Whether `y^2 = sum f_i x^i` has a `Q_p`-point, from every `x mod p^k` on the
/// affine chart and every `x' = 1/x` in `pZ_p` on the chart at infinity.
/// `Some(false)` needs every residue decided; `Some(true)` needs one decided
/// square.
pub fn qp_point_brute(ascending: &[i64; 7], p: u64, k: u32) -> Option<bool> {
    let p = p as i128;
    let m = p.pow(k);
    let reversed: Vec<i64> = ascending.iter().rev().copied().collect();
    let mut all_decided = true;
    let affine = (0..m).map(|x| eval_mod(ascending, x, m));
    let infinity = (0..m / p).map(|t| eval_mod(&reversed, p * t, m));
    for v in affine.chain(infinity) {
        match square_mod_pk(v, p, k) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => all_decided = false,
        }
    }
    all_decided.then_some(false)
}

// -------------------------------------------------------- elliptic curves ---

/// Squarefree part of a nonzero integer, as its sign and prime support.
pub fn sqf_support(mut n: i128) -> BTreeSet<i128> {
    assert!(n != 0);
    let mut out = BTreeSet::new();
    if n < 0 {
        out.insert(-1);
        n = -n;
    }
    let mut d = 2;
    while d * d <= n {
        let mut odd = false;
        while n % d == 0 {
            n /= d;
            odd = !odd;
        }
        if odd {
            out.insert(d);
        }
        d += 1;
    }
    if n > 1 {
        out.insert(n);
    }
    out
}

pub fn support_product(s: &BTreeSet<i128>) -> i128 {
    s.iter().product()
}

/// `x = m / n^2` on `y^2 = (x - e1)(x - e2)(x - e3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XPoint {
    pub m: i128,
    pub n: i128,
}

fn is_square_u128(v: u128) -> bool {
    const Q64: u64 = {
        let mut mask = 0u64;
        let mut i = 0;
        while i < 64 {
            mask |= 1 << (i * i % 64);
            i += 1;
        }
        mask
    };
    if Q64 >> (v % 64) & 1 == 0 {
        return false;
    }
    let r = v.sqrt();
    r * r == v
}

/// Every `m / n^2` with `|m|, n^2 <= height` and `gcd(m, n) = 1` that is the
/// x-coordinate of a rational point.
pub fn points_up_to(e: [i64; 3], height: i64) -> Vec<XPoint> {
    let nmax = (height as i128).sqrt();
    let h = height as i128;
    let mut pts: Vec<XPoint> = (1..=nmax)
        .into_par_iter()
        .flat_map_iter(|n| {
            let k = n * n;
            let e = e.map(|v| v as i128 * k);
            (-h..=h).filter_map(move |m| {
                if n > 1 && m.gcd(&n) != 1 {
                    return None;
                }
                let v = (m - e[0]) * (m - e[1]) * (m - e[2]);
                (v >= 0 && is_square_u128(v as u128)).then_some(XPoint { m, n })
            })
        })
        .collect();
    pts.sort_by_key(|p| (p.n, p.m));
    pts
}

/// Image of the point under `x -> (x - e1, x - e2)` into squarefree classes,
/// with the usual substitute at the 2-torsion points.
pub fn delta(e: [i64; 3], p: XPoint) -> (BTreeSet<i128>, BTreeSet<i128>) {
    let e = e.map(i128::from);
    let k = p.n * p.n;
    let comp = |i: usize| {
        let t = p.m - e[i] * k;
        if t != 0 {
            return sqf_support(t);
        }
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        sqf_support((e[i] - e[j]) * (e[i] - e[l]))
    };
    (comp(0), comp(1))
}

/// The two-torsion as x-points.
pub fn two_torsion(e: [i64; 3]) -> [XPoint; 3] {
    e.map(|v| XPoint { m: v as i128, n: 1 })
}

/// Rank over `F_2` of vectors given by their supports, tagged by component.
pub fn f2_rank_supports(vs: &[(BTreeSet<i128>, BTreeSet<i128>)]) -> usize {
    let mut index: BTreeMap<(u8, i128), usize> = BTreeMap::new();
    let rows: Vec<Vec<usize>> = vs
        .iter()
        .map(|(a, b)| {
            let tagged = a.iter().map(|&q| (0u8, q)).chain(b.iter().map(|&q| (1u8, q)));
            tagged
                .map(|key| {
                    let next = index.len();
                    *index.entry(key).or_insert(next)
                })
                .collect()
        })
        .collect();
    let width = index.len();
    let mut m: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![false; width];
            for &i in r {
                row[i] = true;
            }
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col]) else { continue };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r != rank && m[r][col] {
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Mordell-Weil rank lower bound from the points found, counting the full
/// 2-torsion as the two dimensions it contributes to `E(Q)/2E(Q)`.
pub fn rank_from_points(e: [i64; 3], pts: &[XPoint]) -> usize {
    let images: Vec<_> = two_torsion(e).into_iter().chain(pts.iter().copied()).map(|p| delta(e, p)).collect();
    f2_rank_supports(&images) - 2
}

// ------------------------------------------------------------ squarefree ----

/// Squarefree integers `w` with `0 < |w| <= bound`, by increasing `|w|`.
pub fn squarefree_up_to(bound: i64) -> Vec<i64> {
    let mut sieve = vec![true; bound as usize + 1];
    let mut q = 2usize;
    while q * q <= bound as usize {
        for k in (q * q..=bound as usize).step_by(q * q) {
            sieve[k] = false;
        }
        q += 1;
    }
    (1..=bound).filter(|&w| sieve[w as usize]).flat_map(|w| [w, -w]).collect()
}
