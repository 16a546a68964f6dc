use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{AlgebraError, Rational};

const TRIAL_LIMIT: u32 = 1_000_000;

/// Bases making Miller-Rabin deterministic below 3.3 * 10^24; above that the
/// extra bases leave an error probability far below anything that matters here.
const MR_BASES: [u32; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

pub fn primes_up_to(limit: u32) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u32))
        .collect()
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

fn miller_rabin(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &b in MR_BASES.iter() {
        if n == &BigUint::from(b) {
            return true;
        }
        if (n % b).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &b in MR_BASES.iter() {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigInt) -> bool {
    match n.to_biguint() {
        Some(u) => miller_rabin(&u),
        None => false,
    }
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of composite `n`.
fn pollard_rho(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn factor_large(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if miller_rabin(&n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(&n);
    let rest = &n / &d;
    factor_large(d, out);
    factor_large(rest, out);
}

/// Prime factorization of a nonzero integer, with sign kept separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub negative: bool,
    /// Sorted by prime.
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Reassembles the integer.
    pub fn value(&self) -> BigInt {
        let mut v = BigUint::one();
        for (p, e) in &self.factors {
            v *= p.pow(*e);
        }
        let v = BigInt::from_biguint(Sign::Plus, v);
        if self.negative {
            -v
        } else {
            v
        }
    }
}

pub fn factor_integer(n: &BigInt) -> Result<Factorization, AlgebraError> {
    if n.is_zero() {
        return Err(AlgebraError::Zero);
    }
    let negative = n.sign() == Sign::Minus;
    let mut m = n.magnitude().clone();
    let mut found: Vec<BigUint> = Vec::new();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        if m.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0;
        while (&m % p).is_zero() {
            m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((pb, e));
        }
    }
    if !m.is_one() {
        factor_large(m, &mut found);
    }
    found.sort();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    factors.sort();
    Ok(Factorization { negative, factors })
}

/// Writes `q = s * r^2` with `s` a squarefree integer.
pub fn squarefree_part(q: &Rational) -> Result<(BigInt, Rational), AlgebraError> {
    if q.is_zero() {
        return Err(AlgebraError::Zero);
    }
    let mut s = BigInt::one();
    for part in [q.numer(), q.denom()] {
        let f = factor_integer(part)?;
        for (p, e) in &f.factors {
            if e % 2 == 1 {
                s *= BigInt::from(p.clone());
            }
        }
    }
    if q.numer().sign() == Sign::Minus {
        s = -s;
    }
    let r2 = q / Rational::from_integer(s.clone());
    let r = super::rational_sqrt(&r2).expect("quotient by squarefree part is a square");
    Ok((s, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{frac, rat};

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn as_pairs(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors.iter().map(|(p, e)| (num_traits::ToPrimitive::to_u64(p).unwrap(), *e)).collect()
    }

    #[test]
    fn factor_examples() {
        let one = factor_integer(&BigInt::from(1)).unwrap();
        assert!(one.factors.is_empty() && !one.negative);

        let f = factor_integer(&BigInt::from(-504)).unwrap();
        assert!(f.negative);
        assert_eq!(as_pairs(&f), trial_division(504));
        assert_eq!(as_pairs(&f), vec![(2, 3), (3, 2), (7, 1)]);

        let f = factor_integer(&BigInt::from(12167)).unwrap();
        assert_eq!(as_pairs(&f), vec![(23, 3)]);
        assert_eq!(factor_integer(&BigInt::from(0)), Err(AlgebraError::Zero));
    }

    #[test]
    fn factor_beyond_trial_range() {
        // two primes above the trial-division bound
        let p: BigInt = "1000003".parse().unwrap();
        let q: BigInt = "1000000007".parse().unwrap();
        let r: BigInt = "999999999989".parse().unwrap();
        let n = &p * &q * &r * &q;
        let f = factor_integer(&n).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.factors[1], (q.to_biguint().unwrap(), 2));
    }

    #[test]
    fn primality() {
        assert!(is_prime(&BigInt::from(2)));
        assert!(is_prime(&BigInt::from(47)));
        assert!(!is_prime(&BigInt::from(1)));
        assert!(!is_prime(&BigInt::from(561)));
        assert!(!is_prime(&BigInt::from(-7)));
        assert!(is_prime(&"170141183460469231731687303715884105727".parse().unwrap()));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&rat(1)).unwrap(), (BigInt::from(1), rat(1)));
        assert_eq!(squarefree_part(&rat(18)).unwrap(), (BigInt::from(2), rat(3)));
        assert_eq!(
            squarefree_part(&frac(-23, 2)).unwrap(),
            (BigInt::from(-46), frac(1, 2))
        );
        assert!(squarefree_part(&rat(0)).is_err());
    }

    proptest::proptest! {
        #[test]
        fn factorization_reassembles(n in 1i64..10_000_000_000, neg: bool) {
            let n = if neg { -n } else { n };
            let f = factor_integer(&BigInt::from(n)).unwrap();
            proptest::prop_assert_eq!(f.value(), BigInt::from(n));
            for p in f.primes() {
                proptest::prop_assert!(is_prime(&BigInt::from(p.clone())));
            }
        }

        #[test]
        fn squarefree_reconstructs(n in -100_000i64..100_000, d in 1i64..100_000) {
            proptest::prop_assume!(n != 0);
            let q = frac(n, d);
            let (s, r) = squarefree_part(&q).unwrap();
            proptest::prop_assert_eq!(Rational::from_integer(s.clone()) * &r * &r, q);
            let f = factor_integer(&s).unwrap();
            proptest::prop_assert!(f.factors.iter().all(|(_, e)| *e == 1));
        }
    }
}
