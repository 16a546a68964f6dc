//! Dense univariate polynomials over **Q**, coefficients in ascending order.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{fmt_rational, QuadElement, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", fmt_rational(c))?,
                1 => write!(f, "({})*X", fmt_rational(c))?,
                _ => write!(f, "({})*X^{i}", fmt_rational(c))?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `X - r`
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    /// `X^2 + b X + c`
    pub fn monic_quadratic(b: Rational, c: Rational) -> Self {
        Self::new(vec![c, b, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_quad(&self, x: &QuadElement) -> QuadElement {
        let mut acc = QuadElement::rational(Rational::zero(), &x.d);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &QuadElement::rational(c.clone(), &x.d);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn product<'a>(it: impl IntoIterator<Item = &'a Poly>) -> Self {
        it.into_iter().fold(Self::constant(Rational::one()), |acc, p| acc.mul(p))
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        if self.coeffs.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quo = vec![Rational::zero(); self.coeffs.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quo[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quo), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        let l = self.leading();
        self.scale(&(Rational::one() / l))
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// `X^n f(1/X)`.
    pub fn reversed(&self, n: usize) -> Self {
        let mut c = vec![Rational::zero(); n + 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            c[n - i] = x.clone();
        }
        Self::new(c)
    }

    /// `f(g(X))`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// `f(X + t)`.
    pub fn shift(&self, t: &Rational) -> Self {
        let mut acc = Self::zero();
        let lin = Self::new(vec![t.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| i % 2 == 0 || c.is_zero())
    }

    /// For even `f`, the polynomial `g` with `g(X^2) = f(X)`.
    pub fn even_part(&self) -> Self {
        Self::new(self.coeffs.iter().step_by(2).cloned().collect())
    }

    /// `g(X^2)`.
    pub fn substitute_square(&self) -> Self {
        let mut c = vec![Rational::zero(); 2 * self.coeffs.len()];
        for (i, x) in self.coeffs.iter().enumerate() {
            c[2 * i] = x.clone();
        }
        Self::new(c)
    }

    fn sign_at_infinity(&self, positive: bool) -> i32 {
        let Some(d) = self.degree() else { return 0 };
        let s = if self.leading().is_positive() { 1 } else { -1 };
        if positive || d % 2 == 0 {
            s
        } else {
            -s
        }
    }

    /// Number of distinct real roots, by a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].divrem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rational::one()));
        }
        let changes = |pos: bool| {
            let signs: Vec<i32> = seq
                .iter()
                .map(|p| p.sign_at_infinity(pos))
                .filter(|&s| s != 0)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(false) - changes(true)
    }
}

/// Determinant by Gaussian elimination over **Q**.
pub fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Resultant via the Sylvester matrix.
pub fn resultant(f: &Poly, g: &Poly) -> Rational {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return Rational::zero();
    };
    if m + n == 0 {
        return Rational::one();
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![Rational::zero(); size];
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![Rational::zero(); size];
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows)
}

/// `disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant(f: &Poly) -> Rational {
    let n = f.degree().unwrap_or(0);
    let r = resultant(f, &f.derivative()) / f.leading();
    if (n * (n.saturating_sub(1)) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{frac, rat};

    #[test]
    fn division_roundtrip() {
        let f = Poly::from_ints(&[3, 0, -2, 5, 1, 0, 2]);
        let g = Poly::from_ints(&[1, 7, 1]);
        let (q, r) = f.divrem(&g);
        assert_eq!(q.mul(&g).add(&r), f);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn discriminant_closed_form() {
        // disc(X^n + a) = (-1)^(n(n-1)/2) n^n a^(n-1)
        for a in [1i64, -3, 7] {
            let f = Poly::from_ints(&[a, 0, 0, 0, 0, 0, 1]);
            let expected = rat(-46656) * rat(a).pow(5);
            assert_eq!(discriminant(&f), expected);
        }
    }

    #[test]
    fn discriminant_root_product() {
        // c^(2n-2) * prod (r_i - r_j)^2 for roots 1, -2, 3, 1/2, 5, -7
        let roots = [rat(1), rat(-2), rat(3), frac(1, 2), rat(5), rat(-7)];
        let c = rat(3);
        let f = roots
            .iter()
            .fold(Poly::constant(c.clone()), |acc, r| acc.mul(&Poly::linear_root(r)));
        let mut expected = c.pow(10);
        for i in 0..6 {
            for j in i + 1..6 {
                let d = &roots[i] - &roots[j];
                expected *= &d * &d;
            }
        }
        assert_eq!(discriminant(&f), expected);
        let repeated = Poly::linear_root(&rat(2)).mul(&Poly::linear_root(&rat(2))).mul(&f);
        assert!(discriminant(&repeated).is_zero());
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(Poly::from_ints(&[1, 0, 0, 0, 0, 0, 1]).count_real_roots(), 0);
        assert_eq!(Poly::from_ints(&[-1, 0, 1]).count_real_roots(), 2);
        let f = Poly::from_ints(&[-6, 11, -6, 1]); // (x-1)(x-2)(x-3)
        assert_eq!(f.count_real_roots(), 3);
        // 2(X^2+7)(X^2+14)(X^2-11)
        let f = Poly::from_ints(&[-2156, 0, -266, 0, 20, 0, 2]);
        assert_eq!(f.count_real_roots(), 2);
    }

    #[test]
    fn reverse_and_shift() {
        let f = Poly::from_ints(&[1, 2, 3]);
        assert_eq!(f.reversed(2), Poly::from_ints(&[3, 2, 1]));
        assert_eq!(f.shift(&rat(1)), Poly::from_ints(&[6, 8, 3]));
        let g = Poly::from_ints(&[5, 0, 1, 0, 2]);
        assert!(g.is_even());
        assert_eq!(g.even_part().substitute_square(), g);
    }
}
