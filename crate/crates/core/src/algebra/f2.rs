//! Small linear algebra over **F**_2 with vectors packed into `u64`.

/// A subspace of `F_2^n` (`n <= 64`) kept in reduced echelon form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct F2Span {
    /// Rows keyed by their pivot bit, each pivot cleared from every other row.
    rows: Vec<u64>,
}

impl F2Span {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the span; zero iff `v` lies in it.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let pivot = 63 - r.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let pivot = 63 - v.leading_zeros();
        for r in self.rows.iter_mut() {
            if *r >> pivot & 1 == 1 {
                *r ^= v;
            }
        }
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub fn basis(&self) -> &[u64] {
        &self.rows
    }

    /// Every element of the span (there are `2^dim` of them).
    pub fn elements(&self) -> Vec<u64> {
        let mut out = vec![0u64];
        for &r in &self.rows {
            let n = out.len();
            for i in 0..n {
                out.push(out[i] ^ r);
            }
        }
        out
    }
}

pub fn rank(vs: &[u64]) -> usize {
    let mut s = F2Span::new();
    vs.iter().filter(|&&v| s.insert(v)).count()
}

fn parity(x: u64) -> u64 {
    u64::from(x.count_ones() % 2 == 1)
}

/// Basis of `{x in F_2^n : <row, x> = 0 for every row}`.
pub fn nullspace(rows: &[u64], n: usize) -> Vec<u64> {
    assert!(n <= 64);
    let mut span = F2Span::new();
    for &r in rows {
        span.insert(r);
    }
    let pivots: Vec<u32> = span.rows.iter().map(|r| 63 - r.leading_zeros()).collect();
    let mut out = Vec::new();
    for free in 0..n as u32 {
        if pivots.contains(&free) {
            continue;
        }
        // set the free coordinate, then solve each pivot coordinate
        let mut x = 1u64 << free;
        for (&r, &p) in span.rows.iter().zip(&pivots) {
            if parity(r & x) == 1 {
                x ^= 1 << p;
            }
        }
        out.push(x);
    }
    out
}

/// `<a, b>` over **F**_2.
pub fn dot(a: u64, b: u64) -> bool {
    parity(a & b) == 1
}
