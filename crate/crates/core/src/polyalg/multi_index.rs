use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

/// Exponent vector `I = (I_1, ..., I_n)` of a monomial `x^I`.
///
/// Ordered graded-lexicographically: first by total degree, then
/// lexicographically on the exponents, so `x1^2 > x1*x2 > x2^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `e_j`, the exponent of the single variable `x_{j+1}`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when every entry of `other` is at most the matching
    /// entry of `self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.dim());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    /// `I! = I_1! ... I_n!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().fold(BigInt::from(1), |acc, &e| acc * factorial(e))
    }

    /// Falling-factorial coefficient of `d^J x^I`, i.e. `prod I_i!/(I_i-J_i)!`.
    pub fn falling_factorial(&self, j: &MultiIndex) -> BigInt {
        self.0.iter().zip(&j.0).fold(BigInt::from(1), |acc, (&i, &k)| (0..k).fold(acc, |a, m| a * BigInt::from(i - m)))
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.iter().all(|&e| e <= 1)
    }

    /// Applies a permutation of variables: entry `i` moves to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> MultiIndex {
        let mut out = vec![0; self.dim()];
        for (i, &e) in self.0.iter().enumerate() {
            out[perm[i]] = e;
        }
        MultiIndex(out)
    }
}

pub(crate) fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::from(1), |acc, m| acc * BigInt::from(m))
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices in `n` variables of total degree exactly `d`, in
/// descending graded-lex order.
pub fn homogeneous_indices(n: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill(&mut cur, 0, d, &mut out);
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        fill(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = MultiIndex::new(vec![2, 0]);
        let b = MultiIndex::new(vec![1, 1]);
        let c = MultiIndex::new(vec![0, 2]);
        let lin = MultiIndex::new(vec![1, 0]);
        assert!(a > b && b > c && c > lin);
    }

    #[test]
    fn homogeneous_enumeration() {
        let idx = homogeneous_indices(2, 2);
        let raw: Vec<_> = idx.iter().map(|m| m.entries().to_vec()).collect();
        assert_eq!(raw, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(homogeneous_indices(3, 2).len(), 6);
        assert_eq!(homogeneous_indices(1, 5), vec![MultiIndex::new(vec![5])]);
        let mut sorted = homogeneous_indices(4, 3);
        let orig = sorted.clone();
        sorted.sort_by(|a, b| b.cmp(a));
        assert_eq!(sorted, orig);
    }

    #[test]
    fn factorials() {
        assert_eq!(MultiIndex::new(vec![2, 3, 0]).factorial(), BigInt::from(12));
        assert_eq!(MultiIndex::new(vec![3, 1]).falling_factorial(&MultiIndex::new(vec![2, 1])), BigInt::from(6));
    }
}
