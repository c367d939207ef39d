use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

/// A multi-index `β ∈ ℕⁿ`.
///
/// The derived `Ord` is plain lexicographic on `(β_1, …, β_n)` and is only
/// used for deterministic storage; the monomial orders live in [`crate::order`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Exponent(entries)
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    /// The exponent of the variable `x_{i+1}` (0-based index `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Exponent(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.dim(), other.dim());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` when `other` does not divide `self`.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Exponent)
    }

    /// Componentwise `other ≤ self`, i.e. `self ∈ other + ℕⁿ`.
    pub fn is_multiple_of(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn lcm(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// True when the two exponents have disjoint supports.
    pub fn is_coprime(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Restriction to the first `k` coordinates.
    pub fn head(&self, k: usize) -> Exponent {
        Exponent(self.0[..k].to_vec())
    }

    /// True when every coordinate past the first `k` is zero.
    pub fn tail_is_zero(&self, k: usize) -> bool {
        self.0[k..].iter().all(|&e| e == 0)
    }

    /// Extend by zeros to dimension `n`.
    pub fn padded(&self, n: usize) -> Exponent {
        let mut v = self.0.clone();
        v.resize(n, 0);
        Exponent(v)
    }

    /// Index of the axis this exponent lies on, if it is `d·e_j` with `d > 0`.
    pub fn axis(&self) -> Option<usize> {
        let mut found = None;
        for (j, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(j);
            }
        }
        found
    }
}

impl Deref for Exponent {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

impl<const N: usize> From<[u32; N]> for Exponent {
    fn from(v: [u32; N]) -> Self {
        Exponent(v.to_vec())
    }
}

impl fmt::Display for Exponent {
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

/// Every exponent of `n` variables with `key(β) ≤ bound`, for a positive
/// integer weight vector. Enumeration order is lexicographic.
pub(crate) fn enumerate_sublevel(weights: &[u64], bound: u64) -> Vec<Exponent> {
    fn rec(weights: &[u64], left: u64, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        let j = cur.len();
        if j == weights.len() {
            out.push(Exponent(cur.clone()));
            return;
        }
        let w = weights[j];
        let mut e = 0u32;
        loop {
            let used = w * e as u64;
            if used > left {
                break;
            }
            cur.push(e);
            rec(weights, left - used, cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(weights, bound, &mut Vec::with_capacity(weights.len()), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisibility_and_lcm() {
        let a = Exponent::from([2, 3, 0]);
        let b = Exponent::from([8, 0, 0]);
        assert_eq!(a.lcm(&b), Exponent::from([8, 3, 0]));
        assert!(!a.is_coprime(&b));
        assert!(Exponent::from([0, 5, 0]).is_coprime(&b));
        assert_eq!(a.checked_sub(&b), None);
        assert_eq!(
            Exponent::from([8, 3, 0]).checked_sub(&a),
            Some(Exponent::from([6, 0, 0]))
        );
    }

    #[test]
    fn axis_detection() {
        assert_eq!(Exponent::from([0, 5, 0]).axis(), Some(1));
        assert_eq!(Exponent::from([2, 3, 0]).axis(), None);
        assert_eq!(Exponent::zero(3).axis(), None);
    }

    #[test]
    fn sublevel_counts() {
        // monomials of degree ≤ 2 in two variables
        assert_eq!(enumerate_sublevel(&[1, 1], 2).len(), 6);
        assert_eq!(enumerate_sublevel(&[1, 1, 1], 3).len(), 20);
        assert_eq!(enumerate_sublevel(&[1, 3], 3).len(), 5);
    }
}
