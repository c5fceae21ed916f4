use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::rational::{int, Rational};

/// An exponent vector in `N^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index must have length >= 1");
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex::new(vec![0; dim])
    }

    pub fn unit(dim: usize, j: usize) -> Self {
        let mut v = vec![0; dim];
        v[j] = 1;
        MultiIndex::new(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// `alpha!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).map(f64::from).product::<f64>())
            .product()
    }

    /// `<alpha, q>` in exact arithmetic.
    pub fn dot(&self, q: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(q)
            .map(|(&a, qj)| int(a as i64) * qj)
            .sum()
    }

    pub fn as_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|&a| int(a as i64)).collect()
    }

    /// `xi^alpha` with `0^0 = 1`.
    pub fn monomial(&self, xi: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(xi)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }

    /// All multi-indices of total order at most `max_order`, graded then lexicographic.
    pub fn all_up_to(dim: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for order in 0..=max_order {
            let mut cur = vec![0u32; dim];
            fill(&mut out, &mut cur, 0, order);
        }
        out
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill(out, cur, pos + 1, remaining - a);
    }
    cur[pos] = 0;
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex::new(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_graded() {
        let all = MultiIndex::all_up_to(2, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], MultiIndex::from([0, 0]));
        assert_eq!(all[1], MultiIndex::from([1, 0]));
        assert_eq!(all[5], MultiIndex::from([0, 2]));
        assert_eq!(MultiIndex::all_up_to(3, 4).len(), 35);
    }

    #[test]
    fn partial_order_and_sub() {
        let a = MultiIndex::from([2, 1]);
        let b = MultiIndex::from([1, 1]);
        assert!(b.le(&a));
        assert!(!a.le(&b));
        assert_eq!(a.checked_sub(&b), Some(MultiIndex::from([1, 0])));
        assert_eq!(b.checked_sub(&a), None);
        assert_eq!(a.factorial(), 2.0);
    }

    #[test]
    fn monomial_zero_power() {
        assert_eq!(MultiIndex::from([0, 2]).monomial(&[0.0, 3.0]), 9.0);
    }
}
