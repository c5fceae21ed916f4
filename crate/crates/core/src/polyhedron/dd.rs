//! Double description of a polyhedral cone `{x : h_i . x >= 0}` in exact
//! integer arithmetic.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) type Vector = Vec<BigInt>;

#[derive(Clone, Debug)]
pub(crate) struct Ray {
    pub dir: Vector,
    /// Indices of constraints tight at this ray.
    pub zeros: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct Cone {
    pub lineality: Vec<Vector>,
    pub rays: Vec<Ray>,
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divides by the gcd of the entries so equal rays compare equal.
pub(crate) fn primitive(mut v: Vector) -> Vector {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

fn combine(a: &BigInt, u: &[BigInt], b: &BigInt, w: &[BigInt]) -> Vector {
    primitive(u.iter().zip(w).map(|(x, y)| a * x + b * y).collect())
}

/// Computes lineality space and extreme rays of `{x in Z^d : h . x >= 0}`.
pub(crate) fn cone(d: usize, constraints: &[Vector]) -> Cone {
    let mut lineality: Vec<Vector> = (0..d)
        .map(|i| (0..d).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, h) in constraints.iter().enumerate() {
        if let Some(pos) = lineality.iter().position(|l| !dot(h, l).is_zero()) {
            let mut l = lineality.swap_remove(pos);
            let mut hl = dot(h, &l);
            if hl.is_negative() {
                l.iter_mut().for_each(|x| *x = -&*x);
                hl = -hl;
            }
            for other in &mut lineality {
                let ho = dot(h, other);
                *other = combine(&hl, other, &-ho, &l);
            }
            for ray in &mut rays {
                let hr = dot(h, &ray.dir);
                ray.dir = combine(&hl, &ray.dir, &-hr, &l);
                ray.zeros.insert(k);
            }
            let zeros = (0..k).collect();
            rays.push(Ray {
                dir: primitive(l),
                zeros,
            });
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| dot(h, &r.dir)).collect();
        let mut next = Vec::with_capacity(rays.len());
        for (ray, v) in rays.iter().zip(&values) {
            if !v.is_negative() {
                let mut ray = ray.clone();
                if v.is_zero() {
                    ray.zeros.insert(k);
                }
                next.push(ray);
            }
        }
        for (i, (rp, vp)) in rays.iter().zip(&values).enumerate() {
            if !vp.is_positive() {
                continue;
            }
            for (j, (rn, vn)) in rays.iter().zip(&values).enumerate() {
                if !vn.is_negative() {
                    continue;
                }
                let common: BTreeSet<usize> = rp.zeros.intersection(&rn.zeros).copied().collect();
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(t, r)| t != i && t != j && r.zeros.is_superset(&common));
                if blocked {
                    continue;
                }
                let dir = combine(vp, &rn.dir, &-vn, &rp.dir);
                let mut zeros = common;
                zeros.insert(k);
                next.push(Ray { dir, zeros });
            }
        }
        rays = next;
    }
    Cone { lineality, rays }
}

/// Rank of a set of integer vectors, by fraction-free elimination.
pub(crate) fn rank(rows: &[Vector]) -> usize {
    let mut m: Vec<Vector> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let Some(cols) = m.first().map(Vec::len) else {
        return 0;
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let (a, b) = (m[r][c].clone(), m[i][c].clone());
                let pivot = m[r].clone();
                m[i] = combine(&a, &m[i], &-b, &pivot);
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vector {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn orthant_has_unit_rays() {
        let c = cone(2, &[v(&[1, 0]), v(&[0, 1])]);
        assert!(c.lineality.is_empty());
        let mut dirs: Vec<Vector> = c.rays.iter().map(|r| r.dir.clone()).collect();
        dirs.sort();
        assert_eq!(dirs, vec![v(&[0, 1]), v(&[1, 0])]);
    }

    #[test]
    fn half_space_keeps_lineality() {
        let c = cone(3, &[v(&[1, 1, 0])]);
        assert_eq!(c.lineality.len(), 2);
        assert_eq!(c.rays.len(), 1);
    }

    #[test]
    fn square_cone() {
        let c = cone(3, &[v(&[1, 0, 1]), v(&[-1, 0, 1]), v(&[0, 1, 1]), v(&[0, -1, 1])]);
        assert!(c.lineality.is_empty());
        assert_eq!(c.rays.len(), 4);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&[v(&[1, 2]), v(&[2, 4])]), 1);
        assert_eq!(rank(&[v(&[1, 2, 0]), v(&[0, 1, 1]), v(&[1, 3, 1])]), 2);
        assert_eq!(rank(&[]), 0);
    }
}
