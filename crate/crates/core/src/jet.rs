//! Truncated Taylor arithmetic.
//!
//! [`Jet1`] holds `f(t0 + e) = sum_k c_k e^k` up to a fixed order;
//! [`JetN`] holds a truncated multivariate series in the graded order of
//! [`MultiIndex::all_up_to`].

use std::collections::HashMap;
use std::rc::Rc;

use crate::symbol::MultiIndex;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    pub c: Vec<f64>,
}

impl Jet1 {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet1 { c }
    }

    /// The identity `t0 + e`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut j = Jet1::constant(t0, order);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| *x == 0.0)
    }

    /// `k!` times the `k`-th coefficient.
    pub fn derivative(&self, k: usize) -> f64 {
        (1..=k).fold(self.c[k], |acc, i| acc * i as f64)
    }

    pub fn add(&self, o: &Jet1) -> Jet1 {
        Jet1 {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet1 {
        Jet1 {
            c: self.c.iter().map(|a| a * s).collect(),
        }
    }

    pub fn offset(&self, s: f64) -> Jet1 {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    pub fn mul(&self, o: &Jet1) -> Jet1 {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet1 { c }
    }

    pub fn recip(&self) -> Jet1 {
        let n = self.c.len();
        let mut r = vec![0.0; n];
        r[0] = 1.0 / self.c[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.c[j] * r[k - j]).sum();
            r[k] = -s / self.c[0];
        }
        Jet1 { c: r }
    }

    pub fn div(&self, o: &Jet1) -> Jet1 {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> Jet1 {
        let n = self.c.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet1 { c: e }
    }

    /// Natural logarithm; the constant term must be positive.
    pub fn ln(&self) -> Jet1 {
        let n = self.c.len();
        let mut l = vec![0.0; n];
        l[0] = self.c[0].ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * self.c[k - j]).sum();
            l[k] = (self.c[k] - s / k as f64) / self.c[0];
        }
        Jet1 { c: l }
    }

    /// `self^p` for a positive constant term.
    pub fn powf(&self, p: f64) -> Jet1 {
        self.ln().scale(p).exp()
    }
}

/// Multiplication table for truncated series in `dim` variables.
#[derive(Debug)]
pub struct JetSpace {
    pub dim: usize,
    pub order: u32,
    pub basis: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
    pairs: Vec<(u32, u32, u32)>,
}

impl JetSpace {
    pub fn new(dim: usize, order: u32) -> Rc<JetSpace> {
        let basis = MultiIndex::all_up_to(dim, order);
        let index: HashMap<MultiIndex, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut pairs = Vec::new();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                if a.order() + b.order() <= order {
                    pairs.push((i as u32, j as u32, index[&(a + b)] as u32));
                }
            }
        }
        Rc::new(JetSpace {
            dim,
            order,
            basis,
            index,
            pairs,
        })
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }
}

#[derive(Clone, Debug)]
pub struct JetN {
    pub space: Rc<JetSpace>,
    pub c: Vec<f64>,
}

impl JetN {
    pub fn constant(space: &Rc<JetSpace>, v: f64) -> Self {
        let mut c = vec![0.0; space.basis.len()];
        c[0] = v;
        JetN { space: space.clone(), c }
    }

    /// The coordinate `x0 + h_j`.
    pub fn variable(space: &Rc<JetSpace>, j: usize, x0: f64) -> Self {
        let mut v = JetN::constant(space, x0);
        if space.order >= 1 {
            let k = space.position(&MultiIndex::unit(space.dim, j)).expect("unit index");
            v.c[k] = 1.0;
        }
        v
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn add(&self, o: &JetN) -> JetN {
        JetN {
            space: self.space.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> JetN {
        JetN {
            space: self.space.clone(),
            c: self.c.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, o: &JetN) -> JetN {
        let mut c = vec![0.0; self.c.len()];
        for &(i, j, k) in &self.space.pairs {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        JetN { space: self.space.clone(), c }
    }

    /// `f(self)` where `f` is given by its jet at `self.value()`.
    pub fn compose(&self, f: &Jet1) -> JetN {
        let mut h = self.clone();
        h.c[0] = 0.0;
        let top = f.order().min(self.space.order as usize);
        let mut acc = JetN::constant(&self.space, f.c[top]);
        for k in (0..top).rev() {
            acc = acc.mul(&h);
            acc.c[0] += f.c[k];
        }
        acc
    }

    /// `d^gamma` at the expansion point.
    pub fn derivative(&self, gamma: &MultiIndex) -> Option<f64> {
        self.space.position(gamma).map(|k| self.c[k] * gamma.factorial())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_identities() {
        let t = Jet1::variable(0.7, 8);
        let e = t.exp();
        for k in 0..=8 {
            assert!((e.derivative(k) - 0.7f64.exp()).abs() < 1e-12);
        }
        let back = t.exp().ln();
        assert!((back.c[0] - 0.7).abs() < 1e-15 && (back.c[1] - 1.0).abs() < 1e-14);
        assert!(back.c[2..].iter().all(|x| x.abs() < 1e-13));
        let p = t.powf(-2.0);
        assert!((p.derivative(3) - (-24.0 * 0.7f64.powi(-5))).abs() < 1e-9);
        let one = t.mul(&t.recip());
        assert!((one.c[0] - 1.0).abs() < 1e-15 && one.c[1..].iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn multivariate_composition() {
        let space = JetSpace::new(2, 6);
        let x = JetN::variable(&space, 0, 0.3);
        let y = JetN::variable(&space, 1, -0.2);
        let u = x.mul(&y).add(&x);
        let f = Jet1::variable(u.value(), 6).exp();
        let g = u.compose(&f);
        let base = (0.3f64 * -0.2 + 0.3).exp();
        assert!((g.value() - base).abs() < 1e-15);
        let d10 = g.derivative(&MultiIndex::from([1, 0])).unwrap();
        assert!((d10 - base * (1.0 - 0.2)).abs() < 1e-14);
        let d01 = g.derivative(&MultiIndex::from([0, 1])).unwrap();
        assert!((d01 - base * 0.3).abs() < 1e-14);
        let d11 = g.derivative(&MultiIndex::from([1, 1])).unwrap();
        assert!((d11 - base * (0.8 * 0.3 + 1.0)).abs() < 1e-13);
    }
}
