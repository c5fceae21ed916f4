//! Radial plateau bump `φ(x) = S((|x|²/δ² - 1)/3)` with the smooth step
//! `S(t) = f(1-t) / (f(t) + f(1-t))`, `f(t) = exp(-t^{-a})` for `t > 0`.
//!
//! `φ = 1` for `|x| <= δ` and `φ = 0` for `|x| >= 2δ`. The profile `f` is
//! Gevrey of class `1 + 1/a`.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::jet::{Jet1, JetN, JetSpace};
use crate::symbol::MultiIndex;

pub const MAX_BUMP_ORDER: usize = 24;

#[derive(Clone, Debug)]
pub struct BumpFunction {
    pub delta: f64,
    pub order: usize,
    /// Exponent `a` of the profile `exp(-t^{-a})`.
    pub profile_exponent: f64,
    dim: usize,
    basis: Vec<MultiIndex>,
    /// `sup |d^γ φ|` at `δ = 1`, in the order of `basis`.
    sup_unit: Vec<f64>,
}

/// Bump with the standard profile `exp(-1/t)`.
pub fn make_bump(dim: usize, delta: f64, order: usize) -> Result<BumpFunction> {
    build(dim, delta, order, 1.0)
}

/// Bump whose profile is Gevrey of class `class > 1`.
pub fn make_bump_class(dim: usize, delta: f64, order: usize, class: f64) -> Result<BumpFunction> {
    if !(class > 1.0 && class.is_finite()) {
        return Err(Error::InvalidParameter(format!("a compactly supported bump needs class > 1, got {class}")));
    }
    build(dim, delta, order, 1.0 / (class - 1.0))
}

fn build(dim: usize, delta: f64, order: usize, a: f64) -> Result<BumpFunction> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if order > MAX_BUMP_ORDER {
        return Err(Error::OrderCap {
            requested: order,
            cap: MAX_BUMP_ORDER,
        });
    }
    let space = JetSpace::new(dim, order as u32);
    let mut sup = vec![0.0f64; space.basis.len()];
    sup[0] = 1.0;
    for x in sample_points(dim) {
        let jet = unit_jet(&space, &x, a);
        for (k, g) in space.basis.iter().enumerate() {
            let v = (jet.c[k] * g.factorial()).abs();
            if v > sup[k] {
                sup[k] = v;
            }
        }
    }
    Ok(BumpFunction {
        delta,
        order,
        profile_exponent: a,
        dim,
        basis: space.basis.clone(),
        sup_unit: sup,
    })
}

/// Points of the positive orthant in the annulus `1 <= |x| <= 2`, radii
/// clustered at both ends. Every `|d^γ φ|` is even in each coordinate, so
/// the orthant suffices.
fn sample_points(dim: usize) -> Vec<Vec<f64>> {
    let radii: Vec<f64> = {
        let n = 96;
        (0..n)
            .map(|k| 1.5 - 0.5 * (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos())
            .collect()
    };
    let dirs: Vec<Vec<f64>> = match dim {
        1 => vec![vec![1.0]],
        2 => {
            let m = 48;
            (0..=m)
                .map(|k| {
                    let t = std::f64::consts::FRAC_PI_2 * k as f64 / m as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
        _ => {
            // Products of angles on a coarse spherical grid.
            let m = 12usize;
            let mut out = Vec::new();
            let steps = dim - 1;
            let total = (m + 1).pow(steps as u32);
            for idx in 0..total {
                let mut rem = idx;
                let mut angles = Vec::with_capacity(steps);
                for _ in 0..steps {
                    angles.push(std::f64::consts::FRAC_PI_2 * (rem % (m + 1)) as f64 / m as f64);
                    rem /= m + 1;
                }
                let mut v = vec![0.0; dim];
                let mut s = 1.0;
                for (j, ang) in angles.iter().enumerate() {
                    v[j] = s * ang.cos();
                    s *= ang.sin();
                }
                v[dim - 1] = s;
                out.push(v);
            }
            out
        }
    };
    let mut pts = Vec::with_capacity(radii.len() * dirs.len());
    for r in &radii {
        for d in &dirs {
            pts.push(d.iter().map(|x| x * r).collect());
        }
    }
    pts
}

fn flat(t: &Jet1, a: f64) -> Jet1 {
    if t.value() <= 0.0 {
        return Jet1::constant(0.0, t.order());
    }
    let e = t.powf(-a).scale(-1.0).exp();
    if e.value() == 0.0 || e.c.iter().any(|x| !x.is_finite()) {
        return Jet1::constant(0.0, t.order());
    }
    e
}

/// Jet of the smooth step at `t0`.
fn step(t0: f64, order: usize, a: f64) -> Jet1 {
    if t0 <= 0.0 {
        return Jet1::constant(1.0, order);
    }
    if t0 >= 1.0 {
        return Jet1::constant(0.0, order);
    }
    let t = Jet1::variable(t0, order);
    let f = flat(&t, a);
    let g = flat(&t.scale(-1.0).offset(1.0), a);
    g.div(&f.add(&g))
}

/// Taylor jet of the unit bump at `x`.
fn unit_jet(space: &Rc<JetSpace>, x: &[f64], a: f64) -> JetN {
    let mut u = JetN::constant(space, 0.0);
    for (j, xj) in x.iter().enumerate() {
        let v = JetN::variable(space, j, *xj);
        u = u.add(&v.mul(&v));
    }
    let t = u.scale(1.0 / 3.0);
    let mut t = t;
    t.c[0] -= 1.0 / 3.0;
    t.compose(&step(t.value(), space.order as usize, a))
}

impl BumpFunction {
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, gamma: &MultiIndex) -> Result<usize> {
        if gamma.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: gamma.dim(),
            });
        }
        if gamma.order() as usize > self.order {
            return Err(Error::OrderCap {
                requested: gamma.order() as usize,
                cap: self.order,
            });
        }
        Ok(self.basis.iter().position(|b| b == gamma).expect("basis covers the order"))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum::<f64>() / (self.delta * self.delta);
        step((r2 - 1.0) / 3.0, 0, self.profile_exponent).value()
    }

    /// `d^γ φ(x)`.
    pub fn derivative(&self, x: &[f64], gamma: &MultiIndex) -> Result<f64> {
        self.index(gamma)?;
        let space = JetSpace::new(self.dim, gamma.order());
        let unit: Vec<f64> = x.iter().map(|v| v / self.delta).collect();
        let jet = unit_jet(&space, &unit, self.profile_exponent);
        let d = jet.derivative(gamma).expect("in basis");
        Ok(d * self.delta.powi(-(gamma.order() as i32)))
    }

    /// All `d^γ φ(x)` with `|γ| <= order`, in graded order.
    pub fn derivatives(&self, x: &[f64], order: usize) -> Result<Vec<(MultiIndex, f64)>> {
        if order > self.order {
            return Err(Error::OrderCap {
                requested: order,
                cap: self.order,
            });
        }
        let space = JetSpace::new(self.dim, order as u32);
        let unit: Vec<f64> = x.iter().map(|v| v / self.delta).collect();
        let jet = unit_jet(&space, &unit, self.profile_exponent);
        Ok(space
            .basis
            .iter()
            .enumerate()
            .map(|(k, g)| (g.clone(), jet.c[k] * g.factorial() * self.delta.powi(-(g.order() as i32))))
            .collect())
    }

    /// `sup_x |d^γ φ(x)|` estimated on the sample grid.
    pub fn sup_norm(&self, gamma: &MultiIndex) -> Result<f64> {
        let k = self.index(gamma)?;
        Ok(self.sup_unit[k] * self.delta.powi(-(gamma.order() as i32)))
    }
}
