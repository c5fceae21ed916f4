//! Amplitudes of the iterates.
//!
//! `P_{i_k} ... P_{i_1} u = ∫_1^∞ A(x,r) e^{-r^η} e^{i<x-x0, r^q ξ0>} dr` with
//! `A(x,r) = sum_γ c_γ(r) (d^γ φ)(r^{εq}(x - x0))`. One more operator `P`
//! (with `D = -i d`) acts by Leibniz:
//! `c'_{γ+α} += sum_β a_β C(β,α) (-i)^{|α|} ξ0^{β-α} r^{<β,q> - (1-ε)<α,q>} c_γ`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::One;

use super::{BumpFunction, WavepacketSpec};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::rational::{self, to_f64, Rational};
use crate::symbol::{coeff_to_f64, MultiIndex, OperatorSymbol, RPolynomial, SymbolSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct ACoefficients {
    pub level: usize,
    pub terms: BTreeMap<MultiIndex, RPolynomial>,
}

impl ACoefficients {
    /// `A = φ(r^{εq}(x - x0))`.
    pub fn base(dim: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(MultiIndex::zero(dim), RPolynomial::constant(Complex64::new(1.0, 0.0)));
        ACoefficients { level: 0, terms }
    }

    pub fn max_order(&self) -> usize {
        self.terms.keys().map(|g| g.order() as usize).max().unwrap_or(0)
    }

    /// `A(x, r)` from the bump derivatives.
    pub fn evaluate(&self, spec: &WavepacketSpec, bump: &BumpFunction, x: &[f64], r: f64) -> Result<Complex64> {
        let eps = to_f64(&spec.epsilon);
        let y: Vec<f64> = x
            .iter()
            .zip(&spec.x0)
            .zip(spec.q_f64())
            .map(|((xi, x0), qj)| r.powf(eps * qj) * (xi - x0))
            .collect();
        let derivs = bump.derivatives(&y, self.max_order())?;
        let lookup: BTreeMap<&MultiIndex, f64> = derivs.iter().map(|(g, v)| (g, *v)).collect();
        Ok(self.terms.iter().map(|(g, c)| c.eval(r) * lookup[g]).sum())
    }
}

fn binomial(beta: &MultiIndex, alpha: &MultiIndex) -> f64 {
    beta.entries()
        .iter()
        .zip(alpha.entries())
        .map(|(&b, &a)| (0..a).fold(1.0, |acc, i| acc * (b - i) as f64 / (i + 1) as f64))
        .product()
}

fn minus_i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Applies one operator to the amplitude.
pub fn apply_symbol(spec: &WavepacketSpec, p: &OperatorSymbol, coeffs: &ACoefficients) -> Result<ACoefficients> {
    spec.check_epsilon()?;
    let one = Rational::one();
    let contraction = &one - &spec.epsilon;
    // (alpha, r-exponent, factor) for every beta in the support and alpha <= beta.
    let mut steps: Vec<(MultiIndex, Rational, Complex64)> = Vec::new();
    for (beta, a) in p.terms() {
        let bq = beta.dot(&spec.q);
        if bq > one {
            return Err(Error::BeyondFacet {
                alpha: beta.entries().to_vec(),
                value: rational::format(&bq),
            });
        }
        let a = coeff_to_f64(a);
        for alpha in MultiIndex::all_up_to(beta.dim(), beta.order()) {
            let Some(rest) = beta.checked_sub(&alpha) else {
                continue;
            };
            let exponent = &bq - &contraction * alpha.dot(&spec.q);
            let factor = a * binomial(beta, &alpha) * minus_i_pow(alpha.order()) * rest.monomial(&spec.xi0);
            if factor != Complex64::new(0.0, 0.0) {
                steps.push((alpha, exponent, factor));
            }
        }
    }
    let mut terms: BTreeMap<MultiIndex, RPolynomial> = BTreeMap::new();
    for (gamma, c) in &coeffs.terms {
        for (alpha, exponent, factor) in &steps {
            terms
                .entry(gamma + alpha)
                .or_default()
                .add_scaled(c, exponent, *factor);
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(ACoefficients {
        level: coeffs.level + 1,
        terms,
    })
}

/// `0, 1, ..., N-1, 0, 1, ...` of length `k`.
pub fn cyclic_sequence(symbols: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| i % symbols.max(1)).collect()
}

/// Amplitude of `P_{i_k} ... P_{i_1} u` for `sequence = (i_1, ..., i_k)`.
pub fn iterate_coefficients(spec: &WavepacketSpec, system: &SymbolSystem, sequence: &[usize]) -> Result<ACoefficients> {
    let mut coeffs = ACoefficients::base(system.dim());
    for &i in sequence {
        let p = system
            .symbols()
            .get(i)
            .ok_or_else(|| Error::InvalidParameter(format!("sequence index {i} out of range")))?;
        coeffs = apply_symbol(spec, p, &coeffs)?;
    }
    Ok(coeffs)
}

/// `ln ∫_1^∞ sum_γ |c_γ(r)| sup|d^γ φ| e^{-r^η} dr`, integrated in
/// `y = ln r` with the peak factored out.
pub fn ln_iterate_norm_estimate(coeffs: &ACoefficients, spec: &WavepacketSpec, bump: &BumpFunction) -> Result<f64> {
    let needed = coeffs.max_order();
    if needed > bump.order {
        return Err(Error::OrderCap {
            requested: needed,
            cap: bump.order,
        });
    }
    let weights: Vec<(f64, &RPolynomial)> = coeffs
        .terms
        .iter()
        .map(|(g, c)| bump.sup_norm(g).map(|s| (s.ln(), c)))
        .collect::<Result<_>>()?;
    if weights.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let eta = spec.eta_f64();
    let h = |y: f64| -> f64 {
        let logs: Vec<f64> = weights.iter().map(|(ls, c)| ls + c.ln_abs_at_log(y)).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return top;
        }
        let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        y - (eta * y).exp() + top + sum.ln()
    };
    let cut = 1e-18f64.ln();
    // The exponential damping dominates once e^{ηy} outgrows the polynomial degree.
    let degree = coeffs
        .terms
        .values()
        .filter_map(|c| c.max_exponent())
        .map(to_f64)
        .fold(0.0, f64::max);
    let mut end = ((degree + 2.0) / eta).ln().max(1.0) / eta + 1.0 / eta;
    let grid = |end: f64| -> Vec<(f64, f64)> { (0..=400).map(|k| end * k as f64 / 400.0).map(|y| (y, h(y))).collect() };
    let mut samples = grid(end);
    loop {
        let top = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        if samples.last().expect("grid").1 - top < cut {
            break;
        }
        end *= 1.5;
        samples = grid(end);
    }
    let (peak_y, top) = samples
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    if !top.is_finite() {
        return Err(Error::Quadrature("amplitude vanished on the whole sample grid".into()));
    }
    let last = samples
        .iter()
        .rposition(|s| s.1 - top > cut)
        .map(|k| samples[(k + 1).min(samples.len() - 1)].0)
        .unwrap_or(end);
    let mut points = vec![0.0];
    if peak_y > 0.0 && peak_y < last {
        points.push(peak_y);
    }
    points.push(last);
    let res = integrate(
        |y| {
            let v = h(y) - top;
            if v.is_finite() {
                v.exp()
            } else {
                0.0
            }
        },
        &points,
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_panels: 4000,
        },
    )?;
    Ok(top + res.value.ln())
}

pub fn iterate_norm_estimate(coeffs: &ACoefficients, spec: &WavepacketSpec, bump: &BumpFunction) -> Result<f64> {
    let l = ln_iterate_norm_estimate(coeffs, spec, bump)?;
    let v = l.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("iterate norm estimate = exp({l})")))
    }
}

/// `ln` of the norm estimates of the iterates `k = 0..=k_max` along the
/// cyclic sequence, with the construction's own bump.
pub fn ln_iterate_norms(spec: &WavepacketSpec, system: &SymbolSystem, k_max: usize) -> Result<Vec<f64>> {
    let degree = system.symbols().iter().map(|p| p.degree() as usize).max().unwrap_or(0);
    let bump = spec.bump((degree * k_max).min(super::MAX_BUMP_ORDER))?;
    let mut coeffs = ACoefficients::base(system.dim());
    let mut out = Vec::with_capacity(k_max + 1);
    for i in cyclic_sequence(system.len(), k_max + 1) {
        out.push(ln_iterate_norm_estimate(&coeffs, spec, &bump)?);
        coeffs = apply_symbol(spec, &system.symbols()[i], &coeffs)?;
    }
    Ok(out)
}
