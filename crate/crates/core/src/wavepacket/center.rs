//! Derivatives of the packet at its center and the comparison with the
//! derivative bounds of the anisotropic Gevrey class.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::WavepacketSpec;
use crate::error::{Error, Result};
use crate::gevrey::{log_derivative_bound, GevreyParams};
use crate::polyhedron::NewtonPolyhedron;
use crate::quadrature::ln_center_integral;
use crate::rational::{to_f64, Rational};
use crate::symbol::MultiIndex;

fn check_dim(spec: &WavepacketSpec, beta: &MultiIndex) -> Result<()> {
    if beta.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: beta.dim(),
        });
    }
    Ok(())
}

/// `ln |d^β u(x0)| = ln |ξ0^β| + ln ∫_1^∞ r^{<β,q>} e^{-r^η} dr`.
pub fn ln_abs_derivative_at_center(spec: &WavepacketSpec, beta: &MultiIndex) -> Result<f64> {
    check_dim(spec, beta)?;
    let a = to_f64(&beta.dot(&spec.q));
    let ln_mono: f64 = beta
        .entries()
        .iter()
        .zip(&spec.xi0)
        .map(|(&b, x)| b as f64 * x.abs().ln())
        .sum();
    Ok(ln_mono + ln_center_integral(a, spec.eta_f64())?)
}

/// `d^β u(x0) = i^{|β|} ξ0^β ∫_1^∞ r^{<β,q>} e^{-r^η} dr`; every derivative
/// of the bump vanishes at the center.
pub fn derivative_at_center(spec: &WavepacketSpec, beta: &MultiIndex) -> Result<Complex64> {
    let ln_abs = ln_abs_derivative_at_center(spec, beta)?;
    let magnitude = ln_abs.exp();
    if !magnitude.is_finite() {
        return Err(Error::Overflow(format!("|d^beta u(x0)| = exp({ln_abs})")));
    }
    let sign: f64 = beta.monomial(&spec.xi0).signum();
    let phase = match beta.order() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    Ok(phase * sign * magnitude)
}

/// Whether `|d^β u(x0)| > (1/(2η)) |ξ0^β| Γ((<β,q>+1)/η)`.
pub fn center_lower_bound_holds(spec: &WavepacketSpec, beta: &MultiIndex) -> Result<bool> {
    let eta = spec.eta_f64();
    let a = to_f64(&beta.dot(&spec.q));
    let ln_mono: f64 = beta
        .entries()
        .iter()
        .zip(&spec.xi0)
        .map(|(&b, x)| b as f64 * x.abs().ln())
        .sum();
    let bound = -(2.0 * eta).ln() + ln_mono + ln_gamma((a + 1.0) / eta);
    Ok(ln_abs_derivative_at_center(spec, beta)? > bound)
}

/// Smallest `m <= m_max` from which the lower bound holds for `mβ` at every
/// order up to `m_max`.
pub fn lower_bound_threshold(spec: &WavepacketSpec, beta: &MultiIndex, m_max: u32) -> Result<Option<u32>> {
    let mut threshold = None;
    for m in (1..=m_max).rev() {
        let mb = MultiIndex::new(beta.entries().iter().map(|b| b * m).collect());
        if center_lower_bound_holds(spec, &mb)? {
            threshold = Some(m);
        } else {
            break;
        }
    }
    Ok(threshold)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViolationRow {
    pub m: u32,
    pub ln_derivative: f64,
    /// `ln` of the bound for each tested constant.
    pub ln_bounds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantSweep {
    pub c: f64,
    /// Orders `m` in the sweep where the derivative exceeds the bound.
    pub exceedances: Vec<u32>,
    /// First exceeding order found past the sweep, if searched.
    pub extended_crossing: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViolationReport {
    pub alpha: MultiIndex,
    pub s: f64,
    pub rows: Vec<ViolationRow>,
    pub constants: Vec<ConstantSweep>,
}

impl ViolationReport {
    /// Every tested constant is exceeded inside the sweep.
    pub fn all_exceeded(&self) -> bool {
        !self.constants.is_empty() && self.constants.iter().all(|c| !c.exceedances.is_empty())
    }

    /// Every tested constant is exceeded inside the sweep or past it.
    pub fn all_exceeded_eventually(&self) -> bool {
        !self.constants.is_empty() && self.constants.iter().all(|c| !c.exceedances.is_empty() || c.extended_crossing.is_some())
    }

    pub fn none_exceeded_for_some_constant(&self) -> bool {
        self.constants.iter().any(|c| c.exceedances.is_empty())
    }
}

fn scaled(alpha: &MultiIndex, m: u64) -> MultiIndex {
    MultiIndex::new(alpha.entries().iter().map(|a| (*a as u64 * m) as u32).collect())
}

/// `ln |d^{mα} u(x0)| - ln bound(mα)`.
fn margin(spec: &WavepacketSpec, f: &NewtonPolyhedron, alpha: &MultiIndex, m: u64, s: f64, c: f64) -> Result<f64> {
    let ma = scaled(alpha, m);
    let params = GevreyParams::new(s, 1.0, c, f)?;
    Ok(ln_abs_derivative_at_center(spec, &ma)? - log_derivative_bound(&ma, &params)?)
}

/// Compares `|d^{mα} u(x0)|` with `C^{m|α|+1} Γ(μ k(mα) + 1)^s` for each
/// `m` in `m_range` and each `C`. `α` must attain the facet:
/// `k(α) = <α,q>`.
pub fn gevrey_violation_check(
    spec: &WavepacketSpec,
    f: &NewtonPolyhedron,
    alpha: &MultiIndex,
    m_range: std::ops::RangeInclusive<u32>,
    s: f64,
    constants: &[f64],
) -> Result<ViolationReport> {
    check_dim(spec, alpha)?;
    let k = f.k_of_index(alpha)?;
    let on_facet: Rational = alpha.dot(&spec.q);
    if k != on_facet || alpha.is_zero() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} does not attain the witness facet")));
    }
    let mut rows = Vec::new();
    let mut sweeps: Vec<ConstantSweep> = constants
        .iter()
        .map(|&c| ConstantSweep {
            c,
            exceedances: Vec::new(),
            extended_crossing: None,
        })
        .collect();
    for m in m_range {
        let ma = scaled(alpha, m as u64);
        let ln_d = ln_abs_derivative_at_center(spec, &ma)?;
        let mut ln_bounds = Vec::with_capacity(constants.len());
        for (sweep, &c) in sweeps.iter_mut().zip(constants) {
            let params = GevreyParams::new(s, 1.0, c, f)?;
            let lb = log_derivative_bound(&ma, &params)?;
            if ln_d > lb {
                sweep.exceedances.push(m);
            }
            ln_bounds.push(lb);
        }
        rows.push(ViolationRow {
            m,
            ln_derivative: ln_d,
            ln_bounds,
        });
    }
    Ok(ViolationReport {
        alpha: alpha.clone(),
        s,
        rows,
        constants: sweeps,
    })
}

/// Searches past `start` by doubling up to `limit` for an order where the
/// derivative exceeds the bound, then bisects back to the first crossing
/// of the eventually increasing margin.
pub fn extended_crossing(spec: &WavepacketSpec, f: &NewtonPolyhedron, alpha: &MultiIndex, s: f64, c: f64, start: u64, limit: u64) -> Result<Option<u64>> {
    let top = alpha.entries().iter().copied().max().unwrap_or(1).max(1) as u64;
    let limit = limit.min(u32::MAX as u64 / top);
    let mut lo = start.max(1);
    if lo > limit {
        return Ok(None);
    }
    if margin(spec, f, alpha, lo, s, c)? > 0.0 {
        return Ok(Some(lo));
    }
    let mut hi = lo;
    loop {
        if hi >= limit {
            return Ok(None);
        }
        hi = (hi * 2).min(limit);
        if margin(spec, f, alpha, hi, s, c)? > 0.0 {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if margin(spec, f, alpha, mid, s, c)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Fills `extended_crossing` for every constant without an exceedance.
pub fn extend_report(report: &mut ViolationReport, spec: &WavepacketSpec, f: &NewtonPolyhedron, limit: u64) -> Result<()> {
    let start = report.rows.last().map(|r| r.m as u64 + 1).unwrap_or(1);
    for sweep in &mut report.constants {
        if sweep.exceedances.is_empty() {
            sweep.extended_crossing = extended_crossing(spec, f, &report.alpha, report.s, sweep.c, start, limit)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::build_polyhedron;
    use crate::rational::int;
    use crate::symbol::{parse_system, SymbolSystem};
    use statrs::function::gamma::gamma_ur;

    fn wave() -> (SymbolSystem, NewtonPolyhedron, WavepacketSpec) {
        let sys = parse_system("xi1^2 - xi2^2", None).unwrap();
        let f = build_polyhedron(&sys).unwrap();
        let q = f.facet_normals()[0].clone();
        let h = 0.5f64.sqrt();
        let spec = WavepacketSpec::new(&sys, &f, &q, &[h, h], &int(2), &int(1), 1.0, None).unwrap();
        (sys, f, spec)
    }

    #[test]
    fn base_case_and_closed_form() {
        let (_, _, spec) = wave();
        let eta = spec.eta_f64();
        let d0 = derivative_at_center(&spec, &MultiIndex::zero(2)).unwrap();
        let exact = gamma_ur(1.0 / eta, 1.0) * statrs::function::gamma::gamma(1.0 / eta) / eta;
        assert!(d0.im == 0.0 && ((d0.re - exact) / exact).abs() < 1e-10);
        let d = derivative_at_center(&spec, &MultiIndex::from([1, 0])).unwrap();
        assert!(d.re == 0.0 && d.im > 0.0);
        let d = derivative_at_center(&spec, &MultiIndex::from([2, 1])).unwrap();
        assert!(d.re == 0.0 && d.im < 0.0);
    }

    #[test]
    fn lower_bound_threshold_found() {
        let (_, _, spec) = wave();
        let t = lower_bound_threshold(&spec, &MultiIndex::from([1, 1]), 30).unwrap();
        assert!(t.is_some());
    }

    #[test]
    fn violation_sweep() {
        let (_, f, spec) = wave();
        let alpha = MultiIndex::from([2, 0]);
        let rep = gevrey_violation_check(&spec, &f, &alpha, 1..=30, 2.0, &[1.0, 10.0]).unwrap();
        assert_eq!(rep.rows.len(), 30);
        assert!(rep.all_exceeded());
        let empty = gevrey_violation_check(&spec, &f, &alpha, 1..=0, 2.0, &[1.0]).unwrap();
        assert!(empty.rows.is_empty());
        assert!(gevrey_violation_check(&spec, &f, &MultiIndex::zero(2), 1..=3, 2.0, &[1.0]).is_err());
    }

    #[test]
    fn crossing_search_is_consistent() {
        let (_, f, spec) = wave();
        let alpha = MultiIndex::from([2, 0]);
        let m = extended_crossing(&spec, &f, &alpha, 2.0, 10.0, 31, 1 << 20).unwrap().unwrap();
        assert!(m > 100 && m < 1000);
        assert!(margin(&spec, &f, &alpha, m, 2.0, 10.0).unwrap() > 0.0);
        assert!(margin(&spec, &f, &alpha, m - 1, 2.0, 10.0).unwrap() <= 0.0);
    }
}
