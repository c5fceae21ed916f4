//! The two halves of the counterexample: derivatives at the center outgrow
//! every `G^{F,s}` bound, while the iterates grow like `(k!)^{sμ}`.

use super::{extend_report, gevrey_violation_check, ln_iterate_norms, lower_bound_threshold, WavepacketSpec};
use crate::error::{Error, Result};
use crate::gevrey::{fit_growth_log, GrowthFit};
use crate::polyhedron::NewtonPolyhedron;
use crate::rational::{to_f64, Rational};
use crate::symbol::{MultiIndex, SymbolSystem};
use crate::wavepacket::ViolationReport;

/// Slack on the fitted exponent of `ln(k!)`.
pub const EXPONENT_SLACK: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyConfig {
    pub constants: Vec<f64>,
    pub m_max: u32,
    pub k_max: usize,
    /// Largest order probed past the sweep when a constant is not exceeded.
    pub extend_limit: u64,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        DichotomyConfig {
            constants: vec![1.0, 10.0, 100.0],
            m_max: 30,
            k_max: 8,
            extend_limit: u32::MAX as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyReport {
    pub alpha: MultiIndex,
    /// Comparison against `G^{F,s}`.
    pub violation: ViolationReport,
    /// Comparison against the weaker index `1/(μη) + 1/10`.
    pub weaker: ViolationReport,
    /// First `m <= m_max` from which the center lower bound holds.
    pub lower_bound_from: Option<u32>,
    pub ln_iterate_norms: Vec<f64>,
    pub fit: GrowthFit,
    pub mu: f64,
    /// `s μ + slack`.
    pub exponent_limit: f64,
}

impl DichotomyReport {
    pub fn fitted_exponent(&self) -> f64 {
        self.fit.s_fit * self.mu
    }

    /// Every constant is exceeded, inside the sweep or past it.
    pub fn violation_observed(&self) -> bool {
        self.violation.all_exceeded_eventually()
    }

    pub fn membership_observed(&self) -> bool {
        !self.fit.degenerate && self.fitted_exponent() <= self.exponent_limit
    }

    pub fn observed(&self) -> bool {
        self.violation_observed() && self.membership_observed()
    }
}

/// A multi-index on which `q` attains `k(α, F)`: the first such unit
/// vector, else a vertex on the facet.
pub fn default_alpha(f: &NewtonPolyhedron, q: &[Rational]) -> Result<MultiIndex> {
    let dim = f.dim();
    for j in 0..dim {
        let e = MultiIndex::unit(dim, j);
        if f.k_of_index(&e)? == e.dot(q) {
            return Ok(e);
        }
    }
    f.vertices()
        .iter()
        .find(|v| !v.is_zero() && v.dot(q) == Rational::from_integer(1.into()))
        .cloned()
        .ok_or_else(|| Error::InvalidParameter("no vertex on the witness facet".into()))
}

pub fn run_dichotomy(
    spec: &WavepacketSpec,
    system: &SymbolSystem,
    f: &NewtonPolyhedron,
    alpha: Option<MultiIndex>,
    cfg: &DichotomyConfig,
) -> Result<DichotomyReport> {
    let alpha = match alpha {
        Some(a) => a,
        None => default_alpha(f, &spec.q)?,
    };
    if alpha.is_zero() {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let s = to_f64(&spec.s);
    let mut violation = gevrey_violation_check(spec, f, &alpha, 1..=cfg.m_max, s, &cfg.constants)?;
    extend_report(&mut violation, spec, f, cfg.extend_limit)?;
    let weaker = gevrey_violation_check(spec, f, &alpha, 1..=cfg.m_max, to_f64(&spec.weaker_index()), &cfg.constants)?;
    let lower_bound_from = lower_bound_threshold(spec, &alpha, cfg.m_max)?;
    let ln_norms = ln_iterate_norms(spec, system, cfg.k_max)?;
    let mu = to_f64(&spec.mu);
    let fit = fit_growth_log(&ln_norms, mu)?;
    Ok(DichotomyReport {
        alpha,
        violation,
        weaker,
        lower_bound_from,
        ln_iterate_norms: ln_norms,
        fit,
        mu,
        exponent_limit: s * mu + EXPONENT_SLACK,
    })
}
