//! The oscillatory wave packet
//! `u(x) = ∫_1^∞ φ(r^{εq}(x - x0)) exp(-r^η) exp(i <x - x0, r^q ξ0>) dr`
//! built on a non-elliptic direction `ξ0` of the facet `q`, its derivatives
//! at the center, and the amplitudes of the iterates `P_{i_k} ... P_{i_1} u`.

mod bump;
mod center;
mod dichotomy;
mod recursion;

use num_traits::{One, Zero};

pub use bump::{make_bump, make_bump_class, BumpFunction, MAX_BUMP_ORDER};
pub use center::{
    center_lower_bound_holds, derivative_at_center, extend_report, extended_crossing, gevrey_violation_check, ln_abs_derivative_at_center, lower_bound_threshold,
    ConstantSweep, ViolationReport, ViolationRow,
};
pub use dichotomy::{default_alpha, run_dichotomy, DichotomyConfig, DichotomyReport, EXPONENT_SLACK};
pub use recursion::{
    apply_symbol, cyclic_sequence, iterate_coefficients, iterate_norm_estimate, ln_iterate_norm_estimate, ln_iterate_norms, ACoefficients,
};

use crate::error::{Error, Result};
use crate::polyhedron::NewtonPolyhedron;
use crate::rational::{self, to_f64, Rational};
use crate::symbol::SymbolSystem;

/// Smallest admissible witness component.
pub const MIN_WITNESS_COMPONENT: f64 = 1e-3;

/// Largest `ε` allowed by both caps and the matching `η`:
/// `ε = min(μ(s-σ)/(2μs-σ), min over support terms with <β,q> < 1 of μ(1-<β,q>))`,
/// `η = (1 - ε/μ)/(μ s)`. The origin always counts as a support term.
pub fn choose_parameters(s: &Rational, sigma: &Rational, f: &NewtonPolyhedron, system: &SymbolSystem, q: &[Rational]) -> Result<(Rational, Rational)> {
    let one = Rational::one();
    if sigma < &one {
        return Err(Error::InvalidParameter(format!("sigma must be >= 1, got {}", rational::format(sigma))));
    }
    if s <= sigma {
        return Err(Error::InvalidParameter(format!(
            "the construction needs s > sigma, got s = {}, sigma = {}",
            rational::format(s),
            rational::format(sigma)
        )));
    }
    let mu = f.mu()?.clone();
    if !f.facet_normals().iter().any(|n| n.as_slice() == q) {
        return Err(Error::InvalidParameter("q is not a facet normal of the polyhedron".into()));
    }
    let two = rational::int(2);
    let cap1 = &mu * (s - sigma) / (&two * &mu * s - sigma);
    let mut cap2 = mu.clone();
    for beta in system.support() {
        let bq = beta.dot(q);
        if bq < one {
            let c = &mu * (&one - &bq);
            if c < cap2 {
                cap2 = c;
            }
        }
    }
    let eps = if cap1 <= cap2 { cap1 } else { cap2 };
    let eta = (&one - &eps / &mu) / (&mu * s);
    Ok((eps, eta))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WavepacketSpec {
    pub x0: Vec<f64>,
    pub q: Vec<Rational>,
    pub xi0: Vec<f64>,
    pub s: Rational,
    pub sigma: Rational,
    /// Gevrey class of the bump, strictly between `sigma` and `s`.
    pub bump_sigma: Rational,
    pub epsilon: Rational,
    pub eta: Rational,
    pub delta: f64,
    pub mu: Rational,
}

impl WavepacketSpec {
    /// Builds the construction for a witness `(q, ξ0)`. The bump class is
    /// the midpoint `(σ + s)/2`, and `ε`, `η` are chosen for that class.
    pub fn new(
        system: &SymbolSystem,
        f: &NewtonPolyhedron,
        q: &[Rational],
        xi0: &[f64],
        s: &Rational,
        sigma: &Rational,
        delta: f64,
        x0: Option<Vec<f64>>,
    ) -> Result<Self> {
        let dim = f.dim();
        if q.len() != dim || xi0.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: if q.len() != dim { q.len() } else { xi0.len() },
            });
        }
        let norm = xi0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Witness(format!("xi0 must be a unit vector, |xi0| = {norm}")));
        }
        if xi0.iter().any(|x| x.abs() < MIN_WITNESS_COMPONENT) {
            return Err(Error::Witness(format!(
                "xi0 has a component below {MIN_WITNESS_COMPONENT}; ask for a better-conditioned witness"
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        let x0 = x0.unwrap_or_else(|| vec![0.0; dim]);
        if x0.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x0.len(),
            });
        }
        let bump_sigma = (sigma + s) / rational::int(2);
        let (epsilon, eta) = choose_parameters(s, &bump_sigma, f, system, q)?;
        Ok(WavepacketSpec {
            x0,
            q: q.to_vec(),
            xi0: xi0.to_vec(),
            s: s.clone(),
            sigma: sigma.clone(),
            bump_sigma,
            epsilon,
            eta,
            delta,
            mu: f.mu()?.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn eta_f64(&self) -> f64 {
        to_f64(&self.eta)
    }

    pub fn q_f64(&self) -> Vec<f64> {
        self.q.iter().map(to_f64).collect()
    }

    /// `1/(μη)`, the Gevrey index the packet actually attains.
    pub fn attained_index(&self) -> Rational {
        (&self.mu * &self.eta).recip()
    }

    /// Isotropic Gevrey class of the bump, `σ_b μ min_j q_j`, so that
    /// `d^γ φ` stays within the anisotropic class `σ_b` along `q`.
    pub fn bump_class(&self) -> f64 {
        let qmin = self.q.iter().min().expect("nonempty q");
        to_f64(&(&self.bump_sigma * &self.mu * qmin))
    }

    /// The bump of this construction, differentiable to `order`.
    pub fn bump(&self, order: usize) -> Result<BumpFunction> {
        make_bump_class(self.dim(), self.delta, order, self.bump_class())
    }

    /// The comparison index `1/(μη) + 1/10` used for the membership side.
    pub fn weaker_index(&self) -> Rational {
        self.attained_index() + rational::ratio(1, 10)
    }
}

impl WavepacketSpec {
    pub(crate) fn check_epsilon(&self) -> Result<()> {
        if self.epsilon <= Rational::zero() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::build_polyhedron;
    use crate::rational::{int, ratio};
    use crate::symbol::parse_system;

    #[test]
    fn heat_parameters() {
        let sys = parse_system("i*xi1 + xi2^2", None).unwrap();
        let f = build_polyhedron(&sys).unwrap();
        let q = f.facet_normals()[0].clone();
        let (eps, eta) = choose_parameters(&int(2), &int(1), &f, &sys, &q).unwrap();
        assert_eq!(eps, ratio(2, 7));
        assert_eq!(eta, ratio(3, 14));
        let mu = f.mu().unwrap();
        assert!((mu * &eta).recip() > int(2));
        assert!(choose_parameters(&int(1), &int(1), &f, &sys, &q).is_err());
    }

    #[test]
    fn lower_order_terms_cap_epsilon() {
        // q = (1/3, 1/4), mu = 4; the term (2,1) has <beta,q> = 11/12.
        let sys = parse_system("xi1^3 + xi2^4 + xi1^2*xi2", None).unwrap();
        let f = build_polyhedron(&sys).unwrap();
        let q = f.facet_normals()[0].clone();
        assert_eq!(q, vec![ratio(1, 3), ratio(1, 4)]);
        let (eps, _) = choose_parameters(&int(20), &int(1), &f, &sys, &q).unwrap();
        assert_eq!(eps, ratio(1, 3));
        let (eps, _) = choose_parameters(&int(2), &int(1), &f, &sys, &q).unwrap();
        assert_eq!(eps, ratio(4, 15));
    }

    #[test]
    fn wave_spec_uses_midpoint_class() {
        let sys = parse_system("xi1^2 - xi2^2", None).unwrap();
        let f = build_polyhedron(&sys).unwrap();
        let q = f.facet_normals()[0].clone();
        let h = 0.5f64.sqrt();
        let spec = WavepacketSpec::new(&sys, &f, &q, &[h, h], &int(2), &int(1), 1.0, None).unwrap();
        assert_eq!(spec.bump_sigma, ratio(3, 2));
        assert_eq!(spec.epsilon, ratio(2, 13));
        assert_eq!(spec.eta, ratio(3, 13));
        assert!(spec.attained_index() > int(2));
        assert!(WavepacketSpec::new(&sys, &f, &q, &[1.0, 0.0], &int(2), &int(1), 1.0, None).is_err());
        assert!(WavepacketSpec::new(&sys, &f, &q, &[h, h], &int(1), &int(1), 1.0, None).is_err());
    }
}
