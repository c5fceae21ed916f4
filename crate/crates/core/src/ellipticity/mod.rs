//! Quasi-homogeneous facet parts and the multi-quasi-ellipticity decision.

mod inequality;
mod proposition;

use num_traits::One;

pub use inequality::{check_inequality, InequalityConfig, InequalityEstimate};
pub use proposition::{check_proposition, EllipticityConfig, EllipticityVerdict, FacetCertificate, FacetOutcome, LevelResult, Status, Witness};

use crate::error::{Error, Result};
use crate::polyhedron::NewtonPolyhedron;
use crate::rational::{to_f64, Rational};
use crate::symbol::OperatorSymbol;

/// Terms of a symbol lying on the facet `<alpha,q> = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiHomogeneousPart {
    pub q: Vec<Rational>,
    pub part: OperatorSymbol,
}

impl QuasiHomogeneousPart {
    pub fn evaluate(&self, xi: &[f64]) -> Result<num_complex::Complex64> {
        self.part.evaluate(xi)
    }
}

/// `P_q(xi) = sum over <alpha,q> = 1 of a_alpha xi^alpha`.
pub fn qh_part(p: &OperatorSymbol, q: &[Rational]) -> Result<QuasiHomogeneousPart> {
    if q.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.len(),
        });
    }
    if q.iter().any(|x| *x <= Rational::from_integer(0.into())) {
        return Err(Error::InvalidParameter("facet normal must be strictly positive".into()));
    }
    let one = Rational::one();
    Ok(QuasiHomogeneousPart {
        q: q.to_vec(),
        part: p.filter(|a| a.dot(q) == one),
    })
}

/// Terms strictly inside `F`, i.e. with `k(alpha) < 1`.
pub fn interior_part(p: &OperatorSymbol, f: &NewtonPolyhedron) -> Result<OperatorSymbol> {
    f.require_regular()?;
    let one = Rational::one();
    Ok(p.filter(|a| f.k_of_index(a).map(|k| k < one).unwrap_or(false)))
}

/// `r^q xi` componentwise.
pub fn scale_along(q: &[f64], r: f64, xi: &[f64]) -> Vec<f64> {
    xi.iter().zip(q).map(|(x, qj)| x * r.powf(*qj)).collect()
}

/// Moves `xi` along its orbit `r^q xi` onto the Euclidean unit sphere.
/// Facet parts vanish on whole orbits, so the result is again a zero.
pub fn normalize_witness(q: &[Rational], xi: &[f64]) -> Result<Vec<f64>> {
    const MIN_COMPONENT: f64 = 1e-3;
    if xi.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: xi.len(),
        });
    }
    if xi.iter().any(|x| *x == 0.0 || !x.is_finite()) {
        return Err(Error::Witness("witness has a zero component".into()));
    }
    let qf: Vec<f64> = q.iter().map(to_f64).collect();
    let norm_at = |t: f64| -> f64 { scale_along(&qf, t.exp(), xi).iter().map(|x| x * x).sum::<f64>() };
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while norm_at(lo) > 1.0 {
        lo *= 2.0;
    }
    while norm_at(hi) < 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut out = scale_along(&qf, (0.5 * (lo + hi)).exp(), xi);
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    out.iter_mut().for_each(|x| *x /= norm);
    if out.iter().any(|x| x.abs() < MIN_COMPONENT) {
        return Err(Error::Witness(format!(
            "normalized witness has a component below {MIN_COMPONENT}; a better-conditioned witness is needed"
        )));
    }
    Ok(out)
}

/// The witness `(q, xi0)` of a non-elliptic verdict, on the unit sphere.
pub fn witness_for_wavepacket(verdict: &EllipticityVerdict) -> Result<(Vec<Rational>, Vec<f64>)> {
    let w = match (&verdict.status, &verdict.witness) {
        (Status::NotElliptic, Some(w)) => w,
        _ => return Err(Error::Witness("verdict carries no witness".into())),
    };
    Ok((w.q.clone(), normalize_witness(&w.q, &w.xi0)?))
}
