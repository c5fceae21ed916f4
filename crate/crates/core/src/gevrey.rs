//! Gevrey bound sequences and the Γ-function toolkit.
//!
//! Every bound is computed as a logarithm first; the plain forms only
//! exponentiate at the end and report overflow instead of returning `inf`.

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::polyhedron::NewtonPolyhedron;
use crate::rational::to_f64;
use crate::symbol::MultiIndex;

/// Which ordering of `(s, sigma)` a parameter pair satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `sigma > s >= 1`: the hypothesis of the elliptic-iterates inclusion.
    SigmaAboveS,
    /// `s > sigma >= 1`: the hypothesis of the counterexample construction.
    SAboveSigma,
    Equal,
}

impl Regime {
    pub fn of(s: f64, sigma: f64) -> Regime {
        if sigma > s {
            Regime::SigmaAboveS
        } else if s > sigma {
            Regime::SAboveSigma
        } else {
            Regime::Equal
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Regime::SigmaAboveS => "sigma > s >= 1 (inclusion hypothesis)",
            Regime::SAboveSigma => "s > sigma >= 1 (counterexample hypothesis)",
            Regime::Equal => "s = sigma (neither strict ordering)",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GevreyParams<'a> {
    pub s: f64,
    pub sigma: f64,
    pub c: f64,
    pub f: &'a NewtonPolyhedron,
}

impl<'a> GevreyParams<'a> {
    pub fn new(s: f64, sigma: f64, c: f64, f: &'a NewtonPolyhedron) -> Result<Self> {
        if !(s >= 1.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("s must be >= 1, got {s}")));
        }
        if !(sigma >= 1.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be >= 1, got {sigma}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must be > 0, got {c}")));
        }
        f.require_regular()?;
        Ok(GevreyParams { s, sigma, c, f })
    }

    pub fn regime(&self) -> Regime {
        Regime::of(self.s, self.sigma)
    }

    pub fn mu(&self) -> f64 {
        to_f64(self.f.mu().expect("validated regular"))
    }
}

fn finite_exp(log: f64, what: &str) -> Result<f64> {
    let v = log.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("{what} = exp({log}) exceeds the double range; use the log form")))
    }
}

/// `ln[C^{|alpha|+1} Γ(mu k(alpha) + 1)^s]`.
pub fn log_derivative_bound(alpha: &MultiIndex, p: &GevreyParams) -> Result<f64> {
    log_derivative_bound_any(alpha, p.s, p.c, p.f)
}

/// The same log-bound for any `s > 0`, used where `s < 1` is only a warning.
pub fn log_derivative_bound_any(alpha: &MultiIndex, s: f64, c: f64, f: &NewtonPolyhedron) -> Result<f64> {
    let mu = to_f64(&f.require_regular()?.mu);
    let k = to_f64(&f.k_of_index(alpha)?);
    Ok((alpha.order() as f64 + 1.0) * c.ln() + s * ln_gamma(mu * k + 1.0))
}

/// `C^{|alpha|+1} Γ(mu k(alpha) + 1)^s`.
pub fn derivative_bound(alpha: &MultiIndex, p: &GevreyParams) -> Result<f64> {
    finite_exp(log_derivative_bound(alpha, p)?, "derivative bound")
}

/// `ln[C^{l+1} (l!)^{s mu}]` for an explicit `mu`.
pub fn log_iterate_bound_mu(l: u64, s: f64, mu: f64, c: f64) -> f64 {
    (l as f64 + 1.0) * c.ln() + s * mu * ln_gamma(l as f64 + 1.0)
}

pub fn log_iterate_bound(l: u64, p: &GevreyParams) -> f64 {
    log_iterate_bound_mu(l, p.s, p.mu(), p.c)
}

/// `C^{l+1} (l!)^{s mu}`.
pub fn iterate_bound(l: u64, p: &GevreyParams) -> Result<f64> {
    finite_exp(log_iterate_bound(l, p), "iterate bound")
}

/// `Γ(a) a (a+1) ... (a+p-1)`.
pub fn gamma_shift(a: f64, p: u32) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma_shift needs a > 0, got {a}")));
    }
    Ok((0..p).fold(gamma(a), |acc, i| acc * (a + i as f64)))
}

fn log_add_exp(x: f64, y: f64) -> f64 {
    let m = x.max(y);
    m + ((x - m).exp() + (y - m).exp()).ln()
}

/// Log-space evaluation of
/// `λ^a Γ(b+c+1)^σ τ^c <= 2^{σ/ω} [λ^{a+c} Γ(b+1)^σ + Γ(a+b+c+1)^σ τ^{a+c}]`.
/// Returns `(holds, lhs, rhs)` with both sides as logarithms.
pub fn convexity_sides(lambda: f64, tau: f64, a: f64, b: f64, c: f64, sigma: f64, omega: f64) -> Result<(bool, f64, f64)> {
    let positive = |x: f64| x > 0.0 && x.is_finite();
    if !positive(lambda) || !positive(tau) || !positive(omega) {
        return Err(Error::InvalidParameter("lambda, tau and omega must be positive".into()));
    }
    if a < omega || b < omega || c < omega || !a.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("a, b, c must be >= omega = {omega}")));
    }
    if !(sigma >= 1.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be >= 1, got {sigma}")));
    }
    let (ll, lt) = (lambda.ln(), tau.ln());
    let lhs = a * ll + sigma * ln_gamma(b + c + 1.0) + c * lt;
    let rhs = sigma / omega * std::f64::consts::LN_2
        + log_add_exp(
            (a + c) * ll + sigma * ln_gamma(b + 1.0),
            sigma * ln_gamma(a + b + c + 1.0) + (a + c) * lt,
        );
    Ok((lhs <= rhs + 1e-12 * (1.0 + rhs.abs()), lhs, rhs))
}

pub fn check_convexity_inequality(lambda: f64, tau: f64, a: f64, b: f64, c: f64, sigma: f64, omega: f64) -> Result<bool> {
    convexity_sides(lambda, tau, a, b, c, sigma, omega).map(|(ok, _, _)| ok)
}

/// Least `C` with
/// `γ!/(β!(γ-β)!) <= C^{<γ-β,q>} Γ(<γ,q>+1) / (Γ(<β,q>+1) Γ(<γ-β,q>+1))`
/// over all `β <= γ`, `|γ| <= bound`.
pub fn binomial_gamma_constant(q: &[f64], bound: u32) -> Result<f64> {
    if q.is_empty() || q.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter("q must be strictly positive".into()));
    }
    let dim = q.len();
    let lnfact = |m: u32| ln_gamma(m as f64 + 1.0);
    let dot = |a: &MultiIndex| a.entries().iter().zip(q).map(|(&e, w)| e as f64 * w).sum::<f64>();
    let all = MultiIndex::all_up_to(dim, bound);
    let mut worst = 0.0f64;
    for gamma_ in &all {
        let gq = dot(gamma_);
        for beta in &all {
            let Some(rest) = gamma_.checked_sub(beta) else {
                continue;
            };
            if rest.is_zero() {
                continue;
            }
            let rq = dot(&rest);
            let lhs: f64 = gamma_
                .entries()
                .iter()
                .zip(beta.entries())
                .map(|(&g, &b)| lnfact(g) - lnfact(b) - lnfact(g - b))
                .sum();
            let rhs = ln_gamma(gq + 1.0) - ln_gamma(dot(beta) + 1.0) - ln_gamma(rq + 1.0);
            worst = worst.max((lhs - rhs) / rq);
        }
    }
    Ok(worst.exp())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit {
    pub c_fit: f64,
    pub s_fit: f64,
    /// Root-mean-square residual of the log fit.
    pub residual: f64,
    pub degenerate: bool,
}

/// Fits `ln norms_l = (l+1) ln C + s mu ln(l!)`.
pub fn fit_growth(norms: &[f64], mu: f64) -> Result<GrowthFit> {
    if norms.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter("growth fit needs positive finite entries".into()));
    }
    let logs: Vec<f64> = norms.iter().map(|x| x.ln()).collect();
    fit_growth_log(&logs, mu)
}

/// As [`fit_growth`], taking `ln norms_l` directly.
pub fn fit_growth_log(log_norms: &[f64], mu: f64) -> Result<GrowthFit> {
    if log_norms.len() < 4 {
        return Err(Error::InvalidParameter(format!("growth fit needs >= 4 entries, got {}", log_norms.len())));
    }
    if log_norms.iter().any(|x| !x.is_finite()) || !(mu > 0.0) {
        return Err(Error::InvalidParameter("growth fit needs finite logs and mu > 0".into()));
    }
    let x1: Vec<f64> = (0..log_norms.len()).map(|l| l as f64 + 1.0).collect();
    let x2: Vec<f64> = (0..log_norms.len()).map(|l| mu * ln_gamma(l as f64 + 1.0)).collect();
    let y = log_norms;
    let first = y[0];
    let degenerate = y.iter().all(|v| *v == first);
    let rms = |lc: f64, s: f64| -> f64 {
        let ss: f64 = (0..y.len()).map(|i| (y[i] - lc * x1[i] - s * x2[i]).powi(2)).sum();
        (ss / y.len() as f64).sqrt()
    };
    if degenerate {
        let lc = dotp(&x1, y) / dotp(&x1, &x1);
        return Ok(GrowthFit {
            c_fit: lc.exp(),
            s_fit: 0.0,
            residual: rms(lc, 0.0),
            degenerate: true,
        });
    }
    let (a11, a12, a22) = (dotp(&x1, &x1), dotp(&x1, &x2), dotp(&x2, &x2));
    let (b1, b2) = (dotp(&x1, y), dotp(&x2, y));
    let det = a11 * a22 - a12 * a12;
    let lc = (b1 * a22 - b2 * a12) / det;
    let s = (a11 * b2 - a12 * b1) / det;
    Ok(GrowthFit {
        c_fit: lc.exp(),
        s_fit: s,
        residual: rms(lc, s),
        degenerate: false,
    })
}

fn dotp(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::build_polyhedron;
    use crate::symbol::parse_system;
    use proptest::prelude::*;

    fn poly(text: &str) -> NewtonPolyhedron {
        build_polyhedron(&parse_system(text, None).unwrap()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn derivative_bound_examples() {
        let lap = poly("xi1^2 + xi2^2");
        let p = GevreyParams::new(1.0, 1.0, 1.0, &lap).unwrap();
        assert!(rel(derivative_bound(&MultiIndex::from([2, 0]), &p).unwrap(), 2.0) < 1e-12);
        let p7 = GevreyParams::new(1.5, 1.0, 7.0, &lap).unwrap();
        assert!(rel(derivative_bound(&MultiIndex::zero(2), &p7).unwrap(), 7.0) < 1e-12);
        let heat = poly("i*xi1 + xi2^2");
        let p = GevreyParams::new(2.0, 1.0, 1.0, &heat).unwrap();
        assert!(rel(derivative_bound(&MultiIndex::from([0, 2]), &p).unwrap(), 4.0) < 1e-12);
        let big = MultiIndex::from([400, 0]);
        assert!(matches!(derivative_bound(&big, &p), Err(Error::Overflow(_))));
        assert!(log_derivative_bound(&big, &p).unwrap().is_finite());
    }

    #[test]
    fn iterate_bound_examples() {
        let lap = poly("xi1^2 + xi2^2");
        let p = GevreyParams::new(1.0, 1.0, 1.0, &lap).unwrap();
        assert!(rel(iterate_bound(0, &p).unwrap(), 1.0) < 1e-12);
        assert!(rel(iterate_bound(3, &p).unwrap(), 36.0) < 1e-12);
        let p = GevreyParams::new(2.0, 1.0, 3.0, &lap).unwrap();
        assert!(rel(iterate_bound(2, &p).unwrap(), 432.0) < 1e-12);
    }

    #[test]
    fn params_validation() {
        let lap = poly("xi1^2 + xi2^2");
        assert!(GevreyParams::new(0.5, 1.0, 1.0, &lap).is_err());
        assert!(GevreyParams::new(1.0, 1.0, 0.0, &lap).is_err());
        assert!(GevreyParams::new(1.0, 1.0, 1.0, &poly("xi1^2\n# dim: 2")).is_err());
        assert_eq!(GevreyParams::new(2.0, 1.0, 1.0, &lap).unwrap().regime(), Regime::SAboveSigma);
        assert_eq!(Regime::of(1.0, 2.0), Regime::SigmaAboveS);
    }

    #[test]
    fn gamma_shift_examples() {
        assert!(rel(gamma_shift(1.0, 3).unwrap(), 6.0) < 1e-14);
        assert!(rel(gamma_shift(0.5, 1).unwrap(), std::f64::consts::PI.sqrt() / 2.0) < 1e-14);
        assert!(gamma_shift(0.0, 1).is_err());
    }

    #[test]
    fn convexity_examples() {
        let (ok, lhs, rhs) = convexity_sides(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(ok);
        assert!(rel(lhs.exp(), 2.0) < 1e-12);
        assert!(rel(rhs.exp(), 14.0) < 1e-12);
        assert!(check_convexity_inequality(1.0, 1.0, 0.5, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn binomial_constant_examples() {
        assert!((binomial_gamma_constant(&[1.0], 12).unwrap() - 1.0).abs() < 1e-9);
        assert!((binomial_gamma_constant(&[1.0, 1.0], 12).unwrap() - 1.0).abs() < 1e-9);
        let c = binomial_gamma_constant(&[1.0, 0.5], 12).unwrap();
        assert!(c.is_finite() && c >= 1.0);
        assert!(binomial_gamma_constant(&[1.0, 0.5], 6).unwrap() <= c);
        assert!(binomial_gamma_constant(&[1.0, 0.0], 4).is_err());
    }

    #[test]
    fn growth_fit_examples() {
        let fact = |l: u64| (1..=l).map(|i| i as f64).product::<f64>();
        let a: Vec<f64> = (0..10).map(|l| fact(l).powi(2)).collect();
        let fit = fit_growth(&a, 2.0).unwrap();
        assert!((fit.s_fit - 1.0).abs() < 1e-6 && (fit.c_fit - 1.0).abs() < 1e-6);
        let b: Vec<f64> = (0..10).map(|l| 3f64.powi(l as i32 + 1) * fact(l).powi(4)).collect();
        let fit = fit_growth(&b, 2.0).unwrap();
        assert!((fit.s_fit - 2.0).abs() < 1e-6 && (fit.c_fit - 3.0).abs() < 1e-6);
        let flat = fit_growth(&[5.0; 6], 2.0).unwrap();
        assert!(flat.degenerate && flat.s_fit == 0.0);
        assert!(fit_growth(&[1.0, 2.0, 3.0], 2.0).is_err());
    }

    proptest! {
        #[test]
        fn iterate_ratio(l in 0u64..200, s in 1.0f64..4.0, mu in 1.0f64..10.0, c in 0.1f64..50.0) {
            let d = log_iterate_bound_mu(l + 1, s, mu, c) - log_iterate_bound_mu(l, s, mu, c);
            let expect = c.ln() + s * mu * ((l + 1) as f64).ln();
            prop_assert!((d - expect).abs() <= 1e-12 * expect.abs().max(1.0) * 10.0);
        }

        #[test]
        fn shift_matches_gamma(a in 0.05f64..20.0, p in 1u32..20) {
            let direct = gamma(a + p as f64);
            prop_assert!(rel(gamma_shift(a, p).unwrap(), direct) < 1e-12);
        }

        #[test]
        fn convexity_holds(lambda in 1e-3f64..1e3, tau in 1e-3f64..1e3, omega in 0.05f64..2.0,
                           da in 0.0f64..20.0, db in 0.0f64..20.0, dc in 0.0f64..20.0, sigma in 1.0f64..5.0) {
            let ok = check_convexity_inequality(lambda, tau, omega + da, omega + db, omega + dc, sigma, omega).unwrap();
            prop_assert!(ok);
        }

        #[test]
        fn fit_inverts_generation(lc in -2.0f64..3.0, s in 0.5f64..3.0, mu in 1.0f64..8.0) {
            let logs: Vec<f64> = (0..12).map(|l| log_iterate_bound_mu(l, s, mu, lc.exp())).collect();
            let fit = fit_growth_log(&logs, mu).unwrap();
            prop_assert!((fit.s_fit - s).abs() < 1e-6);
            prop_assert!((fit.c_fit.ln() - lc).abs() < 1e-6);
        }

        #[test]
        fn derivative_bound_log_convex(m0 in 1u32..4, m1 in 0u32..4, s in 1.0f64..3.0) {
            let f = poly("xi1^4 + xi1^2*xi2^4 + xi2^6");
            let p = GevreyParams::new(s, 1.0, 2.0, &f).unwrap();
            let alpha = |m: u32| MultiIndex::from([m * m0, m * m1]);
            let logs: Vec<f64> = (0..12).map(|m| log_derivative_bound(&alpha(m), &p).unwrap()).collect();
            for w in logs.windows(3) {
                prop_assert!(w[2] - w[1] >= w[1] - w[0] - 1e-9);
            }
        }
    }
}
