use std::collections::BTreeMap;

use mqe_core::ellipticity::{
    check_inequality, check_proposition, normalize_witness, qh_part, witness_for_wavepacket, EllipticityConfig, InequalityConfig, Status,
};
use mqe_core::gevrey::{binomial_gamma_constant, check_convexity_inequality, derivative_bound, fit_growth, gamma_shift, iterate_bound, GevreyParams};
use mqe_core::rational::{int, ratio, to_f64, Rational};
use mqe_core::symbol::{coeff, Coeff};
use mqe_core::verify::center_integral_closed_form;
use mqe_core::wavepacket::{
    apply_symbol, choose_parameters, derivative_at_center, gevrey_violation_check, iterate_coefficients, ln_iterate_norm_estimate,
    lower_bound_threshold, make_bump, ACoefficients, WavepacketSpec,
};
use mqe_core::{build_polyhedron, parse_symbol, parse_system, MultiIndex, NewtonPolyhedron, RPolynomial, SymbolSystem};
use num_complex::Complex64;

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

fn terms(p: &mqe_core::OperatorSymbol) -> BTreeMap<MultiIndex, Coeff> {
    p.terms().clone()
}

fn poly(src: &str) -> (SymbolSystem, NewtonPolyhedron) {
    let sys = parse_system(src, None).unwrap();
    let f = build_polyhedron(&sys).unwrap();
    (sys, f)
}

fn rv(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(p, q)| ratio(p, q)).collect()
}

#[test]
fn parse_examples() {
    let one = coeff(int(1), int(0));
    let lap = parse_symbol("xi1^2 + xi2^2", 2).unwrap();
    assert_eq!(terms(&lap), BTreeMap::from([(mi(&[2, 0]), one.clone()), (mi(&[0, 2]), one.clone())]));
    assert_eq!(terms(&parse_symbol("1", 2).unwrap()), BTreeMap::from([(mi(&[0, 0]), one.clone())]));
    let heat = parse_symbol("i*xi1 + xi2^2", 2).unwrap();
    assert_eq!(terms(&heat), BTreeMap::from([(mi(&[1, 0]), coeff(int(0), int(1))), (mi(&[0, 2]), one)]));
    assert!(parse_symbol("xi1^99999999999", 1).is_err());
    assert!(parse_symbol("xi3^2", 2).is_err());
    let err = parse_symbol("xi1 + * xi2", 2).unwrap_err().to_string();
    assert!(err.contains("column"), "{err}");
}

#[test]
fn evaluate_examples() {
    let lap = parse_symbol("xi1^2 + xi2^2", 2).unwrap();
    assert_eq!(lap.evaluate(&[1.0, 2.0]).unwrap(), Complex64::new(5.0, 0.0));
    let p = parse_symbol("3*xi1^2*xi2 - 7/2 + i", 2).unwrap();
    assert_eq!(p.evaluate(&[0.0, 0.0]).unwrap(), Complex64::new(-3.5, 1.0));
    let heat = parse_symbol("i*xi1 + xi2^2", 2).unwrap();
    assert_eq!(heat.evaluate(&[3.0, 2.0]).unwrap(), Complex64::new(4.0, 3.0));
    assert!(heat.evaluate(&[1.0]).is_err());
}

#[test]
fn xi_derivative_examples() {
    let p = parse_symbol("xi1^2*xi2", 2).unwrap();
    assert_eq!(p.xi_derivative(&mi(&[1, 0])), parse_symbol("2*xi1*xi2", 2).unwrap());
    assert_eq!(p.xi_derivative(&mi(&[0, 0])), p);
    assert!(parse_symbol("xi1^2", 2).unwrap().xi_derivative(&mi(&[3, 0])).is_zero());
}

#[test]
fn rpoly_examples() {
    let c = RPolynomial::from_terms([(int(1), Complex64::new(2.0, 0.0)), (ratio(1, 2), Complex64::new(1.0, 0.0))]);
    assert_eq!(c.eval(4.0), Complex64::new(10.0, 0.0));
    assert_eq!(RPolynomial::zero().eval(3.0), Complex64::new(0.0, 0.0));
    let k = Complex64::new(1.5, -2.0);
    assert_eq!(RPolynomial::constant(k).eval(17.0), k);
}

#[test]
fn polyhedron_examples() {
    let (_, lap) = poly("xi1^2 + xi2^2");
    assert_eq!(lap.vertices(), &[mi(&[0, 0]), mi(&[0, 2]), mi(&[2, 0])]);
    assert_eq!(lap.facet_normals(), &[rv(&[(1, 2), (1, 2)])]);
    assert!(lap.is_regular());

    let (_, heat) = poly("i*xi1 + xi2^2");
    assert_eq!(heat.vertices(), &[mi(&[0, 0]), mi(&[0, 2]), mi(&[1, 0])]);
    assert_eq!(heat.facet_normals(), &[rv(&[(1, 1), (1, 2)])]);
    let ix = heat.indices().unwrap();
    assert_eq!((ix.mu_per_axis.clone(), ix.mu.clone(), ix.theta.clone(), ix.k_e.clone()), (rv(&[(1, 1), (2, 1)]), int(2), rv(&[(2, 1), (1, 1)]), ratio(3, 2)));

    let (_, mqe) = poly("xi1^4 + xi1^2*xi2^4 + xi2^6");
    assert_eq!(mqe.vertices(), &[mi(&[0, 0]), mi(&[0, 6]), mi(&[2, 4]), mi(&[4, 0])]);
    assert_eq!(mqe.facet_normals(), &[rv(&[(1, 4), (1, 8)]), rv(&[(1, 6), (1, 6)])]);
    assert_eq!(mqe.indices().unwrap().theta, rv(&[(4, 3), (1, 1)]));
}

#[test]
fn regularity_examples() {
    let (_, one_axis) = poly("# dim: 2\nxi1^2");
    assert!(!one_axis.is_regular());
    assert!(one_axis.diagnostic().is_some());
    let (_, constant) = poly("# dim: 2\n1");
    assert!(!constant.is_regular() && constant.is_degenerate());
    assert!(constant.k_of(&[int(1), int(1)]).is_err());
}

#[test]
fn k_of_and_weight_examples() {
    let (_, lap) = poly("xi1^2 + xi2^2");
    assert_eq!(lap.k_of(&[int(2), int(0)]).unwrap(), int(1));
    assert_eq!(lap.k_of(&[int(1), int(1)]).unwrap(), int(1));
    let (_, heat) = poly("i*xi1 + xi2^2");
    assert_eq!(heat.k_of(&[int(0), int(1)]).unwrap(), ratio(1, 2));
    assert_eq!(lap.weight_v(&[1.0, 2.0]).unwrap(), 6.0);
    assert_eq!(lap.weight_v(&[0.0, 0.0]).unwrap(), 1.0);
    assert_eq!(heat.weight_v(&[2.0, 3.0]).unwrap(), 12.0);
    assert!(heat.weight_v(&[1.0]).is_err());
}

#[test]
fn qh_part_examples() {
    let heat = parse_symbol("i*xi1 + xi2^2", 2).unwrap();
    assert_eq!(qh_part(&heat, &rv(&[(1, 1), (1, 2)])).unwrap().part, heat);
    let p = parse_symbol("xi1^4 + xi1^2*xi2^4 + xi2^6", 2).unwrap();
    assert_eq!(qh_part(&p, &rv(&[(1, 6), (1, 6)])).unwrap().part, parse_symbol("xi1^2*xi2^4 + xi2^6", 2).unwrap());
    assert!(qh_part(&p, &rv(&[(1, 100), (1, 100)])).unwrap().part.is_zero());
    assert!(qh_part(&p, &rv(&[(0, 1), (1, 2)])).is_err());
}

#[test]
fn proposition_examples() {
    let cfg = EllipticityConfig::default();
    let (sys, f) = poly("xi1^2 + xi2^2");
    let v = check_proposition(&sys, &f, &cfg).unwrap();
    assert_eq!(v.status, Status::Elliptic);
    assert!(v.per_facet[0].finest().unwrap().1 > 0.0);

    let (sys, f) = poly("xi1^2 - xi2^2");
    let v = check_proposition(&sys, &f, &cfg).unwrap();
    assert_eq!(v.status, Status::NotElliptic);
    let w = v.witness.clone().unwrap();
    assert!((w.xi0[0].abs() - w.xi0[1].abs()).abs() < 1e-9);
    let (q, unit) = witness_for_wavepacket(&v).unwrap();
    assert_eq!(q, rv(&[(1, 2), (1, 2)]));
    let h = 0.5f64.sqrt();
    assert!((unit[0].abs() - h).abs() < 1e-12 && (unit[1].abs() - h).abs() < 1e-12);

    let (sys, f) = poly("xi1^4 + xi1^2*xi2^4 + xi2^6");
    let v = check_proposition(&sys, &f, &cfg).unwrap();
    assert_eq!(v.status, Status::Elliptic);
    assert_eq!(v.per_facet.len(), 2);

    let (sys, f) = poly("# dim: 2\nxi1^2");
    assert!(check_proposition(&sys, &f, &cfg).is_err());
    let (sys, f) = poly("xi1^2 + xi2^2");
    let bad = EllipticityConfig { delta_min: 0.0, ..cfg };
    assert!(check_proposition(&sys, &f, &bad).is_err());
}

#[test]
fn witness_normalization_examples() {
    let q = rv(&[(1, 2), (1, 2)]);
    let w = normalize_witness(&q, &[0.6, 0.8]).unwrap();
    assert!((w[0] - 0.6).abs() < 1e-12 && (w[1] - 0.8).abs() < 1e-12);
    assert!(normalize_witness(&q, &[1.0, 0.0]).is_err());
    let (sys, f) = poly("xi1^2 + xi2^2");
    let v = check_proposition(&sys, &f, &EllipticityConfig::default()).unwrap();
    assert!(witness_for_wavepacket(&v).is_err());
}

#[test]
fn inequality_examples() {
    let cfg = InequalityConfig::default();
    let (sys, f) = poly("xi1^2 - xi2^2");
    let e = check_inequality(&sys, &f, 1.0, &cfg).unwrap();
    assert!(!e.bounded && e.growth >= 10.0);
    let (sys, f) = poly("xi1^2\nxi2^2");
    assert_eq!(sys.len(), 2);
    let e = check_inequality(&sys, &f, 2.0, &cfg).unwrap();
    assert!(e.c_hat.is_finite() && e.c_hat <= 2.0, "{}", e.c_hat);
    assert!(check_inequality(&sys, &f, 0.0, &cfg).is_err());
}

#[test]
fn bound_examples() {
    let (_, lap) = poly("xi1^2 + xi2^2");
    let (_, heat) = poly("i*xi1 + xi2^2");
    let p = GevreyParams::new(1.0, 1.0, 7.0, &lap).unwrap();
    assert!((derivative_bound(&mi(&[0, 0]), &p).unwrap() - 7.0).abs() < 1e-12);
    let p = GevreyParams::new(1.0, 1.0, 1.0, &lap).unwrap();
    assert!((derivative_bound(&mi(&[2, 0]), &p).unwrap() - 2.0).abs() < 1e-12);
    let p = GevreyParams::new(2.0, 1.0, 1.0, &heat).unwrap();
    assert!((derivative_bound(&mi(&[0, 2]), &p).unwrap() - 4.0).abs() < 1e-12);

    assert!((iterate_bound(0, &GevreyParams::new(1.5, 1.0, 3.0, &lap).unwrap()).unwrap() - 3.0).abs() < 1e-12);
    assert!((iterate_bound(3, &GevreyParams::new(1.0, 1.0, 1.0, &lap).unwrap()).unwrap() - 36.0).abs() < 1e-10);
    assert!((iterate_bound(2, &GevreyParams::new(2.0, 1.0, 3.0, &lap).unwrap()).unwrap() - 432.0).abs() < 1e-9);
    let (_, irregular) = poly("# dim: 2\nxi1^2");
    assert!(GevreyParams::new(1.0, 1.0, 1.0, &irregular).is_err());
}

#[test]
fn gamma_examples() {
    assert!((gamma_shift(1.0, 3).unwrap() - 6.0).abs() < 1e-12);
    assert!((gamma_shift(0.5, 1).unwrap() - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    assert!(check_convexity_inequality(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap());
    assert!(check_convexity_inequality(1.0, 1.0, 0.5, 1.0, 1.0, 1.0, 1.0).is_err());
    assert!((binomial_gamma_constant(&[1.0], 12).unwrap() - 1.0).abs() < 1e-9);
    assert!((binomial_gamma_constant(&[1.0, 1.0], 12).unwrap() - 1.0).abs() < 1e-9);
    let c = binomial_gamma_constant(&[1.0, 0.5], 12).unwrap();
    assert!(c.is_finite() && c >= 1.0);
    assert!(binomial_gamma_constant(&[1.0, 0.5], 16).unwrap() >= c);
}

#[test]
fn fit_examples() {
    let fact = |l: usize| (1..=l).map(|k| k as f64).product::<f64>();
    let sq: Vec<f64> = (0..10).map(|l| fact(l).powi(2)).collect();
    let fit = fit_growth(&sq, 2.0).unwrap();
    assert!((fit.s_fit - 1.0).abs() < 1e-6 && (fit.c_fit - 1.0).abs() < 1e-6);
    let g: Vec<f64> = (0..10).map(|l| 3f64.powi(l as i32 + 1) * fact(l).powi(4)).collect();
    let fit = fit_growth(&g, 2.0).unwrap();
    assert!((fit.s_fit - 2.0).abs() < 1e-6 && (fit.c_fit - 3.0).abs() < 1e-6);
    assert!(fit_growth(&[5.0; 6], 2.0).unwrap().degenerate);
    assert!(fit_growth(&[1.0, 2.0, 3.0], 2.0).is_err());
}

fn heat_demo() -> (SymbolSystem, NewtonPolyhedron, WavepacketSpec) {
    let (sys, f) = poly("i*xi1 + xi2^2");
    let h = 0.5f64.sqrt();
    let spec = WavepacketSpec::new(&sys, &f, &rv(&[(1, 1), (1, 2)]), &[h, h], &int(2), &int(1), 1.0, None).unwrap();
    (sys, f, spec)
}

#[test]
fn parameter_examples() {
    let (sys, f) = poly("i*xi1 + xi2^2");
    let q = rv(&[(1, 1), (1, 2)]);
    let (eps, eta) = choose_parameters(&int(2), &int(1), &f, &sys, &q).unwrap();
    assert_eq!((eps, eta.clone()), (ratio(2, 7), ratio(3, 14)));
    assert!((int(2) * eta).recip() > int(2));
    assert!(choose_parameters(&int(2), &int(2), &f, &sys, &q).is_err());
    let (_, _, spec) = heat_demo();
    assert!(spec.attained_index() > spec.s);
}

#[test]
fn center_derivative_examples() {
    let (_, _, spec) = heat_demo();
    let eta = spec.eta_f64();
    let d0 = derivative_at_center(&spec, &mi(&[0, 0])).unwrap();
    assert!(d0.im == 0.0 && d0.re > 0.0);
    for beta in MultiIndex::all_up_to(2, 8) {
        let a = to_f64(&beta.dot(&spec.q));
        let d = derivative_at_center(&spec, &beta).unwrap();
        let exact = center_integral_closed_form(a, eta) * beta.monomial(&spec.xi0).abs();
        assert!(((d.norm() - exact) / exact).abs() < 1e-8, "{beta}");
    }
    assert!(lower_bound_threshold(&spec, &mi(&[0, 2]), 40).unwrap().is_some());
}

#[test]
fn violation_examples() {
    let (_, f, spec) = heat_demo();
    let alpha = mi(&[0, 2]);
    let rep = gevrey_violation_check(&spec, &f, &alpha, 1..=12, 2.0, &[1.0, 10.0, 100.0]).unwrap();
    assert_eq!(rep.rows.len(), 12);
    assert!(!rep.constants[0].exceedances.is_empty() && !rep.constants[1].exceedances.is_empty());
    let weaker = gevrey_violation_check(&spec, &f, &alpha, 1..=12, to_f64(&spec.weaker_index()), &[1.0, 10.0, 100.0]).unwrap();
    assert!(weaker.constants[2].exceedances.is_empty());
    assert!(gevrey_violation_check(&spec, &f, &alpha, 1..=0, 2.0, &[1.0]).unwrap().rows.is_empty());
    assert!(gevrey_violation_check(&spec, &f, &mi(&[0, 1]), 1..=3, 2.0, &[1.0]).is_ok());
    let (_, two_facets) = poly("xi1^4 + xi1^2*xi2^4 + xi2^6");
    assert!(gevrey_violation_check(&spec, &two_facets, &mi(&[1, 0]), 1..=3, 2.0, &[1.0]).is_err());
}

#[test]
fn recursion_examples() {
    let (sys, _, spec) = heat_demo();
    assert_eq!(iterate_coefficients(&spec, &sys, &[]).unwrap(), ACoefficients::base(2));
    let a1 = iterate_coefficients(&spec, &sys, &[0]).unwrap();
    assert!(a1.terms.len() <= 4 && a1.level == 1);
    let p = parse_symbol("i*xi1", 2).unwrap();
    let q = parse_symbol("xi2^2", 2).unwrap();
    let base = ACoefficients::base(2);
    let sum = apply_symbol(&spec, &(&p + &q), &base).unwrap();
    let (ap, aq) = (apply_symbol(&spec, &p, &base).unwrap(), apply_symbol(&spec, &q, &base).unwrap());
    for (g, c) in &sum.terms {
        let parts = [&ap, &aq].iter().map(|a| a.terms.get(g).map(|c| c.eval(3.0)).unwrap_or_default()).sum::<Complex64>();
        assert!((c.eval(3.0) - parts).norm() < 1e-12);
    }
}

#[test]
fn norm_estimate_examples() {
    let (sys, _, spec) = heat_demo();
    let bump = make_bump(2, 1.0, 4).unwrap();
    let base = ACoefficients::base(2);
    let e0 = ln_iterate_norm_estimate(&base, &spec, &bump).unwrap();
    assert!((e0 - center_integral_closed_form(0.0, spec.eta_f64()).ln()).abs() < 1e-9);
    let p = &sys.symbols()[0];
    let e1 = ln_iterate_norm_estimate(&apply_symbol(&spec, p, &base).unwrap(), &spec, &bump).unwrap();
    let e2 = ln_iterate_norm_estimate(&apply_symbol(&spec, &p.scale(&coeff(int(2), int(0))), &base).unwrap(), &spec, &bump).unwrap();
    assert!(e2 <= e1 + 2f64.ln() + 1e-9);
    let small = make_bump(2, 1.0, 1).unwrap();
    let deep = iterate_coefficients(&spec, &sys, &[0, 0]).unwrap();
    assert!(ln_iterate_norm_estimate(&deep, &spec, &small).is_err());
}

#[test]
fn bump_examples() {
    let delta = 0.5;
    let b = make_bump(2, delta, 6).unwrap();
    assert_eq!(b.value(&[0.0, 0.0]), 1.0);
    assert_eq!(b.value(&[2.0 * delta, 0.0]), 0.0);
    assert_eq!(b.value(&[0.9, 0.9]), 0.0);
    for g in [[1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
        assert_eq!(b.derivative(&[0.0, 0.0], &mi(&g)).unwrap(), 0.0);
    }
    // sup |d_1 φ| against a fine grid of the radial profile along the axis.
    let grid = (0..=20000)
        .map(|k| delta + delta * k as f64 / 20000.0)
        .map(|x| b.derivative(&[x, 0.0], &mi(&[1, 0])).unwrap().abs())
        .fold(0.0, f64::max);
    let sup = b.sup_norm(&mi(&[1, 0])).unwrap();
    assert!((sup - grid).abs() <= 1e-4 * grid, "{sup} vs {grid}");
    assert!(make_bump(2, 1.0, 25).is_err());
}
