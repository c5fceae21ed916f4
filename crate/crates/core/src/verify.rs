//! Self-check suites: independent oracles for the hull and the gauge, and
//! identities the rest of the library must satisfy.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

use crate::ellipticity::{check_proposition, interior_part, qh_part, scale_along, EllipticityConfig, Status};
use crate::error::Result;
use crate::gevrey::{check_convexity_inequality, gamma_shift};
use crate::polyhedron::{build_polyhedron, NewtonPolyhedron};
use crate::rational::{self, int, ratio, to_f64, Rational};
use crate::symbol::{coeff, parse_system, MultiIndex, OperatorSymbol, SymbolSystem};
use crate::systems;
use crate::wavepacket::{apply_symbol, derivative_at_center, ACoefficients, WavepacketSpec};

const MAX_REPORTED: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    /// The first failures, at most twenty.
    pub failures: Vec<String>,
    pub failed: usize,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.to_owned(),
            checks: 0,
            failures: Vec::new(),
            failed: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.failed += 1;
        if self.failures.len() < MAX_REPORTED {
            self.failures.push(what);
        }
    }

    fn absorb<T>(&mut self, r: Result<T>, context: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.fail(format!("{}: {e}", context()));
                None
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfcheckConfig {
    pub seed: u64,
    pub hull_systems: usize,
    pub alphas_per_polyhedron: usize,
    pub gamma_points: usize,
    pub convexity_points: usize,
    pub roundtrip_symbols: usize,
}

impl Default for SelfcheckConfig {
    fn default() -> Self {
        SelfcheckConfig {
            seed: 0,
            hull_systems: 200,
            alphas_per_polyhedron: 100,
            gamma_points: 1000,
            convexity_points: 10_000,
            roundtrip_symbols: 200,
        }
    }
}

/// Runs every suite.
pub fn run_all(cfg: &SelfcheckConfig) -> Vec<SuiteResult> {
    vec![
        hull_oracle(cfg.hull_systems, cfg.seed),
        k_oracle(cfg.alphas_per_polyhedron, cfg.seed),
        k_laws(cfg.alphas_per_polyhedron, cfg.seed),
        quasi_homogeneity(cfg.seed),
        bundled_verdicts(),
        gamma_identities(cfg.gamma_points, cfg.seed),
        convexity_sweep(cfg.convexity_points, cfg.seed),
        quadrature_vs_gamma(),
        parser_roundtrip(cfg.roundtrip_symbols, cfg.seed),
        recursion_vs_finite_differences(),
    ]
}

// ---------------------------------------------------------------------------
// Exact linear algebra, independent of the hull code.

type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form and pivot columns.
fn rref(mut m: Matrix) -> (Matrix, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &f * &m[r][j];
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

fn rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rref(rows.to_vec()).1.len()
}

fn to_rat(p: &MultiIndex) -> Vec<Rational> {
    p.entries().iter().map(|&e| int(e as i64)).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unique `λ` with `sum λ_i cols_i = p`, if the columns are independent
/// and the system is consistent.
fn coordinates(cols: &[Vec<Rational>], p: &[Rational]) -> Option<Vec<Rational>> {
    let n = p.len();
    let k = cols.len();
    let m: Matrix = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(p[i].clone());
            row
        })
        .collect();
    let (r, pivots) = rref(m);
    if pivots.len() != k || pivots.contains(&k) {
        return None;
    }
    Some((0..k).map(|j| r[j][k].clone()).collect())
}

fn subsets(len: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, len: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            go(i + 1, len, size, cur, out);
            cur.pop();
        }
    }
    go(0, len, size, &mut cur, &mut out);
    out
}

/// `p ∈ conv({0} ∪ pts)`: a basic solution of `p = sum λ_v v`, `λ >= 0`,
/// `sum λ <= 1` uses at most `n` independent points.
fn in_hull(p: &[Rational], pts: &[Vec<Rational>]) -> bool {
    if p.iter().all(Zero::is_zero) {
        return true;
    }
    let one = Rational::one();
    for size in 1..=p.len().min(pts.len()) {
        for s in subsets(pts.len(), size) {
            let cols: Vec<Vec<Rational>> = s.iter().map(|&i| pts[i].clone()).collect();
            if let Some(l) = coordinates(&cols, p) {
                if l.iter().all(|x| !x.is_negative()) && l.iter().sum::<Rational>() <= one {
                    return true;
                }
            }
        }
    }
    false
}

/// Facets of a full-dimensional `conv({0} ∪ pts)` as `(normal, offset)`:
/// offset-1 facets normalized to `<α,q> <= 1`, origin facets with a
/// primitive integer normal and `<α,w> <= 0`.
fn facet_oracle(dim: usize, pts: &[Vec<Rational>]) -> BTreeSet<(Vec<Rational>, Rational)> {
    let mut out = BTreeSet::new();
    let one = Rational::one();
    for s in subsets(pts.len(), dim) {
        let rows: Matrix = s.iter().map(|&i| pts[i].clone()).collect();
        if rank(&rows) < dim {
            continue;
        }
        let cols: Vec<Vec<Rational>> = (0..dim).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
        let Some(q) = coordinates(&cols, &vec![one.clone(); dim]) else {
            continue;
        };
        if pts.iter().any(|p| dot(p, &q) > one) {
            continue;
        }
        let tight: Matrix = pts.iter().filter(|p| dot(p, &q) == one).cloned().collect();
        if rank(&tight) == dim {
            out.insert((q, one.clone()));
        }
    }
    for s in subsets(pts.len(), dim - 1) {
        let rows: Matrix = s.iter().map(|&i| pts[i].clone()).collect();
        if rank(&rows) < dim - 1 {
            continue;
        }
        let (r, pivots) = rref(rows);
        let Some(free) = (0..dim).find(|c| !pivots.contains(c)) else {
            continue;
        };
        let mut w = vec![Rational::zero(); dim];
        w[free] = Rational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            w[pc] = -r[i][free].clone();
        }
        let signs: Vec<Rational> = pts.iter().map(|p| dot(p, &w)).collect();
        let pos = signs.iter().any(|x| x.is_positive());
        let neg = signs.iter().any(|x| x.is_negative());
        if pos && neg {
            continue;
        }
        if pos {
            w.iter_mut().for_each(|x| *x = -x.clone());
        }
        let tight: Matrix = pts.iter().filter(|p| dot(p, &w).is_zero()).cloned().collect();
        if rank(&tight) == dim - 1 {
            out.insert((primitive(&w), Rational::zero()));
        }
    }
    out
}

fn primitive(w: &[Rational]) -> Vec<Rational> {
    let l = rational::lcm_denoms(w);
    let ints: Vec<BigInt> = w.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}

/// Checks one system against the oracles.
fn hull_case(res: &mut SuiteResult, label: &str, sys: &SymbolSystem) {
    let Some(f) = res.absorb(build_polyhedron(sys), || label.to_owned()) else {
        return;
    };
    let dim = sys.dim();
    let support: BTreeSet<MultiIndex> = sys.support().into_iter().filter(|p| !p.is_zero()).collect();
    let pts: Vec<Vec<Rational>> = support.iter().map(to_rat).collect();
    // Extreme points: not in the hull of the others.
    let mut vertices: Vec<MultiIndex> = vec![MultiIndex::zero(dim)];
    for (i, p) in support.iter().enumerate() {
        let others: Vec<Vec<Rational>> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
        if !in_hull(&pts[i], &others) {
            vertices.push(p.clone());
        }
    }
    let mut got = f.vertices().to_vec();
    got.sort();
    vertices.sort();
    res.check(got == vertices, || format!("{label}: vertices {got:?}, oracle {vertices:?}"));
    let full = rank(&pts) == dim;
    if !full {
        res.check(!f.is_regular(), || format!("{label}: lower-dimensional hull reported regular"));
        return;
    }
    let facets = facet_oracle(dim, &pts);
    let got: BTreeSet<(Vec<Rational>, Rational)> = f.facets().iter().map(|x| (x.normal.clone(), x.offset.clone())).collect();
    res.check(got == facets, || format!("{label}: facets differ from the oracle"));
    let regular = facets.iter().all(|(w, b)| {
        if b.is_zero() {
            w.iter().filter(|x| !x.is_zero()).count() == 1 && w.iter().all(|x| !x.is_positive())
        } else {
            w.iter().all(|x| x.is_positive())
        }
    });
    res.check(f.is_regular() == regular, || format!("{label}: regular = {}, oracle {regular}", f.is_regular()));
    if regular {
        let q_oracle: BTreeSet<Vec<Rational>> = facets.iter().filter(|(_, b)| !b.is_zero()).map(|(w, _)| w.clone()).collect();
        let q_got: BTreeSet<Vec<Rational>> = f.facet_normals().iter().cloned().collect();
        res.check(q_got == q_oracle, || format!("{label}: Q(F) differs from the oracle"));
        // Every normal attains 1 on at least two vertices in the plane.
        if dim == 2 {
            for q in f.facet_normals() {
                let hits = f.vertices().iter().filter(|v| v.dot(q) == Rational::one()).count();
                res.check(hits >= 2, || format!("{label}: facet {:?} attained by {hits} vertices", rational::format_vec(q)));
            }
        }
        if let Some(ix) = f.indices() {
            let one = Rational::one();
            res.check(ix.theta.iter().all(|t| *t >= one) && ix.theta.iter().any(|t| *t == one), || {
                format!("{label}: theta {:?}", rational::format_vec(&ix.theta))
            });
        }
    }
}

/// Random system with at most eight support points, exponents <= 10.
pub fn random_system(rng: &mut ChaCha8Rng, dim: usize, max_points: usize, max_exp: u32) -> SymbolSystem {
    let count = rng.random_range(1..=max_points);
    let terms: Vec<(MultiIndex, _)> = (0..count)
        .map(|_| {
            let a = MultiIndex::new((0..dim).map(|_| rng.random_range(0..=max_exp)).collect());
            (a, coeff(int(rng.random_range(1..=5)), int(0)))
        })
        .collect();
    let p = OperatorSymbol::from_terms(dim, terms).expect("valid terms");
    SymbolSystem::single(p)
}

/// Pure powers on every axis plus random points; often, not always, regular.
fn random_with_powers(rng: &mut ChaCha8Rng, dim: usize) -> SymbolSystem {
    let mut terms: Vec<(MultiIndex, _)> = (0..dim)
        .map(|j| {
            let mut e = vec![0; dim];
            e[j] = rng.random_range(1..=10);
            (MultiIndex::new(e), coeff(int(1), int(0)))
        })
        .collect();
    for _ in 0..rng.random_range(0..=8 - dim) {
        let a = MultiIndex::new((0..dim).map(|_| rng.random_range(0..=10)).collect());
        terms.push((a, coeff(int(1), int(0))));
    }
    SymbolSystem::single(OperatorSymbol::from_terms(dim, terms).expect("valid terms"))
}

/// Compares one system's polyhedron with the oracles.
pub fn hull_check(label: &str, sys: &SymbolSystem) -> SuiteResult {
    let mut res = SuiteResult::new("hull oracle");
    hull_case(&mut res, label, sys);
    res
}

pub fn hull_oracle(systems: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("hull oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..systems {
        let dim = if i % 2 == 0 { 2 } else { 3 };
        let sys = random_system(&mut rng, dim, 8, 10);
        hull_case(&mut res, &format!("random #{i} ({})", sys.symbols()[0]), &sys);
    }
    for b in systems::BUNDLED {
        if let Some(sys) = res.absorb(b.system(), || b.name.to_owned()) {
            hull_case(&mut res, b.name, &sys);
        }
    }
    res
}

// ---------------------------------------------------------------------------
// The gauge k(α, F).

/// `inf {t > 0 : α/t ∈ F}` by exact bisection on hull membership, snapped
/// to the simplest rational once the bracket is narrower than `1/(2D^2)`
/// for a bound `D` on the denominator of the answer.
pub fn k_by_bisection(f: &NewtonPolyhedron, alpha: &[Rational]) -> Rational {
    let pts: Vec<Vec<Rational>> = f.vertices().iter().filter(|v| !v.is_zero()).map(to_rat).collect();
    if alpha.iter().all(Zero::is_zero) {
        return Rational::zero();
    }
    let member = |t: &Rational| -> bool {
        let p: Vec<Rational> = alpha.iter().map(|a| a / t).collect();
        in_hull(&p, &pts)
    };
    // A facet normal solves an n x n integer system: its denominators are
    // bounded by Hadamard's bound on the vertex matrix.
    let dim = f.dim();
    let max_norm2 = f
        .vertices()
        .iter()
        .map(|v| v.entries().iter().map(|&e| (e as u64) * (e as u64)).sum::<u64>())
        .max()
        .unwrap_or(1)
        .max(1);
    let hadamard = ((max_norm2 as f64).sqrt().powi(dim as i32)).ceil() as u64 + 1;
    let denom = Rational::from_integer(rational::lcm_denoms(alpha) * BigInt::from(hadamard));
    let target = (int(2) * &denom * &denom).recip();
    let mut hi = Rational::one();
    while !member(&hi) {
        hi = hi * int(2);
    }
    let mut lo = Rational::zero();
    let mut steps = 0;
    while &hi - &lo >= target && steps < 200 {
        let mid = (&lo + &hi) / int(2);
        if member(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    rational::simplest_in(&lo, &hi)
}

fn random_alpha(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| ratio(rng.random_range(0..=12), rng.random_range(1..=6))).collect()
}

fn gauge_polyhedra(seed: u64) -> Vec<(String, NewtonPolyhedron)> {
    let mut out: Vec<(String, NewtonPolyhedron)> = systems::regular()
        .filter_map(|b| Some((b.name.to_owned(), build_polyhedron(&b.system().ok()?).ok()?)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b);
    let mut found = 0;
    for i in 0..1000 {
        if found == 6 {
            break;
        }
        let sys = random_with_powers(&mut rng, 2 + i % 2);
        if let Ok(f) = build_polyhedron(&sys) {
            if f.is_regular() {
                out.push((format!("random regular {}", sys.symbols()[0]), f));
                found += 1;
            }
        }
    }
    out
}

pub fn k_oracle(per_polyhedron: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("k(alpha) oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4b);
    for (name, f) in gauge_polyhedra(seed) {
        for _ in 0..per_polyhedron {
            let alpha = random_alpha(&mut rng, f.dim());
            let Some(k) = res.absorb(f.k_of(&alpha), || name.clone()) else {
                continue;
            };
            let oracle = k_by_bisection(&f, &alpha);
            res.check(k == oracle, || {
                format!("{name}: k({:?}) = {}, bisection {}", rational::format_vec(&alpha), rational::format(&k), rational::format(&oracle))
            });
        }
    }
    res
}

pub fn k_laws(per_polyhedron: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("k(alpha) scaling and monotonicity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4c);
    for (name, f) in gauge_polyhedra(seed) {
        for _ in 0..per_polyhedron {
            let a = random_alpha(&mut rng, f.dim());
            let lambda = ratio(rng.random_range(1..=20), rng.random_range(1..=7));
            let la: Vec<Rational> = a.iter().map(|x| x * &lambda).collect();
            let bump: Vec<Rational> = a.iter().map(|x| x + ratio(rng.random_range(0..=5), rng.random_range(1..=3))).collect();
            let (Ok(ka), Ok(kla), Ok(kb)) = (f.k_of(&a), f.k_of(&la), f.k_of(&bump)) else {
                res.fail(format!("{name}: k_of failed"));
                continue;
            };
            res.check(kla == &lambda * &ka, || format!("{name}: k(λα) != λ k(α)"));
            res.check(ka <= kb, || format!("{name}: k not monotone"));
        }
    }
    res
}

// ---------------------------------------------------------------------------
// Quasi-homogeneous parts.

fn cube_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let face = rng.random_range(0..dim);
    (0..dim)
        .map(|j| {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            if j == face {
                sign
            } else {
                sign * rng.random_range(0.05..1.0)
            }
        })
        .collect()
}

pub fn quasi_homogeneity(seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("quasi-homogeneity and decomposition");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x71);
    for b in systems::regular() {
        let Some(sys) = res.absorb(b.system(), || b.name.to_owned()) else {
            continue;
        };
        let Some(f) = res.absorb(build_polyhedron(&sys), || b.name.to_owned()) else {
            continue;
        };
        let one = Rational::one();
        for p in sys.symbols() {
            let mut covered: BTreeSet<MultiIndex> = BTreeSet::new();
            for q in f.facet_normals() {
                let Some(part) = res.absorb(qh_part(p, q), || b.name.to_owned()) else {
                    continue;
                };
                for a in part.part.support() {
                    res.check(f.k_of_index(a).map(|k| k == one).unwrap_or(false), || format!("{}: facet term {a} has k != 1", b.name));
                    covered.insert(a.clone());
                }
                let qf: Vec<f64> = q.iter().map(to_f64).collect();
                for _ in 0..20 {
                    let xi = cube_point(&mut rng, sys.dim());
                    let base = part.part.evaluate(&xi).unwrap_or_default();
                    for r in [2.0, 10.0, 100.0] {
                        let scaled = part.part.evaluate(&scale_along(&qf, r, &xi)).unwrap_or_default();
                        let err = (scaled - base * r).norm();
                        res.check(err <= 1e-10 * (1.0 + base.norm()) * r, || format!("{}: P_q(r^q xi) != r P_q(xi) at r = {r}", b.name));
                    }
                }
            }
            if let Some(inner) = res.absorb(interior_part(p, &f), || b.name.to_owned()) {
                covered.extend(inner.support().cloned());
            }
            let all: BTreeSet<MultiIndex> = p.support().cloned().collect();
            res.check(covered == all, || format!("{}: facet and interior terms do not cover the support", b.name));
        }
    }
    res
}

/// Bundled verdicts, and their stability under scaling the system.
pub fn bundled_verdicts() -> SuiteResult {
    let mut res = SuiteResult::new("bundled verdicts");
    let cfg = EllipticityConfig::default();
    for b in systems::regular() {
        let Some(sys) = res.absorb(b.system(), || b.name.to_owned()) else {
            continue;
        };
        let Some(f) = res.absorb(build_polyhedron(&sys), || b.name.to_owned()) else {
            continue;
        };
        let Some(v) = res.absorb(check_proposition(&sys, &f, &cfg), || b.name.to_owned()) else {
            continue;
        };
        let expect = if b.elliptic == Some(true) { Status::Elliptic } else { Status::NotElliptic };
        res.check(v.status == expect, || format!("{}: {:?}, expected {expect:?}", b.name, v.status));
        let scaled = sys.scale(&coeff(ratio(-7, 3), int(2)));
        if let Some(w) = res.absorb(check_proposition(&scaled, &f, &cfg), || b.name.to_owned()) {
            res.check(w.status == v.status, || format!("{}: status changes under scaling", b.name));
            let same = match (&v.witness, &w.witness) {
                (Some(a), Some(b)) => a.q == b.q && a.xi0.iter().zip(&b.xi0).all(|(x, y)| (x - y).abs() < 1e-9),
                (None, None) => true,
                _ => false,
            };
            res.check(same, || format!("{}: witness changes under scaling", b.name));
        }
    }
    res
}

// ---------------------------------------------------------------------------
// Γ identities and quadrature.

pub fn gamma_identities(points: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("gamma shift identity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x67);
    for _ in 0..points {
        let a: f64 = rng.random_range(0.01..20.0);
        let p: u32 = rng.random_range(1..=20);
        let Some(v) = res.absorb(gamma_shift(a, p), || format!("a = {a}")) else {
            continue;
        };
        let direct = gamma(a + p as f64);
        res.check(((v - direct) / direct).abs() <= 1e-12, || format!("Γ({a}+{p}): product {v}, direct {direct}"));
    }
    res
}

pub fn convexity_sweep(points: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("convexity inequality sweep");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x37);
    for _ in 0..points {
        let omega: f64 = rng.random_range(0.05..3.0);
        let a = omega + rng.random_range(0.0..15.0);
        let b = omega + rng.random_range(0.0..15.0);
        let c = omega + rng.random_range(0.0..15.0);
        let sigma: f64 = rng.random_range(1.0..4.0);
        let lambda = rng.random_range(-6.0f64..6.0).exp();
        let tau = rng.random_range(-6.0f64..6.0).exp();
        let args = format!("λ={lambda}, τ={tau}, a={a}, b={b}, c={c}, σ={sigma}, ω={omega}");
        if let Some(ok) = res.absorb(check_convexity_inequality(lambda, tau, a, b, c, sigma, omega), || args.clone()) {
            res.check(ok, || format!("inequality fails at {args}"));
        }
    }
    res
}

/// The wave packet for the wave operator with `s = 2`, `σ = 1`.
pub fn demo_spec() -> Result<(SymbolSystem, NewtonPolyhedron, WavepacketSpec)> {
    let sys = parse_system(systems::bundled("wave").expect("bundled").source, None)?;
    let f = build_polyhedron(&sys)?;
    let q = f.facet_normals()[0].clone();
    let h = 0.5f64.sqrt();
    let spec = WavepacketSpec::new(&sys, &f, &q, &[h, h], &int(2), &int(1), 1.0, None)?;
    Ok((sys, f, spec))
}

/// `(1/η) Γ((a+1)/η) Q((a+1)/η, 1)`, the closed form of `∫_1^∞ r^a e^{-r^η} dr`.
pub fn center_integral_closed_form(a: f64, eta: f64) -> f64 {
    let s = (a + 1.0) / eta;
    (ln_gamma(s) + gamma_ur(s, 1.0).ln() - eta.ln()).exp()
}

pub fn quadrature_vs_gamma() -> SuiteResult {
    let mut res = SuiteResult::new("center derivatives vs incomplete gamma");
    let Some((_, _, spec)) = res.absorb(demo_spec(), || "demo spec".into()) else {
        return res;
    };
    let eta = spec.eta_f64();
    for beta in MultiIndex::all_up_to(2, 20) {
        let Some(d) = res.absorb(derivative_at_center(&spec, &beta), || format!("beta = {beta}")) else {
            continue;
        };
        let a = to_f64(&beta.dot(&spec.q));
        let phase = Complex64::i().powu(beta.order());
        let exact = phase * beta.monomial(&spec.xi0) * center_integral_closed_form(a, eta);
        res.check((d - exact).norm() <= 1e-8 * exact.norm(), || format!("beta = {beta}: quadrature {d}, closed form {exact}"));
    }
    res
}

// ---------------------------------------------------------------------------
// Parser and recursion.

/// Random canonical symbol with complex rational coefficients.
pub fn random_symbol(rng: &mut ChaCha8Rng, dim: usize, degree: u32) -> OperatorSymbol {
    let count = rng.random_range(1..=6);
    let terms: Vec<(MultiIndex, _)> = (0..count)
        .map(|_| {
            let mut left = rng.random_range(0..=degree);
            let a: Vec<u32> = (0..dim)
                .map(|_| {
                    let e = rng.random_range(0..=left);
                    left -= e;
                    e
                })
                .collect();
            let re = if rng.random_bool(0.7) { ratio(rng.random_range(-9..=9), rng.random_range(1..=5)) } else { int(0) };
            let im = if rng.random_bool(0.4) { ratio(rng.random_range(-9..=9), rng.random_range(1..=5)) } else { int(0) };
            (MultiIndex::new(a), coeff(re, im))
        })
        .collect();
    OperatorSymbol::from_terms(dim, terms).expect("valid terms")
}

pub fn parser_roundtrip(symbols: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("parser round trip");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x70);
    for _ in 0..symbols {
        let dim = rng.random_range(1..=4);
        let p = random_symbol(&mut rng, dim, 8);
        let text = p.to_string();
        match crate::symbol::parse_symbol(&text, dim) {
            Ok(back) => res.check(back == p, || format!("{text:?} reparses to {back}")),
            Err(e) => res.fail(format!("{text:?}: {e}")),
        }
    }
    res
}

/// `D^β g` with `D = -i∂`, by nested central differences with one
/// Richardson step.
fn apply_operator_fd<G: Fn(&[f64]) -> Complex64>(p: &OperatorSymbol, g: &G, x: &[f64], h: f64) -> Complex64 {
    fn partial<G: Fn(&[f64]) -> Complex64>(g: &G, x: &[f64], beta: &[u32], h: f64) -> Complex64 {
        let Some(j) = beta.iter().position(|&b| b > 0) else {
            return g(x);
        };
        let mut rest = beta.to_vec();
        rest[j] -= 1;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        (partial(g, &xp, &rest, h) - partial(g, &xm, &rest, h)) / (2.0 * h)
    }
    let at = |h: f64| -> Complex64 {
        p.terms()
            .iter()
            .map(|(beta, a)| {
                let c = crate::symbol::coeff_to_f64(a) * Complex64::new(0.0, -1.0).powu(beta.order());
                c * partial(g, x, beta.entries(), h)
            })
            .sum()
    };
    (at(h / 2.0) * 4.0 - at(h)) / 3.0
}

pub fn recursion_vs_finite_differences() -> SuiteResult {
    let mut res = SuiteResult::new("recursion vs finite differences");
    let cases = [("wave", [0.5f64.sqrt(), 0.5f64.sqrt()]), ("wave_lower", [0.5f64.sqrt(), 0.5f64.sqrt()]), ("heat", [0.6, 0.8])];
    for (name, xi0) in cases {
        let sys = match parse_system(systems::bundled(name).expect("bundled").source, None) {
            Ok(s) => s,
            Err(e) => {
                res.fail(format!("{name}: {e}"));
                continue;
            }
        };
        let Some(f) = res.absorb(build_polyhedron(&sys), || name.to_owned()) else {
            continue;
        };
        let q = f.facet_normals()[0].clone();
        let x0 = vec![0.3, -0.2];
        let Some(spec) = res.absorb(WavepacketSpec::new(&sys, &f, &q, &xi0, &int(2), &int(1), 0.5, Some(x0.clone())), || name.to_owned()) else {
            continue;
        };
        let Some(bump) = res.absorb(spec.bump(4), || name.to_owned()) else {
            continue;
        };
        let p = &sys.symbols()[0];
        let Some(a1) = res.absorb(apply_symbol(&spec, p, &ACoefficients::base(2)), || name.to_owned()) else {
            continue;
        };
        let eps = to_f64(&spec.epsilon);
        let qf = spec.q_f64();
        for r in [1.5f64, 4.0, 9.0] {
            let integrand = |x: &[f64]| -> Complex64 {
                let y: Vec<f64> = (0..2).map(|j| r.powf(eps * qf[j]) * (x[j] - x0[j])).collect();
                let phase: f64 = (0..2).map(|j| (x[j] - x0[j]) * r.powf(qf[j]) * xi0[j]).sum();
                bump.value(&y) * Complex64::from_polar(1.0, phase)
            };
            let mut rows = Vec::new();
            for u in -4..=4 {
                for v in -4..=4 {
                    let y = [u as f64 * 0.45 * spec.delta, v as f64 * 0.45 * spec.delta];
                    let x: Vec<f64> = (0..2).map(|j| x0[j] + y[j] * r.powf(-eps * qf[j])).collect();
                    let phase: f64 = (0..2).map(|j| (x[j] - x0[j]) * r.powf(qf[j]) * xi0[j]).sum();
                    let Some(a) = res.absorb(a1.evaluate(&spec, &bump, &x, r), || name.to_owned()) else {
                        continue;
                    };
                    let fd = apply_operator_fd(p, &integrand, &x, 2e-3);
                    rows.push((a * Complex64::from_polar(1.0, phase), fd));
                }
            }
            let scale = rows.iter().map(|(a, _)| a.norm()).fold(0.0, f64::max).max(1e-300);
            let worst = rows.iter().map(|(a, fd)| (a - fd).norm()).fold(0.0, f64::max);
            res.check(worst <= 1e-4 * scale, || format!("{name}, r = {r}: max deviation {worst:e} against scale {scale:e}"));
        }
    }
    res
}

/// Parses, builds and decides every `(name, text)` source.
pub fn system_files(sources: &[(String, String)]) -> SuiteResult {
    let mut res = SuiteResult::new("system files");
    for (name, text) in sources {
        let Some(sys) = res.absorb(parse_system(text, None), || name.clone()) else {
            continue;
        };
        let Some(f) = res.absorb(build_polyhedron(&sys), || name.clone()) else {
            continue;
        };
        if f.is_regular() {
            res.absorb(check_proposition(&sys, &f, &EllipticityConfig::default()), || name.clone());
        }
        res.check(true, String::new);
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_on_hand_examples() {
        let sys = parse_system("xi1^4 + xi1^2*xi2^4 + xi2^6", None).unwrap();
        let f = build_polyhedron(&sys).unwrap();
        let pts: Vec<Vec<Rational>> = f.vertices().iter().filter(|v| !v.is_zero()).map(to_rat).collect();
        let facets = facet_oracle(2, &pts);
        assert_eq!(facets.len(), 4);
        assert!(facets.contains(&(vec![ratio(1, 4), ratio(1, 8)], int(1))));
        assert!(facets.contains(&(vec![int(-1), int(0)], int(0))));
        assert_eq!(k_by_bisection(&f, &[int(1), int(1)]), ratio(3, 8));
        assert!(in_hull(&[int(2), int(4)], &pts));
        assert!(!in_hull(&[int(3), int(3)], &pts));
    }

    #[test]
    fn small_suites_pass() {
        for s in [hull_oracle(20, 1), k_oracle(5, 1), quasi_homogeneity(1), parser_roundtrip(50, 1), recursion_vs_finite_differences(), quadrature_vs_gamma()] {
            assert!(s.passed(), "{}: {:?}", s.name, s.failures);
        }
    }

    #[test]
    fn corrupt_file_is_reported() {
        let r = system_files(&[("bad".into(), "xi1^^2".into()), ("ok".into(), "xi1^2 + xi2^2".into())]);
        assert_eq!(r.failed, 1);
    }
}
