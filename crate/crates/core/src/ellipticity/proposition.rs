//! Certified search for zeros of the facet parts off the coordinate
//! hyperplanes.
//!
//! Zeros of a facet part come in whole orbits `r^q xi`, and every orbit with
//! nonzero components meets the cube surface `max_j |xi_j| = 1` exactly once.
//! The search therefore runs over the faces `xi_j = ±1` of `[-1,1]^n`, split
//! into sign orthants with `|xi_i| in [delta, 1]`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::qh_part;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::polyhedron::NewtonPolyhedron;
use crate::rational::{to_f64, Rational};
use crate::symbol::{MultiIndex, OperatorSymbol, SymbolSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticityConfig {
    /// First margin; each level multiplies it by `delta_factor`.
    pub delta_start: f64,
    pub delta_factor: f64,
    pub delta_min: f64,
    /// Bound on `sum_j |P_jq(xi0)|`, relative to the coefficient mass.
    pub witness_tol: f64,
    /// Box budget per facet and margin level.
    pub max_boxes: usize,
    pub polish_iterations: usize,
}

impl Default for EllipticityConfig {
    fn default() -> Self {
        EllipticityConfig {
            delta_start: 0.1,
            delta_factor: 0.1,
            delta_min: 1e-4,
            witness_tol: 1e-10,
            max_boxes: 20_000,
            polish_iterations: 200,
        }
    }
}

impl EllipticityConfig {
    pub fn levels(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0.. {
            let d = self.delta_start * self.delta_factor.powi(k);
            if d <= self.delta_min * (1.0 + 1e-9) || d <= 0.0 {
                out.push(self.delta_min);
                break;
            }
            out.push(d);
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta_min > 0.0 && self.delta_min < 1.0) {
            return Err(Error::InvalidParameter(format!("delta_min must lie in (0,1), got {}", self.delta_min)));
        }
        if !(self.delta_factor > 0.0 && self.delta_factor < 1.0) {
            return Err(Error::InvalidParameter("delta_factor must lie in (0,1)".into()));
        }
        if !(self.witness_tol > 0.0) || self.max_boxes == 0 {
            return Err(Error::InvalidParameter("witness_tol and max_boxes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Elliptic,
    NotElliptic,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Elliptic => "elliptic",
            Status::NotElliptic => "not-elliptic",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub q: Vec<Rational>,
    /// A point on the cube surface with all components nonzero.
    pub xi0: Vec<f64>,
    /// `sum_j |P_jq(xi0)|` with the original coefficients.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    pub delta: f64,
    /// Certified lower bound on `sum_j |P_jq|^2` over the margin region.
    pub min_certified: Option<f64>,
    pub boxes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FacetOutcome {
    /// Positive at every margin level down to `delta`.
    Certified,
    /// The minimum tends to zero at a coordinate hyperplane on which every
    /// part restricts to zero; certified down to the previous level.
    BoundaryLimited { axis: usize },
    Witness(Witness),
    Undecided(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FacetCertificate {
    pub q: Vec<Rational>,
    pub parts: Vec<OperatorSymbol>,
    pub levels: Vec<LevelResult>,
    pub outcome: FacetOutcome,
}

impl FacetCertificate {
    /// Finest certified level, as `(delta, bound)`.
    pub fn finest(&self) -> Option<(f64, f64)> {
        self.levels
            .iter()
            .filter_map(|l| l.min_certified.map(|m| (l.delta, m)))
            .last()
    }

    pub fn certified_at(&self, delta: f64) -> Option<f64> {
        self.levels
            .iter()
            .find(|l| (l.delta - delta).abs() <= 1e-12 * delta)
            .and_then(|l| l.min_certified)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticityVerdict {
    pub status: Status,
    pub per_facet: Vec<FacetCertificate>,
    pub witness: Option<Witness>,
    pub config: EllipticityConfig,
}

/// Decides for each `q` in `Q(F)` whether `sum_j |P_jq|^2` vanishes off the
/// coordinate hyperplanes.
pub fn check_proposition(system: &SymbolSystem, f: &NewtonPolyhedron, cfg: &EllipticityConfig) -> Result<EllipticityVerdict> {
    cfg.validate()?;
    f.require_regular()?;
    let mut per_facet = Vec::new();
    for q in f.facet_normals() {
        let parts: Vec<OperatorSymbol> = system
            .symbols()
            .iter()
            .map(|p| qh_part(p, q).map(|h| h.part))
            .collect::<Result<_>>()?;
        per_facet.push(certify_facet(q, parts, cfg));
    }
    let witness = per_facet.iter().find_map(|c| match &c.outcome {
        FacetOutcome::Witness(w) => Some(w.clone()),
        _ => None,
    });
    let status = if witness.is_some() {
        Status::NotElliptic
    } else if per_facet.iter().any(|c| matches!(c.outcome, FacetOutcome::Undecided(_))) {
        Status::Inconclusive
    } else {
        Status::Elliptic
    };
    Ok(EllipticityVerdict {
        status,
        per_facet,
        witness,
        config: cfg.clone(),
    })
}

struct Term {
    exps: Vec<u32>,
    re: f64,
    im: f64,
    re_box: Interval,
    im_box: Interval,
}

/// A symbol with coefficients divided by a common scale.
struct Compiled {
    terms: Vec<Term>,
}

fn widen(x: f64) -> Interval {
    Interval::new(x.next_down().next_down(), x.next_up().next_up())
}

impl Compiled {
    fn new(p: &OperatorSymbol, scale: f64) -> Self {
        let terms = p
            .terms()
            .iter()
            .map(|(a, c)| {
                let re = to_f64(&c.re) / scale;
                let im = to_f64(&c.im) / scale;
                Term {
                    exps: a.entries().to_vec(),
                    re,
                    im,
                    re_box: if re == 0.0 { Interval::zero() } else { widen(re) },
                    im_box: if im == 0.0 { Interval::zero() } else { widen(im) },
                }
            })
            .collect();
        Compiled { terms }
    }

    fn eval(&self, xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let m: f64 = t.exps.iter().zip(xi).map(|(&e, x)| x.powi(e as i32)).product();
                Complex64::new(t.re * m, t.im * m)
            })
            .sum()
    }

    fn eval_box(&self, b: &[Interval]) -> (Interval, Interval) {
        let mut re = Interval::zero();
        let mut im = Interval::zero();
        for t in &self.terms {
            let mono = t.exps.iter().zip(b).fold(Interval::point(1.0), |acc, (&e, x)| acc * x.powi(e));
            re = re + t.re_box * mono;
            im = im + t.im_box * mono;
        }
        (re, im)
    }
}

struct Objective {
    parts: Vec<Compiled>,
    first: Vec<Vec<Compiled>>,
    second: Vec<Vec<Compiled>>,
}

impl Objective {
    fn new(parts: &[OperatorSymbol], scale: f64) -> Self {
        let dim = parts[0].dim();
        let d = |p: &OperatorSymbol, i: usize, k: u32| {
            let mut e = vec![0; dim];
            e[i] = k;
            Compiled::new(&p.xi_derivative(&MultiIndex::new(e)), scale)
        };
        Objective {
            parts: parts.iter().map(|p| Compiled::new(p, scale)).collect(),
            first: parts.iter().map(|p| (0..dim).map(|i| d(p, i, 1)).collect()).collect(),
            second: parts.iter().map(|p| (0..dim).map(|i| d(p, i, 2)).collect()).collect(),
        }
    }

    fn value(&self, xi: &[f64]) -> f64 {
        self.parts.iter().map(|p| p.eval(xi).norm_sqr()).sum()
    }

    fn abs_sum(&self, xi: &[f64]) -> f64 {
        self.parts.iter().map(|p| p.eval(xi).norm()).sum()
    }

    /// `sum_j sum_alpha |a_alpha xi^alpha|`, the size of the terms before
    /// cancellation.
    fn term_mass(&self, xi: &[f64]) -> f64 {
        self.parts
            .iter()
            .flat_map(|p| p.terms.iter())
            .map(|t| {
                let m: f64 = t.exps.iter().zip(xi).map(|(&e, x)| x.powi(e as i32)).product();
                m.abs() * t.re.hypot(t.im)
            })
            .sum()
    }

    fn lower(&self, b: &[Interval]) -> f64 {
        self.parts
            .iter()
            .map(|p| {
                let (re, im) = p.eval_box(b);
                (re.square() + im.square()).lo
            })
            .fold(0.0, |a, x| (a + x).next_down())
            .max(0.0)
    }

    /// `m`, `dm/dxi_i`, `d2m/dxi_i^2`.
    fn coordinate_derivatives(&self, xi: &[f64], i: usize) -> (f64, f64, f64) {
        let mut m = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (k, p) in self.parts.iter().enumerate() {
            let v = p.eval(xi);
            let g = self.first[k][i].eval(xi);
            let h = self.second[k][i].eval(xi);
            m += v.norm_sqr();
            d1 += 2.0 * (v.conj() * g).re;
            d2 += 2.0 * (g.norm_sqr() + (v.conj() * h).re);
        }
        (m, d1, d2)
    }
}

struct Cell {
    lower: f64,
    order: u64,
    face: usize,
    bounds: Vec<Interval>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // Reversed so the max-heap pops the smallest lower bound first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then_with(|| other.order.cmp(&self.order))
    }
}

enum LevelOutcome {
    Certified(f64),
    Witness(Vec<f64>),
    Stalled { best: Vec<f64>, lower: f64 },
}

fn certify_facet(q: &[Rational], parts: Vec<OperatorSymbol>, cfg: &EllipticityConfig) -> FacetCertificate {
    let dim = q.len();
    let mass: f64 = parts.iter().map(OperatorSymbol::coefficient_mass).sum();
    let objective = Objective::new(&parts, mass);
    let mut levels = Vec::new();
    let mut outcome = FacetOutcome::Certified;
    for delta in cfg.levels() {
        let (result, boxes) = search_level(&objective, dim, delta, cfg);
        match result {
            LevelOutcome::Certified(lower) => levels.push(LevelResult {
                delta,
                min_certified: Some(lower * mass * mass),
                boxes,
            }),
            LevelOutcome::Witness(xi0) => {
                levels.push(LevelResult {
                    delta,
                    min_certified: None,
                    boxes,
                });
                let residual = parts.iter().map(|p| p.eval_unchecked(&xi0).norm()).sum();
                outcome = FacetOutcome::Witness(Witness {
                    q: q.to_vec(),
                    xi0,
                    residual,
                });
                break;
            }
            LevelOutcome::Stalled { best, lower } => {
                levels.push(LevelResult {
                    delta,
                    min_certified: None,
                    boxes,
                });
                let axis = (0..dim)
                    .min_by(|&a, &b| best[a].abs().total_cmp(&best[b].abs()))
                    .expect("dim >= 1");
                let near_margin = best[axis].abs() <= 2.0 * delta;
                let vanishes = parts.iter().all(|p| p.restrict_to_hyperplane(axis).is_zero());
                let any_certified = levels.iter().any(|l| l.min_certified.is_some());
                outcome = if near_margin && vanishes && any_certified {
                    FacetOutcome::BoundaryLimited { axis }
                } else {
                    FacetOutcome::Undecided(format!(
                        "bounds straddle zero at delta = {delta:e} (lower bound {lower:e}, best value {:e})",
                        objective.value(&best) * mass * mass
                    ))
                };
                break;
            }
        }
    }
    FacetCertificate {
        q: q.to_vec(),
        parts,
        levels,
        outcome,
    }
}

fn initial_cells(dim: usize, delta: f64) -> Vec<(usize, Vec<Interval>)> {
    let mut out = Vec::new();
    for face in 0..dim {
        for face_sign in [1.0, -1.0] {
            for mask in 0u32..(1 << (dim - 1)) {
                let mut bit = 0;
                let bounds = (0..dim)
                    .map(|i| {
                        if i == face {
                            return Interval::point(face_sign);
                        }
                        let negative = mask & (1 << bit) != 0;
                        bit += 1;
                        if negative {
                            Interval::new(-1.0, -delta)
                        } else {
                            Interval::new(delta, 1.0)
                        }
                    })
                    .collect();
                out.push((face, bounds));
            }
        }
    }
    out
}

fn center(bounds: &[Interval]) -> Vec<f64> {
    bounds.iter().map(Interval::mid).collect()
}

fn search_level(obj: &Objective, dim: usize, delta: f64, cfg: &EllipticityConfig) -> (LevelOutcome, usize) {
    const POLISH_TRIGGER: f64 = 1e-12;
    let mut heap = BinaryHeap::new();
    let mut order = 0u64;
    let mut best = (f64::INFINITY, Vec::new());
    let mut last_polished = f64::INFINITY;
    let push = |heap: &mut BinaryHeap<Cell>, order: &mut u64, best: &mut (f64, Vec<f64>), face: usize, bounds: Vec<Interval>| {
        let c = center(&bounds);
        let v = obj.value(&c);
        if v < best.0 {
            *best = (v, c);
        }
        *order += 1;
        heap.push(Cell {
            lower: obj.lower(&bounds),
            order: *order,
            face,
            bounds,
        });
    };
    for (face, bounds) in initial_cells(dim, delta) {
        push(&mut heap, &mut order, &mut best, face, bounds);
    }
    let mut processed = 0usize;
    while let Some(cell) = heap.pop() {
        if cell.lower > 0.0 && (cell.lower >= 0.25 * best.0 || processed >= cfg.max_boxes) {
            return (LevelOutcome::Certified(cell.lower), processed);
        }
        if best.0 <= POLISH_TRIGGER && best.0 < 1e-3 * last_polished {
            last_polished = best.0;
            if let Some(w) = polish(obj, &best.1, cfg) {
                return (LevelOutcome::Witness(w), processed);
            }
        }
        let free = (0..dim)
            .filter(|&i| i != cell.face)
            .max_by(|&a, &b| cell.bounds[a].width().total_cmp(&cell.bounds[b].width()));
        let splittable = free.map(|i| cell.bounds[i].width() > 1e-15).unwrap_or(false);
        if processed >= cfg.max_boxes || !splittable {
            if let Some(w) = polish(obj, &best.1, cfg) {
                return (LevelOutcome::Witness(w), processed);
            }
            return (
                LevelOutcome::Stalled {
                    best: best.1,
                    lower: cell.lower,
                },
                processed,
            );
        }
        let i = free.expect("splittable");
        let mid = cell.bounds[i].mid();
        let mut left = cell.bounds.clone();
        left[i] = Interval::new(cell.bounds[i].lo, mid);
        let mut right = cell.bounds;
        right[i] = Interval::new(mid, right[i].hi);
        push(&mut heap, &mut order, &mut best, cell.face, left);
        push(&mut heap, &mut order, &mut best, cell.face, right);
        processed += 1;
    }
    unreachable!("the cell heap never empties before a decision")
}

/// Coordinate-wise damped Newton on `m`, golden section when the curvature
/// is not positive. Stays on the face and in the sign orthant of `start`.
fn polish(obj: &Objective, start: &[f64], cfg: &EllipticityConfig) -> Option<Vec<f64>> {
    if start.is_empty() {
        return None;
    }
    let dim = start.len();
    let mut x = start.to_vec();
    let face = (0..dim).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()))?;
    let range = |v: f64| -> (f64, f64) {
        if v > 0.0 {
            (cfg.delta_min, 1.0)
        } else {
            (-1.0, -cfg.delta_min)
        }
    };
    let mut m = obj.value(&x);
    for _ in 0..cfg.polish_iterations {
        let before = m;
        for i in (0..dim).filter(|&i| i != face) {
            let (lo, hi) = range(x[i]);
            let (_, d1, d2) = obj.coordinate_derivatives(&x, i);
            let mut moved = false;
            if d2 > 0.0 && d1 != 0.0 {
                let mut step = -d1 / d2;
                for _ in 0..40 {
                    let mut y = x.clone();
                    y[i] = (x[i] + step).clamp(lo, hi);
                    let my = obj.value(&y);
                    if my < m {
                        x = y;
                        m = my;
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                }
            }
            if !moved && d1 != 0.0 {
                let (y, my) = golden(obj, &x, i, lo, hi);
                if my < m {
                    x = y;
                    m = my;
                }
            }
        }
        if m == 0.0 || m >= before * (1.0 - 1e-12) {
            break;
        }
    }
    // A witness must be small in absolute terms and come from cancellation;
    // small values caused only by small coordinates near the margin do not
    // count.
    let min_abs = x.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    let residual = obj.abs_sum(&x);
    let cancels = residual <= CANCELLATION * obj.term_mass(&x);
    (residual < cfg.witness_tol && cancels && min_abs >= cfg.delta_min).then_some(x)
}

const CANCELLATION: f64 = 1e-6;

fn golden(obj: &Objective, x: &[f64], i: usize, lo: f64, hi: f64) -> (Vec<f64>, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let at = |t: f64| {
        let mut y = x.to_vec();
        y[i] = t;
        obj.value(&y)
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (at(c), at(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d);
        }
    }
    let t = 0.5 * (a + b);
    let mut y = x.to_vec();
    y[i] = t;
    let v = obj.value(&y);
    (y, v)
}
