//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_panels: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let s = f(c - h * XGK[j]) + f(c + h * XGK[j]);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Panel {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// Integrates `f` over `[a, b]` with breakpoints splitting the initial panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("quadrature needs increasing breakpoints".into()));
    }
    let mut heap: BinaryHeap<Panel> = breakpoints.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult {
                value,
                error,
                panels: heap.len(),
            });
        }
        if heap.len() >= opts.max_panels {
            return Err(Error::Quadrature(format!(
                "error estimate {error:e} above target {target:e} after {} panels",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(Error::Quadrature("panel width reached machine resolution".into()));
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// `ln ∫_1^∞ r^a exp(-r^eta) dr`, integrated in `y = ln r` with the peak of
/// the integrand factored out and the tail cut where it falls below
/// `1e-18` of the peak.
pub fn ln_center_integral(a: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0) || !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("need a >= 0 and eta > 0, got a = {a}, eta = {eta}")));
    }
    let peak = (((a + 1.0) / eta).ln() / eta).max(0.0);
    let scale = (eta * peak).exp();
    let top = (a + 1.0) * peak - scale;
    // g(peak + t) - g(peak), free of cancellation for large `a`.
    let g = |t: f64| (a + 1.0) * t - scale * (eta * t).exp_m1();
    let cut = 1e-18f64.ln();
    let mut span = 1.0 / eta;
    while g(span) > cut {
        span *= 2.0;
    }
    let (mut lo, mut hi) = (0.0, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > cut {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut points = vec![-peak];
    if peak > 0.0 {
        points.push(0.0);
    }
    points.push(hi);
    let res = integrate(
        |t| g(t).exp(),
        &points,
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_panels: 4000,
        },
    )?;
    Ok(top + res.value.ln())
}
