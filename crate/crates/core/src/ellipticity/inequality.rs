//! Sampled estimate of the constant in `V(xi) <= C sum_j |P_j(xi)|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polyhedron::NewtonPolyhedron;
use crate::symbol::SymbolSystem;

use super::scale_along;

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityConfig {
    /// Slice directions per facet normal.
    pub directions: usize,
    pub radii: usize,
    /// The sweep covers `[R, span * R]`.
    pub span: f64,
    pub seed: u64,
    /// Compass-search steps from the worst direction at each radius.
    pub refine_steps: usize,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        InequalityConfig {
            directions: 64,
            radii: 32,
            span: 1e4,
            seed: 0,
            refine_steps: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityEstimate {
    /// `max V / sum_j |P_j|`; infinite when a sampled denominator vanished.
    pub c_hat: f64,
    pub r: f64,
    pub worst_ratio_point: Vec<f64>,
    pub samples: usize,
    /// Per radius, the largest `V / (1 + sum_j |P_j|)`.
    pub profile: Vec<(f64, f64)>,
    /// Largest profile value over the profile value at the smallest radius.
    pub growth: f64,
    pub bounded: bool,
    /// A sample where `sum_j |P_j|` vanished exactly.
    pub zero_point: Option<Vec<f64>>,
}

/// Sweeps the shells `r^q K` for every `q` in `Q(F)`, `K` the cube surface.
pub fn check_inequality(system: &SymbolSystem, f: &NewtonPolyhedron, r_min: f64, cfg: &InequalityConfig) -> Result<InequalityEstimate> {
    f.require_regular()?;
    if !(r_min > 0.0 && r_min.is_finite()) {
        return Err(Error::InvalidParameter(format!("R must be positive, got {r_min}")));
    }
    if cfg.radii < 2 || cfg.directions == 0 || !(cfg.span > 1.0) {
        return Err(Error::InvalidParameter("inequality sampler needs >= 2 radii, >= 1 direction and span > 1".into()));
    }
    let dim = system.dim();
    let slice = slice_points(dim, cfg.directions, cfg.seed);
    let normals = f.normals_f64();
    let mut est = InequalityEstimate {
        c_hat: 0.0,
        r: r_min,
        worst_ratio_point: Vec::new(),
        samples: 0,
        profile: Vec::with_capacity(cfg.radii),
        growth: 1.0,
        bounded: false,
        zero_point: None,
    };
    let record = |est: &mut InequalityEstimate, xi: &[f64]| -> f64 {
        let v = f.weight_unchecked(xi);
        let d = system.abs_sum(xi);
        est.samples += 1;
        let ratio = if d == 0.0 { f64::INFINITY } else { v / d };
        if ratio > est.c_hat || est.worst_ratio_point.is_empty() {
            est.c_hat = ratio;
            est.worst_ratio_point = xi.to_vec();
        }
        if d == 0.0 && est.zero_point.is_none() {
            est.zero_point = Some(xi.to_vec());
        }
        v / (1.0 + d)
    };
    for k in 0..cfg.radii {
        let r = r_min * cfg.span.powf(k as f64 / (cfg.radii - 1) as f64);
        let mut worst = f64::NEG_INFINITY;
        for q in &normals {
            let mut best_dir = 0;
            let mut best_val = f64::NEG_INFINITY;
            for (i, d) in slice.iter().enumerate() {
                let v = record(&mut est, &scale_along(q, r, d));
                if v > best_val {
                    best_val = v;
                    best_dir = i;
                }
            }
            let mut dir = slice[best_dir].clone();
            let mut step = 0.25;
            let face = (0..dim).max_by(|&a, &b| dir[a].abs().total_cmp(&dir[b].abs())).expect("dim >= 1");
            for _ in 0..cfg.refine_steps {
                let mut moved = false;
                for i in (0..dim).filter(|&i| i != face) {
                    for sign in [1.0, -1.0] {
                        let mut cand = dir.clone();
                        cand[i] = (cand[i] + sign * step).clamp(-1.0, 1.0);
                        let v = record(&mut est, &scale_along(q, r, &cand));
                        if v > best_val {
                            best_val = v;
                            dir = cand;
                            moved = true;
                        }
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            worst = worst.max(best_val);
        }
        est.profile.push((r, worst));
    }
    let first = est.profile[0].1;
    let top = est.profile.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    est.growth = top / first;
    est.bounded = est.c_hat.is_finite() && top <= 2.0 * first;
    Ok(est)
}

/// Points on the surface of `[-1,1]^n`. In the plane: equally spaced around
/// the perimeter starting at a corner. Otherwise all corners followed by
/// seeded uniform points on random faces.
fn slice_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    if dim == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    if dim == 2 {
        let per_side = count.div_ceil(4).max(1);
        let h = 2.0 / per_side as f64;
        let mut out = Vec::with_capacity(4 * per_side);
        for k in 0..per_side {
            let t = k as f64 * h;
            out.push(vec![1.0, 1.0 - t]);
            out.push(vec![1.0 - t, -1.0]);
            out.push(vec![-1.0, -1.0 + t]);
            out.push(vec![-1.0 + t, 1.0]);
        }
        return out;
    }
    let mut out: Vec<Vec<f64>> = (0u32..1 << dim)
        .map(|mask| (0..dim).map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 }).collect())
        .collect();
    let target = count.max(out.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < target {
        let face = rng.random_range(0..dim);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = (0..dim)
            .map(|i| if i == face { sign } else { rng.random_range(-1.0..=1.0) })
            .collect();
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::build_polyhedron;
    use crate::symbol::parse_system;

    fn estimate(text: &str, r: f64) -> InequalityEstimate {
        let sys = parse_system(text, None).unwrap();
        let f = build_polyhedron(&sys).unwrap();
        check_inequality(&sys, &f, r, &InequalityConfig::default()).unwrap()
    }

    #[test]
    fn laplacian_constant() {
        let e = estimate("xi1^2 + xi2^2", 2.0);
        assert!(e.c_hat.is_finite() && e.c_hat <= 4.0, "{}", e.c_hat);
        assert!(e.bounded);
    }

    #[test]
    fn pair_system_constant() {
        let e = estimate("xi1^2\nxi2^2", 2.0);
        assert!(e.c_hat <= 2.0, "{}", e.c_hat);
        assert!(e.bounded);
    }

    #[test]
    fn wave_diverges() {
        let e = estimate("xi1^2 - xi2^2", 1.0);
        assert!(e.c_hat.is_infinite());
        let z = e.zero_point.unwrap();
        assert_eq!(z[0].abs(), z[1].abs());
        assert!(e.growth >= 10.0);
        assert!(!e.bounded);
    }

    #[test]
    fn perimeter_includes_corners() {
        let pts = slice_points(2, 64, 0);
        assert_eq!(pts.len(), 64);
        for c in [[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [-1.0, 1.0]] {
            assert!(pts.iter().any(|p| p[0] == c[0] && p[1] == c[1]));
        }
        let cube = slice_points(3, 64, 7);
        assert_eq!(cube.len(), 64);
        assert_eq!(cube, slice_points(3, 64, 7));
        assert!(cube.iter().all(|p| p.iter().any(|x| x.abs() == 1.0)));
    }
}
