//! Machine-readable analysis report. Rationals are serialized as `"p/q"`
//! strings, and each block names the exactness of its numeric fields.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ellipticity::{EllipticityVerdict, FacetOutcome, InequalityEstimate};
use crate::polyhedron::NewtonPolyhedron;
use crate::rational::{format, format_vec};
use crate::symbol::SymbolSystem;
use crate::wavepacket::{DichotomyReport, ViolationReport, WavepacketSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Rational,
    Float,
}

type Tags = BTreeMap<&'static str, Exactness>;

fn tags(rational: &[&'static str], float: &[&'static str]) -> Tags {
    let mut t = Tags::new();
    t.extend(rational.iter().map(|k| (*k, Exactness::Rational)));
    t.extend(float.iter().map(|k| (*k, Exactness::Float)));
    t
}

/// Non-finite floats become `null`.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: "mqe",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputBlock {
    pub source: Option<String>,
    pub dim: usize,
    pub symbols: Vec<String>,
}

impl InputBlock {
    pub fn new(source: Option<String>, system: &SymbolSystem) -> Self {
        InputBlock {
            source,
            dim: system.dim(),
            symbols: system.symbols().iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyhedronBlock {
    pub vertices: Vec<Vec<u32>>,
    pub facets: Vec<Vec<String>>,
    pub regular: bool,
    pub degenerate: bool,
    pub diagnostic: Option<String>,
    pub mu: Option<String>,
    pub mu_per_axis: Option<Vec<String>>,
    pub theta: Option<Vec<String>>,
    pub k_e: Option<String>,
    pub exactness: Tags,
}

impl From<&NewtonPolyhedron> for PolyhedronBlock {
    fn from(f: &NewtonPolyhedron) -> Self {
        let ix = f.indices();
        PolyhedronBlock {
            vertices: f.vertices().iter().map(|v| v.entries().to_vec()).collect(),
            facets: f.facet_normals().iter().map(|q| format_vec(q)).collect(),
            regular: f.is_regular(),
            degenerate: f.is_degenerate(),
            diagnostic: f.diagnostic().map(str::to_owned),
            mu: ix.map(|i| format(&i.mu)),
            mu_per_axis: ix.map(|i| format_vec(&i.mu_per_axis)),
            theta: ix.map(|i| format_vec(&i.theta)),
            k_e: ix.map(|i| format(&i.k_e)),
            exactness: tags(&["vertices", "facets", "mu", "mu_per_axis", "theta", "k_e"], &[]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelBlock {
    pub delta: f64,
    pub min_certified: Option<f64>,
    pub boxes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FacetBlock {
    pub q: Vec<String>,
    pub parts: Vec<String>,
    pub outcome: &'static str,
    pub detail: Option<String>,
    /// Finest certified level.
    pub delta: Option<f64>,
    pub min_certified: Option<f64>,
    pub levels: Vec<LevelBlock>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessBlock {
    pub q: Vec<String>,
    pub xi0: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticityBlock {
    pub status: &'static str,
    pub facets: Vec<FacetBlock>,
    pub witness: Option<WitnessBlock>,
    pub delta_start: f64,
    pub delta_factor: f64,
    pub delta_min: f64,
    pub witness_tol: f64,
    pub max_boxes: usize,
    pub exactness: Tags,
}

impl From<&EllipticityVerdict> for EllipticityBlock {
    fn from(v: &EllipticityVerdict) -> Self {
        let facets = v
            .per_facet
            .iter()
            .map(|c| {
                let (outcome, detail) = match &c.outcome {
                    FacetOutcome::Certified => ("certified", None),
                    FacetOutcome::BoundaryLimited { axis } => ("boundary-limited", Some(format!("xi{} = 0", axis + 1))),
                    FacetOutcome::Witness(_) => ("witness", None),
                    FacetOutcome::Undecided(why) => ("undecided", Some(why.clone())),
                };
                let finest = c.finest();
                FacetBlock {
                    q: format_vec(&c.q),
                    parts: c.parts.iter().map(|p| p.to_string()).collect(),
                    outcome,
                    detail,
                    delta: finest.map(|f| f.0),
                    min_certified: finest.map(|f| f.1),
                    levels: c
                        .levels
                        .iter()
                        .map(|l| LevelBlock {
                            delta: l.delta,
                            min_certified: l.min_certified,
                            boxes: l.boxes,
                        })
                        .collect(),
                }
            })
            .collect();
        EllipticityBlock {
            status: v.status.as_str(),
            facets,
            witness: v.witness.as_ref().map(|w| WitnessBlock {
                q: format_vec(&w.q),
                xi0: w.xi0.clone(),
                residual: w.residual,
            }),
            delta_start: v.config.delta_start,
            delta_factor: v.config.delta_factor,
            delta_min: v.config.delta_min,
            witness_tol: v.config.witness_tol,
            max_boxes: v.config.max_boxes,
            exactness: tags(&["facets.q", "witness.q"], &["facets.min_certified", "facets.delta", "witness.xi0", "witness.residual"]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityBlock {
    /// `null` when a sampled denominator vanished.
    pub c_hat: Option<f64>,
    pub r: f64,
    pub worst_ratio_point: Vec<f64>,
    pub samples: usize,
    pub profile: Vec<[f64; 2]>,
    pub growth: Option<f64>,
    pub bounded: bool,
    pub zero_point: Option<Vec<f64>>,
    pub exactness: Tags,
}

impl From<&InequalityEstimate> for InequalityBlock {
    fn from(e: &InequalityEstimate) -> Self {
        InequalityBlock {
            c_hat: finite(e.c_hat),
            r: e.r,
            worst_ratio_point: e.worst_ratio_point.clone(),
            samples: e.samples,
            profile: e.profile.iter().map(|(r, v)| [*r, *v]).collect(),
            growth: finite(e.growth),
            bounded: e.bounded,
            zero_point: e.zero_point.clone(),
            exactness: tags(&[], &["c_hat", "r", "worst_ratio_point", "profile", "growth"]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    /// `l` for iterate bounds, the multi-index for derivative bounds.
    pub index: Vec<u32>,
    /// `k(α, F)` for derivative bounds.
    pub k: Option<String>,
    pub log_bound: f64,
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsBlock {
    pub kind: &'static str,
    pub s: f64,
    pub c: f64,
    pub mu: String,
    pub regime: Option<&'static str>,
    pub rows: Vec<BoundRow>,
    pub exactness: Tags,
}

impl BoundsBlock {
    pub fn new(kind: &'static str, s: f64, c: f64, mu: String, regime: Option<&'static str>, rows: Vec<BoundRow>) -> Self {
        BoundsBlock {
            kind,
            s,
            c,
            mu,
            regime,
            rows,
            exactness: tags(&["mu", "rows.k"], &["s", "c", "rows.log_bound", "rows.bound"]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepBlock {
    pub c: f64,
    pub exceedances: Vec<u32>,
    pub extended_crossing: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationRowBlock {
    pub m: u32,
    pub ln_derivative: f64,
    pub ln_bounds: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationBlock {
    pub s: f64,
    pub constants: Vec<SweepBlock>,
    pub rows: Vec<ViolationRowBlock>,
}

impl From<&ViolationReport> for ViolationBlock {
    fn from(r: &ViolationReport) -> Self {
        ViolationBlock {
            s: r.s,
            constants: r
                .constants
                .iter()
                .map(|c| SweepBlock {
                    c: c.c,
                    exceedances: c.exceedances.clone(),
                    extended_crossing: c.extended_crossing,
                })
                .collect(),
            rows: r
                .rows
                .iter()
                .map(|row| ViolationRowBlock {
                    m: row.m,
                    ln_derivative: row.ln_derivative,
                    ln_bounds: row.ln_bounds.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitBlock {
    pub c_fit: f64,
    pub s_fit: f64,
    pub exponent: f64,
    pub exponent_limit: f64,
    pub residual: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WavepacketBlock {
    pub q: Vec<String>,
    pub xi0: Vec<f64>,
    pub x0: Vec<f64>,
    pub s: String,
    pub sigma: String,
    pub bump_sigma: String,
    pub bump_class: f64,
    pub epsilon: String,
    pub eta: String,
    pub attained_index: String,
    pub weaker_index: String,
    pub delta: f64,
    pub alpha: Vec<u32>,
    pub lower_bound_from: Option<u32>,
    pub violation: ViolationBlock,
    pub weaker: ViolationBlock,
    pub ln_iterate_norms: Vec<f64>,
    pub fit: FitBlock,
    pub violation_observed: bool,
    pub membership_observed: bool,
    pub dichotomy_observed: bool,
    pub exactness: Tags,
}

impl WavepacketBlock {
    pub fn new(spec: &WavepacketSpec, rep: &DichotomyReport) -> Self {
        WavepacketBlock {
            q: format_vec(&spec.q),
            xi0: spec.xi0.clone(),
            x0: spec.x0.clone(),
            s: format(&spec.s),
            sigma: format(&spec.sigma),
            bump_sigma: format(&spec.bump_sigma),
            bump_class: spec.bump_class(),
            epsilon: format(&spec.epsilon),
            eta: format(&spec.eta),
            attained_index: format(&spec.attained_index()),
            weaker_index: format(&spec.weaker_index()),
            delta: spec.delta,
            alpha: rep.alpha.entries().to_vec(),
            lower_bound_from: rep.lower_bound_from,
            violation: (&rep.violation).into(),
            weaker: (&rep.weaker).into(),
            ln_iterate_norms: rep.ln_iterate_norms.clone(),
            fit: FitBlock {
                c_fit: rep.fit.c_fit,
                s_fit: rep.fit.s_fit,
                exponent: rep.fitted_exponent(),
                exponent_limit: rep.exponent_limit,
                residual: rep.fit.residual,
                degenerate: rep.fit.degenerate,
            },
            violation_observed: rep.violation_observed(),
            membership_observed: rep.membership_observed(),
            dichotomy_observed: rep.observed(),
            exactness: tags(
                &["q", "s", "sigma", "bump_sigma", "epsilon", "eta", "attained_index", "weaker_index"],
                &["xi0", "x0", "delta", "bump_class", "violation", "weaker", "ln_iterate_norms", "fit"],
            ),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub input: InputBlock,
    pub config: serde_json::Value,
    pub polyhedron: PolyhedronBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ellipticity: Option<EllipticityBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inequality: Option<InequalityBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavepacket: Option<WavepacketBlock>,
}

impl AnalysisReport {
    pub fn new(input: InputBlock, config: serde_json::Value, f: &NewtonPolyhedron) -> Self {
        AnalysisReport {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::default(),
            input,
            config,
            polyhedron: f.into(),
            ellipticity: None,
            inequality: None,
            bounds: None,
            wavepacket: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellipticity::{check_proposition, EllipticityConfig};
    use crate::polyhedron::build_polyhedron;
    use crate::symbol::parse_system;

    #[test]
    fn polyhedron_block_is_exact() {
        let sys = parse_system("xi1^4 + xi1^2*xi2^4 + xi2^6", None).unwrap();
        let f = build_polyhedron(&sys).unwrap();
        let v = check_proposition(&sys, &f, &EllipticityConfig::default()).unwrap();
        let mut rep = AnalysisReport::new(InputBlock::new(None, &sys), serde_json::json!({}), &f);
        rep.ellipticity = Some((&v).into());
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(json["polyhedron"]["mu"], "8");
        assert_eq!(json["polyhedron"]["theta"], serde_json::json!(["4/3", "1"]));
        assert_eq!(json["polyhedron"]["facets"], serde_json::json!([["1/4", "1/8"], ["1/6", "1/6"]]));
        assert_eq!(json["polyhedron"]["exactness"]["mu"], "rational");
        assert_eq!(json["ellipticity"]["status"], "elliptic");
        assert_eq!(json["schema_version"], 1);
        assert_eq!(rep.to_json(), rep.to_json());
    }
}
