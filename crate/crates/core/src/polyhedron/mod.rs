//! Newton polyhedron `F = conv({0} ∪ supports)` with exact facets and the
//! anisotropy indices of a regular `F`.

mod dd;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, to_f64, Rational};
use crate::symbol::{MultiIndex, SymbolSystem};


/// A facet `<alpha, normal> <= offset`, with `offset` either 1 or 0. Facets
/// through the origin keep a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Facet {
    pub fn through_origin(&self) -> bool {
        self.offset.is_zero()
    }

    /// `-alpha_j <= 0` for some `j`.
    pub fn coordinate_axis(&self) -> Option<usize> {
        if !self.through_origin() {
            return None;
        }
        let nonzero: Vec<usize> = (0..self.normal.len()).filter(|&j| !self.normal[j].is_zero()).collect();
        match nonzero.as_slice() {
            [j] if self.normal[*j].is_negative() => Some(*j),
            _ => None,
        }
    }
}

/// Indices derived from `Q(F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Indices {
    pub mu_per_axis: Vec<Rational>,
    pub mu: Rational,
    pub theta: Vec<Rational>,
    pub k_e: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolyhedron {
    dim: usize,
    vertices: Vec<MultiIndex>,
    facets: Vec<Facet>,
    normals: Vec<Vec<Rational>>,
    regular: bool,
    degenerate: bool,
    diagnostic: Option<String>,
    indices: Option<Indices>,
}

/// Builds the Newton polyhedron of the union of supports.
pub fn build_polyhedron(system: &SymbolSystem) -> Result<NewtonPolyhedron> {
    NewtonPolyhedron::from_points(system.dim(), &system.support())
}

impl NewtonPolyhedron {
    /// Hull of `{0}` and the given exponents.
    pub fn from_points(dim: usize, points: &[MultiIndex]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut set: BTreeSet<MultiIndex> = BTreeSet::new();
        set.insert(MultiIndex::zero(dim));
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            set.insert(p.clone());
        }
        let points: Vec<MultiIndex> = set.into_iter().collect();
        if points.len() == 1 {
            return Ok(NewtonPolyhedron {
                dim,
                vertices: points,
                facets: Vec::new(),
                normals: Vec::new(),
                regular: false,
                degenerate: true,
                diagnostic: Some("degenerate polyhedron {0}: the system has no non-constant terms".into()),
                indices: None,
            });
        }

        // Cone of inequalities (a, b) with b - <a, v> >= 0 at every point.
        let rows: Vec<dd::Vector> = points
            .iter()
            .map(|p| {
                let mut row: dd::Vector = p.entries().iter().map(|&e| -BigInt::from(e)).collect();
                row.push(BigInt::from(1));
                row
            })
            .collect();
        let cone = dd::cone(dim + 1, &rows);

        let lineality_a: Vec<dd::Vector> = cone.lineality.iter().map(|l| l[..dim].to_vec()).collect();
        let vertices: Vec<MultiIndex> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let mut tight: Vec<dd::Vector> = cone
                    .rays
                    .iter()
                    .filter(|r| r.zeros.contains(i))
                    .map(|r| r.dir[..dim].to_vec())
                    .collect();
                tight.extend(lineality_a.iter().cloned());
                dd::rank(&tight) == dim
            })
            .map(|(_, p)| p.clone())
            .collect();

        let mut facets: Vec<Facet> = cone
            .rays
            .iter()
            .filter(|r| r.dir[..dim].iter().any(|x| !x.is_zero()))
            .map(|r| {
                let b = &r.dir[dim];
                if b.is_zero() {
                    Facet {
                        normal: r.dir[..dim].iter().map(|x| Rational::from_integer(x.clone())).collect(),
                        offset: Rational::zero(),
                    }
                } else {
                    Facet {
                        normal: r.dir[..dim]
                            .iter()
                            .map(|x| Rational::new(x.clone(), b.clone()))
                            .collect(),
                        offset: rational::int(1),
                    }
                }
            })
            .collect();
        facets.sort_by(|a, b| b.cmp(a));
        facets.dedup();

        let mut poly = NewtonPolyhedron {
            dim,
            vertices,
            facets,
            normals: Vec::new(),
            regular: false,
            degenerate: false,
            diagnostic: None,
            indices: None,
        };

        if !cone.lineality.is_empty() {
            poly.diagnostic = Some(format!(
                "the hull is {}-dimensional in dimension {}; all exponents lie in a proper subspace",
                dim - cone.lineality.len(),
                dim
            ));
            return Ok(poly);
        }
        if let Some(bad) = poly
            .facets
            .iter()
            .find(|f| (f.through_origin() && f.coordinate_axis().is_none()) || (!f.through_origin() && f.normal.iter().any(|x| !x.is_positive())))
        {
            poly.diagnostic = Some(format!(
                "facet <alpha,({})> <= {} is not a coordinate facet and has no strictly positive normal",
                rational::format_vec(&bad.normal).join(","),
                rational::format(&bad.offset)
            ));
            return Ok(poly);
        }
        poly.regular = true;
        poly.normals = poly
            .facets
            .iter()
            .filter(|f| !f.through_origin())
            .map(|f| f.normal.clone())
            .collect();
        poly.indices = Some(indices(dim, &poly.normals));
        Ok(poly)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The vertex set `S(F)`, including `0`.
    pub fn vertices(&self) -> &[MultiIndex] {
        &self.vertices
    }

    /// All facets, including coordinate facets.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// `Q(F)`: normals scaled to `<alpha,q> = 1` on their facet. Empty unless regular.
    pub fn facet_normals(&self) -> &[Vec<Rational>] {
        &self.normals
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Why the polyhedron is not regular.
    pub fn diagnostic(&self) -> Option<&str> {
        self.diagnostic.as_deref()
    }

    pub fn indices(&self) -> Option<&Indices> {
        self.indices.as_ref()
    }

    pub fn require_regular(&self) -> Result<&Indices> {
        self.indices.as_ref().ok_or_else(|| {
            Error::Irregular(self.diagnostic.clone().unwrap_or_else(|| "not regular".into()))
        })
    }

    pub fn mu(&self) -> Result<&Rational> {
        Ok(&self.require_regular()?.mu)
    }

    /// `k(alpha, F) = max_q <alpha, q>`.
    pub fn k_of(&self, alpha: &[Rational]) -> Result<Rational> {
        self.require_regular()?;
        if alpha.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: alpha.len(),
            });
        }
        Ok(self
            .normals
            .iter()
            .map(|q| alpha.iter().zip(q).map(|(a, b)| a * b).sum::<Rational>())
            .max()
            .expect("regular polyhedra have facets"))
    }

    pub fn k_of_index(&self, alpha: &MultiIndex) -> Result<Rational> {
        self.k_of(&alpha.as_rationals())
    }

    /// `V(xi) = sum over S(F) of |xi^alpha|`.
    pub fn weight_v(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: xi.len(),
            });
        }
        Ok(self.weight_unchecked(xi))
    }

    pub(crate) fn weight_unchecked(&self, xi: &[f64]) -> f64 {
        self.vertices.iter().map(|a| a.monomial(xi).abs()).sum()
    }

    /// The facet normals in double precision.
    pub fn normals_f64(&self) -> Vec<Vec<f64>> {
        self.normals.iter().map(|q| q.iter().map(to_f64).collect()).collect()
    }
}

fn indices(dim: usize, normals: &[Vec<Rational>]) -> Indices {
    let mu_per_axis: Vec<Rational> = (0..dim)
        .map(|j| normals.iter().map(|q| q[j].recip()).max().expect("nonempty"))
        .collect();
    let mu = mu_per_axis.iter().max().expect("dim >= 1").clone();
    let theta = mu_per_axis.iter().map(|m| &mu / m).collect();
    let k_e = normals
        .iter()
        .map(|q| q.iter().sum::<Rational>())
        .max()
        .expect("nonempty");
    Indices {
        mu_per_axis,
        mu,
        theta,
        k_e,
    }
}
