//! Multi-indices, constant-coefficient operator symbols and the
//! generalized one-variable polynomials used by the wave-packet lab.
//!
//! A symbol `P(xi) = sum a_alpha xi^alpha` stores its coefficients as exact
//! complex rationals and is always kept canonical: no stored coefficient is
//! zero, so the key set is exactly the support.

mod multi_index;
mod parse;
mod rpoly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::{Complex, Complex64};
use num_traits::Zero;

pub use multi_index::MultiIndex;
pub use parse::{parse_symbol, parse_system};
pub use rpoly::RPolynomial;

use crate::error::{Error, Result};
use crate::rational::{int, to_f64, Rational};

/// Exact complex coefficient `re + i im`.
pub type Coeff = Complex<Rational>;

pub fn coeff(re: Rational, im: Rational) -> Coeff {
    Complex::new(re, im)
}

pub fn coeff_to_f64(c: &Coeff) -> Complex64 {
    Complex64::new(to_f64(&c.re), to_f64(&c.im))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSymbol {
    dim: usize,
    terms: BTreeMap<MultiIndex, Coeff>,
}

impl OperatorSymbol {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        OperatorSymbol {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a canonical symbol, summing repeated keys and dropping zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Coeff)>,
    {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut out = OperatorSymbol::zero(dim);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: alpha.dim(),
                });
            }
            out.add_term(alpha, c);
        }
        Ok(out)
    }

    /// Convenience constructor from real integer coefficients.
    pub fn from_real(dim: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        Self::from_terms(
            dim,
            terms
                .iter()
                .map(|(a, c)| (MultiIndex::new(a.to_vec()), coeff(int(*c), int(0)))),
        )
    }

    fn add_term(&mut self, alpha: MultiIndex, c: Coeff) {
        let entry = self
            .terms
            .entry(alpha.clone())
            .or_insert_with(|| coeff(int(0), int(0)));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&alpha);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Coeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Option<&Coeff> {
        self.terms.get(alpha)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// `P(xi) = sum a_alpha xi^alpha` in double precision.
    pub fn evaluate(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: xi.len(),
            });
        }
        Ok(self.eval_unchecked(xi))
    }

    pub(crate) fn eval_unchecked(&self, xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(alpha, c)| coeff_to_f64(c) * alpha.monomial(xi))
            .sum()
    }

    /// The partial derivative `d^alpha_xi P`.
    pub fn xi_derivative(&self, alpha: &MultiIndex) -> OperatorSymbol {
        assert_eq!(alpha.dim(), self.dim, "dimension mismatch");
        let mut out = OperatorSymbol::zero(self.dim);
        for (beta, c) in &self.terms {
            let Some(rest) = beta.checked_sub(alpha) else {
                continue;
            };
            let factor: i64 = beta
                .entries()
                .iter()
                .zip(alpha.entries())
                .map(|(&b, &a)| falling(b, a))
                .product();
            let f = int(factor);
            out.add_term(rest, coeff(&c.re * &f, &c.im * &f));
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> OperatorSymbol {
        let mut out = OperatorSymbol::zero(self.dim);
        for (alpha, a) in &self.terms {
            out.add_term(alpha.clone(), a * c);
        }
        out
    }

    /// Terms whose exponent satisfies `keep`.
    pub fn filter<F: Fn(&MultiIndex) -> bool>(&self, keep: F) -> OperatorSymbol {
        OperatorSymbol {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| keep(a))
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    /// Restriction to the coordinate hyperplane `xi_j = 0`.
    pub fn restrict_to_hyperplane(&self, j: usize) -> OperatorSymbol {
        self.filter(|a| a.entries()[j] == 0)
    }

    /// Sum of coefficient magnitudes, a scale for relative tolerances.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.values().map(|c| coeff_to_f64(c).norm()).sum()
    }
}

fn falling(b: u32, a: u32) -> i64 {
    (0..a).map(|i| (b - i) as i64).product()
}

impl Add for &OperatorSymbol {
    type Output = OperatorSymbol;

    fn add(self, rhs: &OperatorSymbol) -> OperatorSymbol {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (alpha, c) in &rhs.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        out
    }
}

impl Mul for &OperatorSymbol {
    type Output = OperatorSymbol;

    fn mul(self, rhs: &OperatorSymbol) -> OperatorSymbol {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = OperatorSymbol::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for OperatorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::print_symbol(self))
    }
}

/// An ordered system `(P_1, ..., P_N)` of symbols sharing one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolSystem {
    dim: usize,
    symbols: Vec<OperatorSymbol>,
}

impl SymbolSystem {
    pub fn new(symbols: Vec<OperatorSymbol>) -> Result<Self> {
        let first = symbols.first().ok_or(Error::EmptySystem)?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Some(bad) = symbols.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(SymbolSystem { dim, symbols })
    }

    pub fn single(symbol: OperatorSymbol) -> Self {
        let dim = symbol.dim();
        SymbolSystem {
            dim,
            symbols: vec![symbol],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> &[OperatorSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Union of the supports of all symbols.
    pub fn support(&self) -> Vec<MultiIndex> {
        let mut all: Vec<MultiIndex> = self
            .symbols
            .iter()
            .flat_map(|p| p.support().cloned())
            .collect();
        all.sort();
        all.dedup();
        all
    }

    pub fn scale(&self, c: &Coeff) -> SymbolSystem {
        SymbolSystem {
            dim: self.dim,
            symbols: self.symbols.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `sum_j |P_j(xi)|`.
    pub fn abs_sum(&self, xi: &[f64]) -> f64 {
        self.symbols.iter().map(|p| p.eval_unchecked(xi).norm()).sum()
    }
}

impl fmt::Display for SymbolSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.symbols {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}
