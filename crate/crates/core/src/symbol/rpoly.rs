use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::rational::{self, to_f64, Rational};

/// A finite sum `sum_e a_e r^e` with distinct non-negative rational
/// exponents and no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RPolynomial {
    terms: BTreeMap<Rational, Complex64>,
}

impl RPolynomial {
    pub fn zero() -> Self {
        RPolynomial::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = RPolynomial::zero();
        p.add_term(Rational::from_integer(0.into()), c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, Complex64)>>(terms: I) -> Self {
        let mut p = RPolynomial::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Adds `c r^e`. Panics on a negative exponent.
    pub fn add_term(&mut self, e: Rational, c: Complex64) {
        assert!(e >= Rational::from_integer(0.into()), "negative r-exponent");
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&e);
        }
    }

    pub fn add_scaled(&mut self, other: &RPolynomial, shift: &Rational, c: Complex64) {
        for (e, a) in &other.terms {
            self.add_term(e + shift, a * c);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Rational, Complex64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exponent(&self) -> Option<&Rational> {
        self.terms.keys().next_back()
    }

    /// `sum_e a_e r^e`.
    pub fn eval(&self, r: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, a)| a * r.powf(to_f64(e)))
            .sum()
    }

    /// `ln |p(e^y)|`, stable for large `y`; `-inf` for the zero polynomial.
    pub fn ln_abs_at_log(&self, y: f64) -> f64 {
        let Some(top) = self.max_exponent() else {
            return f64::NEG_INFINITY;
        };
        let top = to_f64(top);
        let scaled: Complex64 = self
            .terms
            .iter()
            .map(|(e, a)| a * ((to_f64(e) - top) * y).exp())
            .sum();
        scaled.norm().ln() + top * y
    }
}

impl fmt::Display for RPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, a)| format!("({a})*r^{}", rational::format(e)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
