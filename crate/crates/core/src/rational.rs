//! Exact rational scalars and their text forms.
//!
//! Rationals are arbitrary precision throughout. They are printed as `p/q`
//! (or `p` when the denominator is one) and parsed from `p/q`, integers or
//! finite decimal literals such as `1.25`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// The exact value of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator and denominator: shift both down first.
    let n = r.numer().bits() as i64;
    let d = r.denom().bits() as i64;
    let shift = (n.max(d) - 1000).max(0) as usize;
    let num = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let den = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    num / den
}

/// Parses `p/q`, an integer, or a finite decimal literal.
pub fn parse(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_decimal(p.trim())?;
        let q = parse_decimal(q.trim())?;
        if q.is_zero() {
            return None;
        }
        return Some(p / q);
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    if body.is_empty() {
        return None;
    }
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let v = Rational::new(numer, denom);
    Some(if neg { -v } else { v })
}

pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_vec(v: &[Rational]) -> Vec<String> {
    v.iter().map(format).collect()
}

/// The rational with the smallest denominator in the half-open interval `(lo, hi]`.
///
/// Both bounds must be non-negative and `lo < hi`.
pub fn simplest_in(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "empty interval");
    assert!(!lo.is_negative(), "negative bound");
    // Stern-Brocot descent on continued fractions of the two endpoints.
    let fl = lo.floor();
    if &(fl.clone() + Rational::one()) <= hi {
        return fl + Rational::one();
    }
    // Both bounds share the integer part and the interval contains no integer
    // above lo, so recurse on the reciprocals of the fractional parts.
    let lo_f = lo - &fl;
    let hi_f = hi - &fl;
    if hi_f.is_zero() {
        return hi.clone();
    }
    let inner = if lo_f.is_zero() {
        // (fl, fl + hi_f]: the simplest value is fl + 1/ceil(1/hi_f).
        let inv = hi_f.recip();
        Rational::from_integer(inv.ceil().to_integer())
    } else {
        // Reciprocal flips the interval: [1/hi_f, 1/lo_f).
        let a = hi_f.recip();
        let b = lo_f.recip();
        simplest_in_closed_open(&a, &b)
    };
    fl + inner.recip()
}

// Simplest rational in [lo, hi), lo > 0.
fn simplest_in_closed_open(lo: &Rational, hi: &Rational) -> Rational {
    let cl = lo.ceil();
    if &cl < hi {
        return cl;
    }
    let fl = lo.floor();
    let lo_f = lo - &fl;
    let hi_f = hi - &fl;
    // lo_f > 0 here because lo is not an integer (its ceiling is >= hi).
    let a = hi_f.recip();
    let b = lo_f.recip();
    fl + simplest_in(&a, &b).recip()
}

pub fn gcd_vec(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn lcm_denoms(v: &[Rational]) -> BigInt {
    v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}
