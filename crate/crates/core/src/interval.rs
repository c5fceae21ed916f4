//! Closed intervals of `f64` with outward rounding.

use std::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(0.0)
    }

    fn outward(lo: f64, hi: f64) -> Self {
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn powi(self, k: u32) -> Self {
        if k == 0 {
            return Interval::point(1.0);
        }
        if k == 1 {
            return self;
        }
        let a = self.lo.powi(k as i32);
        let b = self.hi.powi(k as i32);
        if k % 2 == 1 || self.lo >= 0.0 {
            return Interval::outward(a.min(b), a.max(b));
        }
        if self.hi <= 0.0 {
            return Interval::outward(b, a);
        }
        Interval::new(0.0, a.max(b).next_up())
    }

    /// Range of `x^2` over the interval.
    pub fn square(self) -> Self {
        self.powi(2)
    }

    pub fn scale(self, c: f64) -> Self {
        let a = self.lo * c;
        let b = self.hi * c;
        Interval::outward(a.min(b), a.max(b))
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::outward(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::outward(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::outward(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn even_powers_straddling_zero() {
        let x = Interval::new(-2.0, 1.0);
        let sq = x.square();
        assert_eq!(sq.lo, 0.0);
        assert!(sq.hi >= 4.0);
        let neg = Interval::new(-3.0, -2.0).powi(2);
        assert!(neg.lo <= 4.0 && neg.hi >= 9.0);
    }

    proptest! {
        #[test]
        fn encloses_point_results(a in -10.0f64..10.0, b in -10.0f64..10.0, w in 0.0f64..2.0, k in 0u32..7) {
            let x = Interval::new(a, a + w);
            let y = Interval::new(b, b + w);
            for t in [0.0, 0.3, 1.0] {
                let px = a + t * w;
                let py = b + (1.0 - t) * w;
                let s = x + y;
                prop_assert!(s.lo <= px + py && px + py <= s.hi);
                let d = x - y;
                prop_assert!(d.lo <= px - py && px - py <= d.hi);
                let m = x * y;
                prop_assert!(m.lo <= px * py && px * py <= m.hi);
                let p = x.powi(k);
                let v = px.powi(k as i32);
                prop_assert!(p.lo <= v && v <= p.hi);
            }
        }
    }
}
