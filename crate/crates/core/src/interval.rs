//! Closed real and complex intervals with outward rounding.
//!
//! Every arithmetic result is widened by one ulp on each side, which is enough
//! to absorb the rounding of a single IEEE operation. Comparisons are strict:
//! they answer only when the two intervals are disjoint.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[inline]
fn down(x: f64) -> f64 {
    if x == 0.0 {
        -f64::from_bits(1)
    } else {
        x.next_down()
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x == 0.0 {
        f64::from_bits(1)
    } else {
        x.next_up()
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Builds `[lo, hi]`. Panics if the bounds are reversed or NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Smallest interval guaranteed to contain the real number printed as `x`
    /// in decimal, assuming `x` was the correctly rounded parse.
    pub fn around(x: f64) -> Self {
        Interval { lo: down(x), hi: up(x) }
    }

    /// Encloses an exact rational.
    pub fn from_rational(q: &BigRational) -> Self {
        match q.to_f64() {
            Some(x) if x.is_finite() => {
                if q.is_zero() {
                    Interval::ZERO
                } else {
                    Interval { lo: down(x), hi: up(x) }
                }
            }
            _ => Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY },
        }
    }

    pub fn from_i64(n: i64) -> Self {
        let x = n as f64;
        if x as i64 == n && x.abs() < 9.0e15 {
            Interval::point(x)
        } else {
            Interval::around(x)
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self ⊆ other`.
    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self` lies in the interior of `other`.
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Certain ordering, or `None` when the intervals overlap.
    pub fn compare(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn sqr(self) -> Interval {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.lo >= 0.0 {
            Interval { lo: down(a).max(0.0), hi: up(b) }
        } else if self.hi <= 0.0 {
            Interval { lo: down(b).max(0.0), hi: up(a) }
        } else {
            Interval { lo: 0.0, hi: up(a.max(b)) }
        }
    }

    pub fn sqrt(self) -> Interval {
        let lo = self.lo.max(0.0);
        Interval { lo: down(lo.sqrt()).max(0.0), hi: up(self.hi.max(0.0).sqrt()) }
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval { lo: 0.0, hi: self.hi.max(-self.lo) }
        }
    }

    pub fn recip(self) -> Interval {
        assert!(!self.contains_zero(), "reciprocal of an interval containing zero");
        Interval { lo: down(1.0 / self.hi), hi: up(1.0 / self.lo) }
    }

    pub fn ln(self) -> Interval {
        // ln is correctly rounded to within an ulp on mainstream libms; widen twice.
        Interval { lo: down(down(self.lo.ln())), hi: up(up(self.hi.ln())) }
    }

    pub fn powi(self, n: u32) -> Interval {
        let mut acc = Interval::ONE;
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: down(self.lo + o.lo), hi: up(self.hi + o.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval { lo: down(self.lo - o.hi), hi: up(self.hi - o.lo) }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == 0.0 && hi == 0.0 {
            return Interval::ZERO;
        }
        Interval { lo: down(lo), hi: up(hi) }
    }
}

impl std::ops::Div for Interval {
    type Output = Interval;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Interval) -> Interval {
        self * o.recip()
    }
}

/// Rectangular complex interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub const ZERO: CInterval = CInterval { re: Interval::ZERO, im: Interval::ZERO };
    pub const ONE: CInterval = CInterval { re: Interval::ONE, im: Interval::ZERO };

    pub fn new(re: Interval, im: Interval) -> Self {
        CInterval { re, im }
    }

    pub fn around(re: f64, im: f64) -> Self {
        CInterval { re: Interval::around(re), im: Interval::around(im) }
    }

    pub fn from_real(re: Interval) -> Self {
        CInterval { re, im: Interval::ZERO }
    }

    pub fn norm_sqr(self) -> Interval {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(self) -> Interval {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, k: Interval) -> CInterval {
        CInterval { re: self.re * k, im: self.im * k }
    }

    pub fn powi(self, n: u32) -> CInterval {
        let mut acc = CInterval::ONE;
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    /// True when the rectangles overlap.
    pub fn intersects(&self, other: &CInterval) -> bool {
        self.re.intersects(&other.re) && self.im.intersects(&other.im)
    }

    pub fn mid(&self) -> (f64, f64) {
        (self.re.mid(), self.im.mid())
    }
}

impl Add for CInterval {
    type Output = CInterval;
    fn add(self, o: CInterval) -> CInterval {
        CInterval { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CInterval {
    type Output = CInterval;
    fn sub(self, o: CInterval) -> CInterval {
        CInterval { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for CInterval {
    type Output = CInterval;
    fn neg(self) -> CInterval {
        CInterval { re: -self.re, im: -self.im }
    }
}

impl Mul for CInterval {
    type Output = CInterval;
    fn mul(self, o: CInterval) -> CInterval {
        CInterval {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn arithmetic_contains_exact_results() {
        let a = Interval::around(0.1);
        let b = Interval::around(0.2);
        assert!((a + b).contains(0.30000000000000004));
        assert!((a * b).lo <= 0.02 && 0.02 <= (a * b).hi);
        let c = Interval::new(-1.0, 2.0) * Interval::new(-3.0, 0.5);
        assert!(c.lo <= -6.0 && c.hi >= 3.0);
    }

    #[test]
    fn comparison_is_strict() {
        let a = Interval::new(0.0, 1.0);
        let b = Interval::new(1.0, 2.0);
        assert_eq!(a.compare(&b), None);
        assert_eq!(a.compare(&Interval::new(1.5, 2.0)), Some(Ordering::Less));
        assert_eq!(Interval::point(3.0).compare(&Interval::point(3.0)), Some(Ordering::Equal));
    }

    #[test]
    fn rational_enclosure() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let iv = Interval::from_rational(&third);
        assert!(iv.lo < 1.0 / 3.0 + 1e-17 && iv.hi > 1.0 / 3.0 - 1e-17);
        assert!(iv.width() < 1e-15);
    }

    #[test]
    fn complex_modulus() {
        let z = CInterval::around(3.0, 4.0);
        assert!(z.abs().contains(5.0));
        let w = z * z;
        assert!(w.re.contains(-7.0) && w.im.contains(24.0));
    }
}
