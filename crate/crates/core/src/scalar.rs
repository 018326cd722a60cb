//! Number types that can drive a continued fraction orbit.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::algebraic::Alg;
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Arithmetic needed to step an orbit: subtraction, addition and a comparison
/// that may decline to answer (interval arithmetic).
pub trait OrbitScalar: Clone + fmt::Debug + Send + Sync {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn compare(&self, o: &Self) -> Option<Ordering>;
    fn to_f64(&self) -> f64;
    /// Rescales `v` to 1-norm one (components are assumed non-negative).
    fn normalize(v: &mut [Self]);
    /// Exact equality, where the type supports it.
    fn exact_eq(&self, _o: &Self) -> bool {
        false
    }
    fn is_negative(&self) -> Option<bool>;
}

impl OrbitScalar for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn compare(&self, o: &Self) -> Option<Ordering> {
        self.partial_cmp(o)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn normalize(v: &mut [Self]) {
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
    }
    fn is_negative(&self) -> Option<bool> {
        Some(*self < 0.0)
    }
}

impl OrbitScalar for BigRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn compare(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn normalize(v: &mut [Self]) {
        let s = v.iter().fold(BigRational::zero(), |a, b| a + b);
        if !s.is_zero() {
            v.iter_mut().for_each(|x| *x = &*x / &s);
        }
    }
    fn exact_eq(&self, o: &Self) -> bool {
        self == o
    }
    fn is_negative(&self) -> Option<bool> {
        Some(num_traits::Signed::is_negative(self))
    }
}

impl OrbitScalar for Interval {
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn compare(&self, o: &Self) -> Option<Ordering> {
        Interval::compare(self, o)
    }
    fn to_f64(&self) -> f64 {
        self.mid()
    }
    fn normalize(v: &mut [Self]) {
        let s = v.iter().fold(Interval::ZERO, |a, b| a + *b);
        if s.lo > 0.0 {
            v.iter_mut().for_each(|x| *x = *x / s);
        }
    }
    fn is_negative(&self) -> Option<bool> {
        if self.hi < 0.0 {
            Some(true)
        } else if self.lo >= 0.0 {
            Some(false)
        } else {
            None
        }
    }
}

impl OrbitScalar for Alg {
    fn add(&self, o: &Self) -> Self {
        Alg::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Alg::sub(self, o)
    }
    fn compare(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(o))
    }
    fn to_f64(&self) -> f64 {
        Alg::to_f64(self)
    }
    fn normalize(v: &mut [Self]) {
        let Some(first) = v.first() else { return };
        let s = v.iter().skip(1).fold(first.clone(), |a, b| a.add(b));
        if let Ok(inv) = s.inv() {
            v.iter_mut().for_each(|x| *x = x.mul(&inv));
        }
    }
    fn exact_eq(&self, o: &Self) -> bool {
        self == o
    }
    fn is_negative(&self) -> Option<bool> {
        Some(self.signum() < 0)
    }
}

/// Parses `"3"`, `"-2/7"` or a finite decimal such as `"0.2560057"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::input(format!("invalid number {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let neg = int.starts_with('-');
    let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Parses a comma separated vector of exact numbers.
pub fn parse_vector(s: &str) -> Result<Vec<BigRational>> {
    s.split(',').map(parse_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_numbers() {
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-1.5e1").unwrap(), BigRational::from_integer((-15).into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(parse_vector("1,2/3").unwrap().len(), 2);
    }
}
