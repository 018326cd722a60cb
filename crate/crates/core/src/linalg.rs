//! Small dense integer matrices and integer polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged matrix rows");
            data.extend_from_slice(row.as_ref());
        }
        IMatrix { rows: r, cols: c, data }
    }

    pub fn from_columns(cols: &[Vec<i64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = IMatrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IMatrix {
        let mut t = IMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Product with overflow detection.
    pub fn try_mul(&self, other: &IMatrix) -> Result<IMatrix> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a.checked_mul(other[(k, j)]).ok_or(Error::Overflow("matrix product"))?;
                    let s = &mut out.data[i * other.cols + j];
                    *s = s.checked_add(p).ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, b)| a as f64 * b).sum())
            .collect()
    }

    /// Solves `self · y = b` in floating point by Gaussian elimination with
    /// partial pivoting; `None` when the matrix is numerically singular.
    pub fn solve_f64(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.rows;
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r: Vec<f64> = self.row(i).iter().map(|&x| x as f64).collect();
                r.push(b[i]);
                r
            })
            .collect();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
            if a[p][c].abs() < 1e-300 {
                return None;
            }
            a.swap(c, p);
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * y[k]).sum();
            y[i] = (a[i][n] - s) / a[i][i];
        }
        Some(y)
    }

    pub fn pow(&self, n: u32) -> Result<IMatrix> {
        let mut acc = IMatrix::identity(self.rows);
        for _ in 0..n {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&x| x > 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0)
    }

    pub fn trace(&self) -> i64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// 1-norms of the columns.
    pub fn column_norms(&self) -> Vec<i64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum()).collect()
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<BigInt>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            BigInt::one()
        } else {
            sign * &a[n - 1][n - 1]
        }
    }

    /// Characteristic polynomial det(XI − M), coefficients from the constant term up.
    pub fn charpoly(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let a: Vec<Vec<BigInt>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        // Faddeev–LeVerrier: all divisions are exact for integer matrices.
        let mut mk = vec![vec![BigInt::zero(); n]; n];
        for k in 1..=n {
            let mut next = vec![vec![BigInt::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = BigInt::zero();
                    for l in 0..n {
                        s += &a[i][l] * &mk[l][j];
                    }
                    if i == j {
                        s += &coeffs[n - k + 1];
                    }
                    next[i][j] = s;
                }
            }
            let mut tr = BigInt::zero();
            for i in 0..n {
                for l in 0..n {
                    tr += &a[i][l] * &next[l][i];
                }
            }
            let (q, r) = (-tr).div_rem(&BigInt::from(k));
            debug_assert!(r.is_zero());
            coeffs[n - k] = q;
            mk = next;
        }
        Poly { coeffs }
    }
}

impl std::ops::Index<(usize, usize)> for IMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Mul for &IMatrix {
    type Output = IMatrix;
    /// Panics on overflow; use [`IMatrix::try_mul`] when entries can be large.
    fn mul(self, other: &IMatrix) -> IMatrix {
        self.try_mul(other).expect("integer overflow in matrix product")
    }
}

impl fmt::Debug for IMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl fmt::Display for IMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// Boolean pattern of a product of non-negative matrices, immune to overflow.
pub(crate) fn pattern_mul(a: &[bool], b: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] {
                for j in 0..n {
                    out[i * n + j] |= b[k * n + j];
                }
            }
        }
    }
    out
}

pub(crate) fn pattern(m: &IMatrix) -> Vec<bool> {
    m.data.iter().map(|&x| x != 0).collect()
}

/// True if some power of the non-negative matrix `m` is positive.
pub fn is_primitive(m: &IMatrix) -> bool {
    let n = m.rows();
    if n == 0 || !m.is_nonnegative() {
        return false;
    }
    let p = pattern(m);
    let mut acc = p.clone();
    // Wielandt: primitive iff M^((n-1)^2+1) > 0.
    for _ in 0..(n - 1) * (n - 1) {
        acc = pattern_mul(&acc, &p, n);
    }
    acc.iter().all(|&x| x)
}

const DIVISOR_SEARCH_LIMIT: i64 = 1_000_000;

/// Integer polynomial, coefficients from the constant term up.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn from_i64(c: &[i64]) -> Self {
        let mut p = Poly { coeffs: c.iter().map(|&x| BigInt::from(x)).collect() };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| i64::try_from(c).expect("coefficient fits in i64")).collect()
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_interval(&self, x: Interval) -> Interval {
        let mut acc = Interval::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Interval::from_rational(&BigRational::from_integer(c.clone()));
        }
        acc
    }

    fn small_ends(&self) -> bool {
        let lim = BigInt::from(DIVISOR_SEARCH_LIMIT);
        self.coeffs.iter().filter(|c| !c.is_zero()).all(|c| c.abs() <= lim)
    }

    /// Rational roots, found with the rational root theorem.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut p = self.clone();
        let mut roots = Vec::new();
        // Strip zero roots first.
        while p.coeffs.len() > 1 && p.coeffs[0].is_zero() {
            p.coeffs.remove(0);
            if !roots.iter().any(Zero::is_zero) {
                roots.push(BigRational::zero());
            }
        }
        let a0 = p.coeffs[0].abs();
        let an = p.coeffs[p.degree()].abs();
        if p.degree() == 0 {
            return roots;
        }
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            let n = i64::try_from(n).unwrap_or(i64::MAX).min(DIVISOR_SEARCH_LIMIT);
            (1..=n).filter(|d| n % d == 0).map(BigInt::from).collect()
        };
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for s in [1, -1] {
                    let q = BigRational::new(&num * s, den.clone());
                    if p.eval_rational(&q).is_zero() && !roots.contains(&q) {
                        roots.push(q);
                    }
                }
            }
        }
        roots
    }

    /// Irreducibility over the rationals; conclusive for degree at most three.
    pub fn is_irreducible(&self) -> Option<bool> {
        match self.degree() {
            0 => Some(false),
            1 => Some(true),
            2 | 3 if self.small_ends() => Some(self.rational_roots().is_empty()),
            2 | 3 => None,
            _ => {
                if self.rational_roots().is_empty() {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }

    /// Encloses a real root in `[lo, hi]` when the polynomial changes sign there,
    /// bisecting with exact rational arithmetic until the width is below `tol`.
    pub fn isolate_root(&self, lo: f64, hi: f64, tol: f64) -> Option<(BigRational, BigRational)> {
        let mut a = BigRational::from_float(lo)?;
        let mut b = BigRational::from_float(hi)?;
        let sa = self.eval_rational(&a).signum();
        let sb = self.eval_rational(&b).signum();
        if sa.is_zero() {
            return Some((a.clone(), a));
        }
        if sb.is_zero() {
            return Some((b.clone(), b));
        }
        if sa == sb {
            return None;
        }
        let tol = BigRational::from_float(tol)?;
        let two = BigRational::from_integer(BigInt::from(2));
        while &b - &a > tol {
            let m = (&a + &b) / &two;
            let sm = self.eval_rational(&m).signum();
            if sm.is_zero() {
                return Some((m.clone(), m));
            }
            if sm == sa {
                a = m;
            } else {
                b = m;
            }
        }
        Some((a, b))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !a.is_one() || k == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "X")?,
                _ => write!(f, "X^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Certified spectral data of an integer matrix whose characteristic polynomial
/// has a dominant real root and, in dimension three, a complex conjugate pair.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub charpoly: Poly,
    pub irreducible: Option<bool>,
    /// Rational enclosure of the Perron root.
    pub perron: (BigRational, BigRational),
    /// Enclosure of the modulus of the remaining roots when they form a complex pair.
    pub pair_modulus: Option<Interval>,
    /// Enclosure of the pair's real part.
    pub pair_re: Option<Interval>,
    /// Enclosure of the pair's (positive) imaginary part.
    pub pair_im: Option<Interval>,
}

impl Spectrum {
    pub fn perron_interval(&self) -> Interval {
        let lo = Interval::from_rational(&self.perron.0).lo;
        let hi = Interval::from_rational(&self.perron.1).hi;
        Interval::new(lo, hi)
    }
}

/// Perron root enclosure from the Collatz–Wielandt bounds of a positive vector.
fn collatz_bounds(m: &IMatrix, w: &[f64]) -> (f64, f64) {
    let mw = m.mul_vec_f64(w);
    let ratios: Vec<f64> = mw.iter().zip(w).map(|(a, b)| a / b).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Computes the characteristic polynomial and certified root enclosures.
pub fn spectrum(m: &IMatrix, tol: f64) -> Result<Spectrum> {
    if !is_primitive(m) {
        return Err(Error::NotPrimitive);
    }
    let charpoly = m.charpoly();
    let irreducible = charpoly.is_irreducible();
    // Power iteration gives a positive vector; Collatz–Wielandt brackets the root.
    let n = m.rows();
    let mut w = vec![1.0; n];
    for _ in 0..200 {
        let next = m.mul_vec_f64(&w);
        let s: f64 = next.iter().sum();
        w = next.into_iter().map(|x| x / s).collect();
    }
    let (lo, hi) = collatz_bounds(m, &w);
    let pad = 1e-9 * hi.abs().max(1.0);
    let perron = charpoly
        .isolate_root(lo - pad, hi + pad, tol)
        .ok_or_else(|| Error::input("could not isolate the Perron root"))?;
    let lam = Interval::new(Interval::from_rational(&perron.0).lo, Interval::from_rational(&perron.1).hi);
    let (mut pair_modulus, mut pair_re, mut pair_im) = (None, None, None);
    if charpoly.degree() == 3 {
        // Divide by (X − λ): X^3 + c2 X^2 + c1 X + c0 = (X − λ)(X^2 + p X + q).
        let c: Vec<Interval> = charpoly
            .coeffs
            .iter()
            .map(|x| Interval::from_rational(&BigRational::from_integer(x.clone())))
            .collect();
        let p = c[2] + lam;
        let q = -(c[0]) / lam;
        let disc = p.sqr() - Interval::point(4.0) * q;
        if disc.hi < 0.0 {
            pair_modulus = Some(q.sqrt());
            pair_re = Some(-(p * Interval::point(0.5)));
            pair_im = Some((-disc).sqrt() * Interval::point(0.5));
        }
    }
    Ok(Spectrum { charpoly, irreducible, perron, pair_modulus, pair_re, pair_im })
}
