//! Extended continued fraction algorithms: Sturmian (additive), Cassaigne,
//! Brun and Arnoux–Rauzy.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebraic::{Alg, NumberField};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::{is_primitive, spectrum, IMatrix};
use crate::scalar::OrbitScalar;
use crate::words::{self, DirectiveSequence, SubstitutionSet, BRUN_PERMUTATIONS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Sturmian,
    Cassaigne,
    Brun,
    ArnouxRauzy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Sturmian, Algorithm::Cassaigne, Algorithm::Brun, Algorithm::ArnouxRauzy];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sturmian => "sturmian",
            Algorithm::Cassaigne => "cassaigne",
            Algorithm::Brun => "brun",
            Algorithm::ArnouxRauzy => "arnoux-rauzy",
        }
    }

    /// Size `d + 1` of the alphabet.
    pub fn alphabet_size(self) -> usize {
        match self {
            Algorithm::Sturmian => 2,
            _ => 3,
        }
    }

    pub fn substitutions(self) -> SubstitutionSet {
        match self {
            Algorithm::Sturmian => words::sturmian(),
            Algorithm::Cassaigne => words::cassaigne(),
            Algorithm::Brun => words::brun(),
            Algorithm::ArnouxRauzy => words::arnoux_rauzy(),
        }
    }

    /// One step `x ↦ M⁻¹x` (not renormalized), with the selected substitution id.
    /// `k` is only used to label errors.
    pub fn step<T: OrbitScalar>(self, x: &[T], k: usize) -> Result<Step<T>> {
        if x.len() != self.alphabet_size() {
            return Err(Error::input(format!(
                "{} expects {} coordinates, got {}",
                self.name(),
                self.alphabet_size(),
                x.len()
            )));
        }
        let cmp = |a: &T, b: &T, what: &str| {
            a.compare(b).ok_or_else(|| Error::Inconclusive { step: k, context: what.to_string() })
        };
        let domain = |reason: &str| Error::Domain { algorithm: self.name().into(), step: k, reason: reason.into() };
        match self {
            Algorithm::Sturmian => {
                let ord = cmp(&x[0], &x[1], "x0 vs x1")?;
                Ok(if ord != Ordering::Less {
                    Step { id: 0, x: vec![x[0].sub(&x[1]), x[1].clone()], tie: ord == Ordering::Equal }
                } else {
                    Step { id: 1, x: vec![x[0].clone(), x[1].sub(&x[0])], tie: false }
                })
            }
            Algorithm::Cassaigne => {
                let ord = cmp(&x[0], &x[2], "x0 vs x2")?;
                Ok(if ord != Ordering::Less {
                    Step { id: 0, x: vec![x[0].sub(&x[2]), x[2].clone(), x[1].clone()], tie: ord == Ordering::Equal }
                } else {
                    Step { id: 1, x: vec![x[1].clone(), x[0].clone(), x[2].sub(&x[0])], tie: false }
                })
            }
            Algorithm::ArnouxRauzy => {
                for i in 0..3 {
                    let others = x[(i + 1) % 3].add(&x[(i + 2) % 3]);
                    if cmp(&x[i], &others, "coordinate vs sum of the others")? == Ordering::Greater {
                        let mut y = x.to_vec();
                        y[i] = x[i].sub(&others);
                        return Ok(Step { id: i, x: y, tie: false });
                    }
                }
                Err(domain("no coordinate exceeds the sum of the others"))
            }
            Algorithm::Brun => {
                // Sort indices by value; equal values put the smaller index higher.
                let mut idx = [0usize, 1, 2];
                let mut tie = false;
                let mut err = None;
                idx.sort_by(|&a, &b| match x[a].compare(&x[b]) {
                    Some(Ordering::Equal) => {
                        tie = true;
                        b.cmp(&a)
                    }
                    Some(o) => o,
                    None => {
                        err = Some(Error::Inconclusive { step: k, context: "Brun ordering".into() });
                        Ordering::Equal
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                let id = BRUN_PERMUTATIONS.iter().position(|p| *p == idx).expect("all permutations listed");
                let (second, largest) = (idx[1], idx[2]);
                let mut y = x.to_vec();
                y[largest] = x[largest].sub(&x[second]);
                Ok(Step { id, x: y, tie })
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sturmian" | "additive" => Ok(Algorithm::Sturmian),
            "cassaigne" => Ok(Algorithm::Cassaigne),
            "brun" => Ok(Algorithm::Brun),
            "arnoux-rauzy" | "arnoux_rauzy" | "ar" => Ok(Algorithm::ArnouxRauzy),
            _ => Err(Error::input(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Result of one algorithm step.
#[derive(Clone, Debug)]
pub struct Step<T> {
    pub id: usize,
    pub x: Vec<T>,
    /// The selection sat on a boundary between two branches.
    pub tie: bool,
}

/// Checks that a direction is non-negative and non-zero, then normalizes it.
pub fn direction<T: OrbitScalar>(mut x: Vec<T>) -> Result<Vec<T>> {
    if x.is_empty() {
        return Err(Error::input("empty direction"));
    }
    for c in &x {
        match c.is_negative() {
            Some(false) => {}
            Some(true) => return Err(Error::input("direction has a negative coordinate")),
            None => return Err(Error::input("direction coordinate has undetermined sign")),
        }
    }
    if x.iter().all(|c| c.compare(&zero_like(c)) == Some(Ordering::Equal)) {
        return Err(Error::input("zero direction"));
    }
    T::normalize(&mut x);
    Ok(x)
}

fn zero_like<T: OrbitScalar>(c: &T) -> T {
    c.sub(c)
}

/// Why an orbit stopped before the requested length.
#[derive(Clone, Debug)]
pub struct OrbitExit {
    pub step: usize,
    pub reason: String,
    pub inconclusive: bool,
}

/// `x^(0), …, x^(n)` together with the selected substitutions.
#[derive(Clone, Debug)]
pub struct OrbitRecord<T> {
    pub algorithm: Algorithm,
    /// Normalized directions; one more than `ids`.
    pub directions: Vec<Vec<T>>,
    pub ids: Vec<usize>,
    /// Steps at which a boundary tie was broken.
    pub ties: Vec<usize>,
    /// Set when `x^(p) = x^(0)` exactly for the smallest such `p`.
    pub period: Option<usize>,
    pub exit: Option<OrbitExit>,
}

impl<T: OrbitScalar> OrbitRecord<T> {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn matrix(&self, k: usize) -> &IMatrix {
        // Matrices are cached in the set; cheap enough to rebuild lazily.
        self.set_ref().get(self.ids[k]).matrix()
    }

    fn set_ref(&self) -> &'static SubstitutionSet {
        static_set(self.algorithm)
    }

    /// `M_{[k,l)}`.
    pub fn partial_product(&self, k: usize, l: usize) -> Result<IMatrix> {
        if k > l || l > self.len() {
            return Err(Error::Range { start: k, end: l, len: self.len() });
        }
        let mut acc = IMatrix::identity(self.algorithm.alphabet_size());
        for i in k..l {
            acc = acc.try_mul(self.matrix(i))?;
        }
        Ok(acc)
    }

    /// The recorded directive prefix, continued periodically when a period was found.
    pub fn directive(&self) -> DirectiveSequence {
        let set = Arc::new(self.algorithm.substitutions());
        match self.period {
            Some(p) => DirectiveSequence::periodic(set, self.ids[..p].to_vec()).unwrap(),
            None => DirectiveSequence::finite(set, self.ids.clone()).unwrap(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.ids.iter().map(|&i| static_set(self.algorithm).get(i).name().to_string()).collect()
    }
}

fn static_set(alg: Algorithm) -> &'static SubstitutionSet {
    use std::sync::OnceLock;
    static SETS: OnceLock<[SubstitutionSet; 4]> = OnceLock::new();
    let sets = SETS.get_or_init(|| Algorithm::ALL.map(Algorithm::substitutions));
    &sets[Algorithm::ALL.iter().position(|&a| a == alg).unwrap()]
}

/// Runs `n` steps of `alg` from `x`. A domain exit after the first step returns
/// the partial orbit with `exit` set; failing at step zero is an error.
pub fn directive_sequence<T: OrbitScalar>(alg: Algorithm, x: Vec<T>, n: usize) -> Result<OrbitRecord<T>> {
    let x = direction(x)?;
    let mut rec = OrbitRecord {
        algorithm: alg,
        directions: vec![x],
        ids: Vec::with_capacity(n),
        ties: Vec::new(),
        period: None,
        exit: None,
    };
    for k in 0..n {
        if let Some(p) = rec.period {
            // Exact return: replay the cycle.
            rec.ids.push(rec.ids[k % p]);
            rec.directions.push(rec.directions[(k + 1) % p].clone());
            if rec.ties.contains(&(k % p)) {
                rec.ties.push(k);
            }
            continue;
        }
        match alg.step(&rec.directions[k], k) {
            Ok(mut s) => {
                T::normalize(&mut s.x);
                if s.tie {
                    rec.ties.push(k);
                }
                rec.ids.push(s.id);
                if s.x.iter().zip(&rec.directions[0]).all(|(a, b)| a.exact_eq(b)) {
                    rec.period = Some(k + 1);
                }
                rec.directions.push(s.x);
            }
            Err(e) if k == 0 => return Err(e),
            Err(e) => {
                let inconclusive = matches!(e, Error::Inconclusive { .. });
                rec.exit = Some(OrbitExit { step: k, reason: e.to_string(), inconclusive });
                break;
            }
        }
    }
    Ok(rec)
}

/// Certified enclosure of the Perron eigendirection of a primitive matrix.
#[derive(Clone, Debug)]
pub struct PerronDirection {
    /// Enclosure of `v` with `‖v‖₁ = 1`.
    pub v: Vec<Interval>,
    /// Enclosure of the Perron root.
    pub lambda: Interval,
    /// Smallest power of the matrix that is positive.
    pub power: u32,
}

/// Encloses the Perron eigendirection of `m` in a box of width at most `precision`.
///
/// With `A = M^k > 0` and a positive estimate `w`, Birkhoff's contraction
/// coefficient `τ(A) < 1` bounds the Hilbert-metric distance from `Aw` to the
/// Perron vector `u` by `τ/(1−τ)·d(w, Aw)`; a bound `δ` on that distance gives
/// `u_i ∈ [x_i e^{−δ}, x_i e^{δ}]` for the normalized `x = Aw`.
pub fn perron_direction(m: &IMatrix, precision: f64) -> Result<PerronDirection> {
    if !is_primitive(m) {
        return Err(Error::NotPrimitive);
    }
    let n = m.rows();
    let spec = spectrum(m, 1e-30)?;
    let mut a = m.clone();
    let mut power = 1u32;
    while !a.is_positive() {
        a = a.try_mul(m)?;
        power += 1;
    }
    let mut w = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let next = m.mul_vec_f64(&w);
        let s: f64 = next.iter().sum();
        w = next.into_iter().map(|x| x / s).collect();
    }
    let ia: Vec<Vec<Interval>> = (0..n).map(|i| (0..n).map(|j| Interval::from_i64(a[(i, j)])).collect()).collect();
    let aw: Vec<Interval> = ia
        .iter()
        .map(|row| row.iter().zip(&w).fold(Interval::ZERO, |acc, (x, &y)| acc + *x * Interval::point(y)))
        .collect();
    // d(w, Aw) ≤ max_i r_i / min_i r_i − 1 with r_i = (Aw)_i / w_i.
    let ratios: Vec<Interval> = aw.iter().zip(&w).map(|(x, &y)| *x / Interval::point(y)).collect();
    let rmax = ratios.iter().map(|r| r.hi).fold(f64::NEG_INFINITY, f64::max);
    let rmin = ratios.iter().map(|r| r.lo).fold(f64::INFINITY, f64::min);
    let dist = Interval::point(rmax) / Interval::point(rmin) - Interval::ONE;
    // φ(A) = min (A_ik A_jl)/(A_jk A_il), τ = (1 − √φ)/(1 + √φ).
    let mut phi = Interval::ONE;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let q = (ia[i][k] * ia[j][l]) / (ia[j][k] * ia[i][l]);
                    if q.lo < phi.lo {
                        phi = q;
                    }
                }
            }
        }
    }
    let sq = phi.sqrt();
    let tau = (Interval::ONE - sq) / (Interval::ONE + sq);
    let delta = (tau / (Interval::ONE - tau) * dist).hi.max(0.0);
    if delta >= 0.5 {
        return Err(Error::Certification("Perron enclosure too loose".into()));
    }
    let s = aw.iter().fold(Interval::ZERO, |acc, x| acc + *x);
    let up = Interval::point(1.0 + delta + delta * delta);
    let down = Interval::point(1.0 - delta);
    let v: Vec<Interval> = aw
        .iter()
        .map(|x| {
            let xi = *x / s;
            Interval::new((xi * down).lo, (xi * up).hi)
        })
        .collect();
    if v.iter().any(|c| c.width() > precision) {
        return Err(Error::Certification(format!("Perron enclosure wider than {precision}")));
    }
    Ok(PerronDirection { v, lambda: spec.perron_interval(), power })
}

/// The Perron eigendirection of `m` with exact coordinates in `Q(λ)`.
pub fn perron_direction_exact(m: &IMatrix) -> Result<(Arc<NumberField>, Vec<Alg>)> {
    let spec = spectrum(m, 1e-20)?;
    if spec.irreducible != Some(true) {
        return Err(Error::input("exact Perron direction needs an irreducible characteristic polynomial"));
    }
    let field = NumberField::new(&spec.charpoly, spec.perron.0.clone(), spec.perron.1.clone())?;
    let lam = field.gen();
    let n = m.rows();
    // Null vector of M − λI by elimination over Q(λ).
    let mut a: Vec<Vec<Alg>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = field.from_i64(m[(i, j)]);
                    if i == j {
                        e.sub(&lam)
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][col].inv()?;
        for j in 0..n {
            a[row][j] = a[row][j].mul(&inv);
        }
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = f.mul(&a[row][j]);
                    a[r][j] = a[r][j].sub(&t);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free = (0..n).find(|c| !pivots.contains(c)).ok_or_else(|| Error::input("λ is not an eigenvalue"))?;
    let mut v = vec![field.from_i64(0); n];
    v[free] = field.from_i64(1);
    for (r, &c) in pivots.iter().enumerate() {
        v[c] = a[r][free].neg();
    }
    Alg::normalize(&mut v);
    Ok((field, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_vector;
    use num_rational::BigRational;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    fn proj(v: &[BigRational]) -> Vec<BigRational> {
        direction(v.to_vec()).unwrap()
    }

    #[test]
    fn cassaigne_steps() {
        let s = Algorithm::Cassaigne.step(&q(&[3, 1, 2]), 0).unwrap();
        assert_eq!((s.id, s.x), (0, q(&[1, 2, 1])));
        let s = Algorithm::Cassaigne.step(&q(&[1, 2, 3]), 0).unwrap();
        assert_eq!((s.id, s.x), (1, q(&[2, 1, 2])));
        let s = Algorithm::Cassaigne.step(&q(&[2, 1, 2]), 0).unwrap();
        assert!(s.tie && s.id == 0);
    }

    #[test]
    fn sturmian_step() {
        let s = Algorithm::Sturmian.step(&q(&[5, 3]), 0).unwrap();
        assert_eq!((s.id, s.x), (0, q(&[2, 3])));
    }

    #[test]
    fn arnoux_rauzy_domain() {
        let e = directive_sequence(Algorithm::ArnouxRauzy, q(&[1, 1, 1]), 3).unwrap_err();
        assert!(matches!(e, Error::Domain { step: 0, .. }));
        let rec = directive_sequence(Algorithm::ArnouxRauzy, q(&[5, 1, 1]), 10).unwrap();
        // (5,1,1) -> (3,1,1) -> (1,1,1), which leaves the domain.
        assert_eq!(rec.ids, vec![0, 0]);
        assert_eq!(rec.exit.as_ref().unwrap().step, 2);
    }

    #[test]
    fn brun_orbit_by_hand() {
        let x = parse_vector("0.2,0.3,0.5").unwrap();
        let rec = directive_sequence(Algorithm::Brun, x, 10).unwrap();
        // (2,3,5) -> (2,3,2) -> (2,1,2)* -> ...; check the rule directly.
        let mut y = q(&[2, 3, 5]);
        for k in 0..rec.len() {
            let mut idx = [0usize, 1, 2];
            idx.sort_by(|&a, &b| y[a].cmp(&y[b]).then(b.cmp(&a)));
            let (s, l) = (idx[1], idx[2]);
            y[l] = &y[l] - &y[s];
            assert_eq!(proj(&y), rec.directions[k + 1], "step {k}");
            assert!(rec.directions[k + 1].iter().all(|c| !num_traits::Signed::is_negative(c)));
        }
    }

    #[test]
    fn reconstruction_is_exact() {
        let x = q(&[7, 11, 13]);
        let rec = directive_sequence(Algorithm::Cassaigne, x.clone(), 12).unwrap();
        for n in 0..=rec.len() {
            let m = rec.partial_product(0, n).unwrap();
            let back: Vec<BigRational> = (0..3)
                .map(|i| (0..3).map(|j| BigRational::from_integer(m[(i, j)].into()) * &rec.directions[n][j]).sum())
                .collect();
            assert_eq!(proj(&back), proj(&x));
        }
    }

    #[test]
    fn partial_products() {
        let st = directive_sequence(Algorithm::Sturmian, q(&[3, 2]), 2).unwrap();
        assert_eq!(st.ids, vec![0, 1]);
        assert_eq!(st.partial_product(0, 2).unwrap().to_rows(), vec![vec![2, 1], vec![1, 1]]);
        assert_eq!(st.partial_product(1, 1).unwrap(), IMatrix::identity(2));
        assert!(st.partial_product(1, 5).is_err());
    }

    #[test]
    fn perron_enclosures() {
        let m = IMatrix::from_rows(&[[1, 1, 0], [0, 1, 1], [1, 0, 0]]);
        let p = perron_direction(&m, 1e-10).unwrap();
        assert!(p.lambda.lo > 1.754 && p.lambda.hi < 1.756);
        assert!(p.v.iter().all(|c| c.width() <= 1e-10));
        let g = perron_direction(&IMatrix::from_rows(&[[2, 1], [1, 1]]), 1e-12).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(g.v[0].contains(phi / (phi + 1.0)) || (g.v[0].mid() - phi / (phi + 1.0)).abs() < 1e-12);
        assert!(matches!(perron_direction(&IMatrix::identity(2), 1e-6), Err(Error::NotPrimitive)));
    }

    #[test]
    fn exact_perron_orbit_is_periodic() {
        let m = IMatrix::from_rows(&[[1, 1, 0], [0, 1, 1], [1, 0, 0]]);
        let (_, v) = perron_direction_exact(&m).unwrap();
        let rec = directive_sequence(Algorithm::Cassaigne, v, 40).unwrap();
        assert_eq!(rec.period, Some(2));
        assert!(rec.ids.chunks(2).all(|c| c == [0, 1]));
    }
}
