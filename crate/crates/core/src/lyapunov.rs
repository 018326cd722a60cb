//! Lyapunov exponents of the matrix cocycle and of its projected version.
//!
//! Both running products are renormalized to unit norm after every step and
//! the logarithm of the scale is accumulated, so `N = 10^6` steps cannot
//! overflow.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{directive_sequence, Algorithm, OrbitRecord};
use crate::error::{Error, Result};
use crate::linalg::IMatrix;
use crate::scalar::OrbitScalar;

/// Renormalized running products `M_{[0,n)}` and `π_x M_{[0,n)}`.
///
/// The projected product is accumulated in factorized form
/// `π_{x^(0)} M_0 π_{x^(1)} M_1 ⋯`, which equals `π_x M_{[0,n)}` because
/// `M_{[0,k)}` maps `v(x^(k))` onto the line of `v(x)`. Each factor kills the
/// expanding direction, so rounding never feeds the dominant exponent back in.
#[derive(Clone, Debug)]
pub struct CocycleAccumulator {
    dim: usize,
    full: Vec<f64>,
    projected: Vec<f64>,
    log_full: f64,
    log_projected: f64,
    steps: usize,
}

impl CocycleAccumulator {
    pub fn new(dim: usize) -> Self {
        let mut id = vec![0.0; dim * dim];
        for i in 0..dim {
            id[i * dim + i] = 1.0;
        }
        CocycleAccumulator {
            dim,
            full: id.clone(),
            projected: id,
            log_full: 0.0,
            log_projected: 0.0,
            steps: 0,
        }
    }

    /// Appends the step `M_k` taken from the direction `v = v(x^(k))`.
    pub fn push(&mut self, m: &IMatrix, v: &[f64]) {
        let d = self.dim;
        let h: f64 = v.iter().sum();
        // P ← P·(I − v·1ᵀ/h(v))
        let mut pv = vec![0.0; d];
        for i in 0..d {
            pv[i] = (0..d).map(|j| self.projected[i * d + j] * v[j]).sum::<f64>() / h;
        }
        for i in 0..d {
            for j in 0..d {
                self.projected[i * d + j] -= pv[i];
            }
        }
        self.projected = mul_int(&self.projected, m, d);
        self.full = mul_int(&self.full, m, d);
        self.log_full += rescale(&mut self.full, d);
        self.log_projected += rescale(&mut self.projected, d);
        self.steps += 1;
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `ln ‖M_{[0,n)}‖₁`.
    pub fn log_norm(&self) -> f64 {
        self.log_full + norm1(&self.full, self.dim).ln()
    }

    /// `ln ‖π_x M_{[0,n)}‖₁`.
    pub fn log_projected_norm(&self) -> f64 {
        self.log_projected + norm1(&self.projected, self.dim).ln()
    }

    pub fn theta1(&self) -> f64 {
        self.log_norm() / self.steps as f64
    }

    pub fn theta2(&self) -> f64 {
        self.log_projected_norm() / self.steps as f64
    }

    /// Log-norm of the projected product of `self` followed by `next`, computed
    /// from the two normalized factors.
    pub fn composed_projected_log_norm(&self, next: &CocycleAccumulator) -> f64 {
        let d = self.dim;
        let mut prod = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                for j in 0..d {
                    prod[i * d + j] += self.projected[i * d + k] * next.projected[k * d + j];
                }
            }
        }
        self.log_projected + next.log_projected + norm1(&prod, d).ln()
    }
}

fn mul_int(a: &[f64], m: &IMatrix, d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * m[(k, j)] as f64;
            }
        }
    }
    out
}

fn norm1(a: &[f64], d: usize) -> f64 {
    (0..d).map(|j| (0..d).map(|i| a[i * d + j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn rescale(a: &mut [f64], d: usize) -> f64 {
    let n = norm1(a, d);
    if n == 0.0 || !n.is_finite() {
        return 0.0;
    }
    a.iter_mut().for_each(|x| *x /= n);
    n.ln()
}

/// Both exponent estimates over `[start, start + n)` of a recorded orbit.
pub fn accumulate<T: OrbitScalar>(rec: &OrbitRecord<T>, start: usize, n: usize) -> Result<CocycleAccumulator> {
    if start + n > rec.len() {
        return Err(match &rec.exit {
            Some(e) => Error::Domain {
                algorithm: rec.algorithm.name().into(),
                step: e.step,
                reason: e.reason.clone(),
            },
            None => Error::Range { start, end: start + n, len: rec.len() },
        });
    }
    let mut acc = CocycleAccumulator::new(rec.algorithm.alphabet_size());
    for k in start..start + n {
        let v: Vec<f64> = rec.directions[k].iter().map(OrbitScalar::to_f64).collect();
        acc.push(rec.matrix(k), &v);
    }
    Ok(acc)
}

fn orbit_accumulator<T: OrbitScalar>(alg: Algorithm, x: Vec<T>, n: usize) -> Result<CocycleAccumulator> {
    if n == 0 {
        return Err(Error::input("at least one step is required"));
    }
    let rec = directive_sequence(alg, x, n)?;
    accumulate(&rec, 0, n)
}

/// `(1/N)·ln ‖M_{[0,N)}‖`.
pub fn theta1_estimate<T: OrbitScalar>(alg: Algorithm, x: Vec<T>, n: usize) -> Result<f64> {
    Ok(orbit_accumulator(alg, x, n)?.theta1())
}

/// `(1/N)·ln ‖π_x M_{[0,N)}‖₁`.
pub fn theta2_estimate<T: OrbitScalar>(alg: Algorithm, x: Vec<T>, n: usize) -> Result<f64> {
    Ok(orbit_accumulator(alg, x, n)?.theta2())
}

/// One Monte-Carlo trial.
#[derive(Clone, Debug, Serialize)]
pub struct Trial {
    pub seed: u64,
    pub steps: usize,
    pub theta1: f64,
    pub theta2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PisotLike,
    NotPisot,
    InsufficientData,
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovReport {
    pub algorithm: Algorithm,
    pub trials: Vec<Trial>,
    /// Trials dropped because the orbit left the domain.
    pub skipped: usize,
    pub theta1_mean: f64,
    pub theta1_std: f64,
    pub theta2_mean: f64,
    pub theta2_std: f64,
    pub verdict: Verdict,
    /// The codimension of the second Oseledets space is assumed, not measured.
    pub note: &'static str,
}

impl LyapunovReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,theta1,theta2\n");
        for t in &self.trials {
            s.push_str(&format!("{},{:.12},{:.12}\n", t.seed, t.theta1, t.theta2));
        }
        s
    }
}

/// Uniform sample from the open simplex of dimension `d`.
pub fn uniform_simplex(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Runs `trials` orbits of `n` steps from directions drawn by `sampler`. Trial
/// `i` uses a ChaCha stream seeded with `seed + i`.
pub fn pisot_report<S>(alg: Algorithm, sampler: S, trials: usize, n: usize, seed: u64) -> LyapunovReport
where
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let results: Vec<Option<Trial>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let x = sampler(&mut rng);
            let acc = orbit_accumulator(alg, x, n).ok()?;
            Some(Trial { seed: s, steps: n, theta1: acc.theta1(), theta2: acc.theta2() })
        })
        .collect();
    let skipped = results.iter().filter(|t| t.is_none()).count();
    let mut trials: Vec<Trial> = results.into_iter().flatten().collect();
    trials.sort_by_key(|t| t.seed);
    let (m1, s1) = mean_std(trials.iter().map(|t| t.theta1));
    let (m2, s2) = mean_std(trials.iter().map(|t| t.theta2));
    let verdict = if trials.is_empty() {
        Verdict::InsufficientData
    } else if trials.iter().all(|t| t.theta1 > 0.0 && t.theta2 < 0.0 && t.theta1 >= s1 && -t.theta2 >= s2) {
        Verdict::PisotLike
    } else {
        Verdict::NotPisot
    };
    LyapunovReport {
        algorithm: alg,
        trials,
        skipped,
        theta1_mean: m1,
        theta1_std: s1,
        theta2_mean: m2,
        theta2_std: s2,
        verdict,
        note: "codimension of the second Oseledets space assumed, not measured",
    }
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    let var = if n > 1 { xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::perron_direction_exact;

    fn golden() -> Vec<crate::algebraic::Alg> {
        perron_direction_exact(&IMatrix::from_rows(&[[2, 1], [1, 1]])).unwrap().1
    }

    #[test]
    fn sturmian_golden_rates() {
        let phi_ln = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        let t1 = theta1_estimate(Algorithm::Sturmian, golden(), 2000).unwrap();
        let t2 = theta2_estimate(Algorithm::Sturmian, golden(), 2000).unwrap();
        assert!((t1 - phi_ln).abs() < 1e-3, "{t1}");
        assert!((t1 + t2).abs() < 1e-3, "{t1} {t2}");
    }

    #[test]
    fn cassaigne_perron_rates() {
        let set = crate::words::cassaigne();
        let m = set.get(0).compose(set.get(1)).matrix().clone();
        let (_, v) = perron_direction_exact(&m).unwrap();
        let lambda = 1.754877666246693_f64;
        let t1 = theta1_estimate(Algorithm::Cassaigne, v.clone(), 2000).unwrap();
        assert!((t1 - 0.5 * lambda.ln()).abs() < 1e-3, "{t1}");
        let t2 = theta2_estimate(Algorithm::Cassaigne, v, 2000).unwrap();
        assert!((t2 + 0.25 * lambda.ln()).abs() < 1e-3, "{t2}");
    }

    #[test]
    fn cocycle_split() {
        let x = vec![0.3, 0.2, 0.5_f64.sqrt()];
        let rec = directive_sequence(Algorithm::Cassaigne, x, 3000).unwrap();
        let whole = accumulate(&rec, 0, 3000).unwrap();
        for split in [1, 700, 2999] {
            let a = accumulate(&rec, 0, split).unwrap();
            let b = accumulate(&rec, split, 3000 - split).unwrap();
            let c = a.composed_projected_log_norm(&b);
            assert!((c - whole.log_projected_norm()).abs() < 1e-9 * 3000.0);
        }
    }

    #[test]
    fn empty_report() {
        let r = pisot_report(Algorithm::Cassaigne, |r| uniform_simplex(r, 3), 0, 10, 1);
        assert_eq!(r.verdict, Verdict::InsufficientData);
        assert!(r.trials.is_empty());
    }

    #[test]
    fn deterministic() {
        let a = pisot_report(Algorithm::Brun, |r| uniform_simplex(r, 3), 4, 5000, 9);
        let b = pisot_report(Algorithm::Brun, |r| uniform_simplex(r, 3), 4, 5000, 9);
        assert_eq!(a.to_csv(), b.to_csv());
    }
}
