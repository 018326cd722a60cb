//! Complex embedding of the contracting plane and certified bounding balls.
//!
//! For a 3-letter matrix `M` whose characteristic polynomial has a complex
//! pair `β, β̄` inside the unit disk, the left eigenvector `e` with `e·M = β·e`
//! and `e_0 = 1` gives a linear form `φ(z) = e·z` with `φ(Mz) = β φ(z)` and
//! `φ(v) = 0` on the Perron direction. In these coordinates the Rauzy fractal
//! of the periodic sequence `M^ω` is a graph-directed self-similar set, which
//! makes ball inclusions checkable with finitely many disks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::automaton::PrefixAutomaton;
use crate::error::{Error, Result};
use crate::interval::{CInterval, Interval};
use crate::linalg::{spectrum, IMatrix};
use crate::words::Letter;

#[derive(Clone, Debug)]
pub struct ComplexEmbedding {
    pub matrix: IMatrix,
    /// The root of the complex pair with negative imaginary part.
    pub beta: CInterval,
    /// `e` normalized by `e_0 = 1`.
    pub e: Vec<CInterval>,
}

impl ComplexEmbedding {
    pub fn new(m: &IMatrix) -> Result<Self> {
        if m.rows() != 3 {
            return Err(Error::input("complex embedding needs a 3-letter alphabet"));
        }
        let s = spectrum(m, 1e-40)?;
        let (Some(re), Some(im)) = (s.pair_re, s.pair_im) else {
            return Err(Error::input("characteristic polynomial has no complex pair"));
        };
        let beta = CInterval::new(re, -im);
        // Rows of adj(M − βI) are left null vectors of M − βI.
        let b = |i: usize, j: usize| {
            let mij = CInterval::from_real(Interval::from_i64(m[(i, j)]));
            if i == j {
                mij - beta
            } else {
                mij
            }
        };
        let cof = |i: usize, j: usize| {
            let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
            let det = b(r[0], c[0]) * b(r[1], c[1]) - b(r[0], c[1]) * b(r[1], c[0]);
            if (i + j).is_multiple_of(2) {
                det
            } else {
                -det
            }
        };
        let mut e = None;
        for row in 0..3 {
            // adj(B)[row][j] = cofactor(j, row)
            let cand: Vec<CInterval> = (0..3).map(|j| cof(j, row)).collect();
            if cand[0].abs().lo > 1e-6 {
                let inv = recip(cand[0]);
                e = Some(cand.into_iter().map(|c| c * inv).collect::<Vec<_>>());
                break;
            }
        }
        let e = e.ok_or_else(|| Error::input("degenerate left eigenvector"))?;
        let emb = ComplexEmbedding { matrix: m.clone(), beta, e };
        if !emb.equivariance_holds() {
            return Err(Error::Certification("e·M does not enclose β·e".into()));
        }
        Ok(emb)
    }

    /// `e·M` and `β·e` overlap componentwise.
    pub fn equivariance_holds(&self) -> bool {
        (0..3).all(|j| {
            let lhs = (0..3).fold(CInterval::ZERO, |acc, i| {
                acc + self.e[i].scale(Interval::from_i64(self.matrix[(i, j)]))
            });
            lhs.intersects(&(self.beta * self.e[j]))
        })
    }

    pub fn phi(&self, z: &[i64]) -> CInterval {
        z.iter().zip(&self.e).fold(CInterval::ZERO, |acc, (&c, e)| acc + e.scale(Interval::from_i64(c)))
    }

    /// Interval image of a real vector.
    pub fn phi_real(&self, z: &[f64]) -> CInterval {
        z.iter().zip(&self.e).fold(CInterval::ZERO, |acc, (&c, e)| acc + e.scale(Interval::point(c)))
    }

    /// Floating-point `φ`, for plotting and coding.
    pub fn phi_f64(&self, z: &[f64]) -> Complex64 {
        z.iter().zip(&self.e).map(|(&c, e)| self::mid(*e) * c).sum()
    }

    pub fn beta_f64(&self) -> Complex64 {
        mid(self.beta)
    }
}

fn mid(c: CInterval) -> Complex64 {
    let (re, im) = c.mid();
    Complex64::new(re, im)
}

fn recip(c: CInterval) -> CInterval {
    let n = c.norm_sqr().recip();
    CInterval::new(c.re * n, -(c.im * n))
}

/// A closed disk `B(center, radius)` in the complex plane.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Ball {
    /// Real and imaginary parts.
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    fn center_iv(&self) -> CInterval {
        CInterval::around(self.center[0], self.center[1])
    }

    fn radius_iv(&self) -> Interval {
        Interval::around(self.radius)
    }

    pub fn scaled(&self, k: f64) -> Ball {
        Ball { center: self.center, radius: self.radius * k }
    }
}

/// A path that escapes its target ball.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub letter: Letter,
    /// States `b_0 = a, b_1, …, b_n` along the path.
    pub path: Vec<Letter>,
    /// How far the image disk sticks out (upper bound).
    pub deficit: f64,
    /// The interval comparison decided the failure; otherwise it was undecided.
    pub certain: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallCertificate {
    pub balls: Vec<Ball>,
    pub depth: usize,
    /// Certified lower bound on `min r_a − (|c − z_a| + |β|^n r_b)` over all paths.
    pub margin: f64,
    pub paths_checked: usize,
    pub violations: Vec<Violation>,
}

impl BallCertificate {
    pub fn is_certified(&self) -> bool {
        self.violations.is_empty() && (self.depth == 0 || self.margin > 0.0)
    }

    pub fn is_inconclusive(&self) -> bool {
        !self.violations.is_empty() && self.violations.iter().all(|v| !v.certain)
    }
}

/// Checks `β^n O_b + Σ_{k<n} β^k φ(t_k) ⊆ O_a` for every path of length `n`
/// into every letter `a`, the automaton being read with substitution `sub` at
/// every level.
pub fn certify_balls(
    emb: &ComplexEmbedding,
    aut: &PrefixAutomaton,
    sub: usize,
    balls: &[Ball],
    n: usize,
) -> Result<BallCertificate> {
    let size = aut.alphabet_size();
    if balls.len() != size {
        return Err(Error::input(format!("expected {size} balls, got {}", balls.len())));
    }
    if aut.set().get(sub).matrix() != &emb.matrix {
        return Err(Error::input("automaton substitution does not match the embedding matrix"));
    }
    if !emb.beta.abs().certainly_lt(&Interval::ONE) {
        return Err(Error::Certification("|β| is not certainly below 1".into()));
    }
    let beta_pow: Vec<CInterval> = (0..=n as u32).map(|k| emb.beta.powi(k)).collect();
    let beta_n_abs = beta_pow[n].abs();
    let t_phi: Vec<CInterval> = aut.alphabet.iter().map(|t| emb.phi(t)).collect();
    let mut cert = BallCertificate {
        balls: balls.to_vec(),
        depth: n,
        margin: f64::INFINITY,
        paths_checked: 0,
        violations: Vec::new(),
    };
    for a in 0..size as Letter {
        let za = balls[a as usize].center_iv();
        let ra = balls[a as usize].radius_iv();
        // Depth-first over (state, offset, path).
        let mut stack = vec![(a, CInterval::ZERO, vec![a])];
        while let Some((b, offset, path)) = stack.pop() {
            let k = path.len() - 1;
            if k == n && n == 0 {
                // The empty path maps each ball onto itself.
                cert.paths_checked += 1;
                cert.margin = 0.0;
                continue;
            }
            if k == n {
                let zb = balls[b as usize].center_iv();
                let rb = balls[b as usize].radius_iv();
                let reach = (beta_pow[n] * zb + offset - za).abs() + beta_n_abs * rb;
                let slack = ra - reach;
                cert.paths_checked += 1;
                cert.margin = cert.margin.min(slack.lo);
                if !slack.certainly_positive() {
                    cert.violations.push(Violation {
                        letter: a,
                        path,
                        deficit: -slack.lo,
                        certain: slack.hi <= 0.0,
                    });
                }
                continue;
            }
            for tr in aut.into(sub, b) {
                let mut p = path.clone();
                p.push(tr.from);
                stack.push((tr.from, offset + beta_pow[k] * t_phi[tr.t], p));
            }
        }
    }
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedVerdict {
    Certified,
    Failed,
    Inconclusive,
}

/// A nonzero lattice vector whose image is close enough to need the per-ball test.
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalPoint {
    /// Ambient integer coordinates.
    pub t: Vec<i64>,
    pub phi_abs: [f64; 2],
    /// Lower bounds of `|z_a + φ(t)| − r_a`.
    pub slacks: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedReport {
    pub balls: Vec<Ball>,
    pub depth: usize,
    pub margin: f64,
    pub exceptional_lattice_points: Vec<ExceptionalPoint>,
    /// Upper bound of `max_a (r_a + |z_a|)`.
    pub max_extent: f64,
    pub threshold: f64,
    /// Lattice vectors examined (coefficient box in the basis `e_i − e_0`).
    pub lattice_points_checked: usize,
    /// Lower bounds of `|z_a| − r_a` for the letters other than the seed letter.
    pub origin_slacks: Vec<f64>,
    pub verdict: SeedVerdict,
    pub reason: Option<String>,
}

/// Shows that `0` lies in the interior of the piece of `seed_letter`: it avoids
/// the other balls and every nonzero lattice translate of every ball.
pub fn seed_certificate(
    emb: &ComplexEmbedding,
    cert: &BallCertificate,
    seed_letter: Letter,
    threshold: f64,
) -> SeedReport {
    let balls = &cert.balls;
    let mut report = SeedReport {
        balls: balls.clone(),
        depth: cert.depth,
        margin: cert.margin,
        exceptional_lattice_points: Vec::new(),
        max_extent: 0.0,
        threshold,
        lattice_points_checked: 0,
        origin_slacks: Vec::new(),
        verdict: SeedVerdict::Certified,
        reason: None,
    };
    let fail = |r: &mut SeedReport, v: SeedVerdict, why: String| {
        if r.verdict == SeedVerdict::Certified || v == SeedVerdict::Failed && r.verdict != SeedVerdict::Failed {
            r.verdict = v;
            r.reason = Some(why);
        }
    };
    if !cert.is_certified() {
        let v = if cert.is_inconclusive() { SeedVerdict::Inconclusive } else { SeedVerdict::Failed };
        fail(&mut report, v, format!("ball inclusion fails on {} paths", cert.violations.len()));
    }
    let centers: Vec<CInterval> = balls.iter().map(Ball::center_iv).collect();
    let radii: Vec<Interval> = balls.iter().map(Ball::radius_iv).collect();
    for (a, (z, r)) in centers.iter().zip(&radii).enumerate() {
        if a == seed_letter as usize {
            continue;
        }
        let slack = z.abs() - *r;
        report.origin_slacks.push(slack.lo);
        if slack.hi <= 0.0 {
            fail(&mut report, SeedVerdict::Failed, format!("0 lies in ball {a}"));
        } else if slack.lo <= 0.0 {
            fail(&mut report, SeedVerdict::Inconclusive, format!("0 on the boundary of ball {a}"));
        }
    }
    let extent = centers.iter().zip(&radii).map(|(z, r)| z.abs() + *r).fold(Interval::ZERO, |m, x| {
        Interval::new(m.lo.max(x.lo), m.hi.max(x.hi))
    });
    report.max_extent = extent.hi;
    // Coefficient box: |(i, j)| ≤ ‖A⁻¹‖_F · bound where A has columns φ(e_1 − e_0), φ(e_2 − e_0).
    let col = |k: usize| {
        let mut z = vec![0i64; 3];
        z[0] = -1;
        z[k] = 1;
        emb.phi(&z).mid()
    };
    let (c1, c2) = (col(1), col(2));
    let det = c1.0 * c2.1 - c2.0 * c1.1;
    let frob = (c1.0 * c1.0 + c1.1 * c1.1 + c2.0 * c2.0 + c2.1 * c2.1).sqrt() / det.abs();
    let bound = threshold.max(extent.hi) + extent.hi;
    let reach = (1.01 * frob * bound).ceil() as i64 + 1;
    for i in -reach..=reach {
        for j in -reach..=reach {
            if i == 0 && j == 0 {
                continue;
            }
            report.lattice_points_checked += 1;
            let t = vec![-(i + j), i, j];
            let p = emb.phi(&t);
            let norm = p.abs();
            let far = norm.lo > extent.hi;
            let exceptional = norm.lo <= threshold;
            if far && !exceptional {
                continue;
            }
            let slacks: Vec<Interval> = centers.iter().zip(&radii).map(|(z, r)| (*z + p).abs() - *r).collect();
            if exceptional {
                report.exceptional_lattice_points.push(ExceptionalPoint {
                    t: t.clone(),
                    phi_abs: [norm.lo, norm.hi],
                    slacks: slacks.iter().map(|s| s.lo).collect(),
                });
            }
            if far {
                continue;
            }
            for (a, s) in slacks.iter().enumerate() {
                if s.hi <= 0.0 {
                    fail(&mut report, SeedVerdict::Failed, format!("0 lies in ball {a} translated by {t:?}"));
                } else if s.lo <= 0.0 {
                    fail(&mut report, SeedVerdict::Inconclusive, format!("undecided for ball {a} translated by {t:?}"));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::words::{cassaigne, SubstitutionSet};

    pub(crate) fn c0c1_balls() -> Vec<Ball> {
        vec![
            Ball { center: [-0.19, -0.15], radius: 0.75 },
            Ball { center: [0.5, -0.6], radius: 0.655 },
            Ball { center: [0.865, 0.123], radius: 0.566 },
        ]
    }

    fn setup() -> (ComplexEmbedding, PrefixAutomaton) {
        let set = cassaigne();
        let sigma = set.get(0).compose(set.get(1));
        let emb = ComplexEmbedding::new(sigma.matrix()).unwrap();
        let aut = PrefixAutomaton::build(Arc::new(SubstitutionSet::new("c0c1", vec![sigma]).unwrap()));
        (emb, aut)
    }

    #[test]
    fn left_eigenvector_matches_closed_form() {
        let (emb, _) = setup();
        let b = emb.beta_f64();
        assert!(b.im < 0.0);
        let want = [Complex64::new(1.0, 0.0), b * b - b, b - 1.0];
        for (e, w) in emb.e.iter().zip(want) {
            assert!((mid(*e) - w).norm() < 1e-12);
        }
        // φ kills the Perron direction.
        let l = 1.754877666246693;
        let v = [l, l * (l - 1.0), 1.0];
        assert!(emb.phi_f64(&v).norm() < 1e-9);
    }

    #[test]
    fn c0c1_balls_certify_at_depth_eight() {
        let (emb, aut) = setup();
        let cert = certify_balls(&emb, &aut, 0, &c0c1_balls(), 8).unwrap();
        assert!(cert.is_certified(), "{:?}", cert.violations.first());
        assert!((cert.margin - 0.0019073).abs() < 1e-4, "{}", cert.margin);
    }

    #[test]
    fn shrunk_balls_fail() {
        let (emb, aut) = setup();
        let small: Vec<Ball> = c0c1_balls().iter().map(|b| b.scaled(0.5)).collect();
        let cert = certify_balls(&emb, &aut, 0, &small, 8).unwrap();
        assert!(!cert.is_certified());
        assert!(cert.violations.iter().any(|v| v.certain && v.deficit > 0.0));
    }

    #[test]
    fn depth_zero_is_trivial() {
        let (emb, aut) = setup();
        let cert = certify_balls(&emb, &aut, 0, &c0c1_balls(), 0).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.paths_checked, 3);
    }

    #[test]
    fn seed_point_certificate() {
        let (emb, aut) = setup();
        let cert = certify_balls(&emb, &aut, 0, &c0c1_balls(), 8).unwrap();
        let rep = seed_certificate(&emb, &cert, 0, 1.5);
        assert_eq!(rep.verdict, SeedVerdict::Certified, "{:?}", rep.reason);
        let mut ts: Vec<Vec<i64>> = rep.exceptional_lattice_points.iter().map(|p| p.t.clone()).collect();
        ts.sort();
        assert_eq!(ts, vec![vec![0, -1, 1], vec![0, 1, -1]]);
        assert!((rep.max_extent - 1.4397).abs() < 1e-3);
    }

    #[test]
    fn inflated_balls_are_rejected() {
        let (emb, aut) = setup();
        let big: Vec<Ball> = c0c1_balls().iter().map(|b| b.scaled(3.0)).collect();
        let cert = certify_balls(&emb, &aut, 0, &big, 8).unwrap();
        let rep = seed_certificate(&emb, &cert, 0, 1.5);
        assert_ne!(rep.verdict, SeedVerdict::Certified);
    }
}
