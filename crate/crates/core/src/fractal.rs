//! Finite-depth Rauzy fractal approximations.
//!
//! The depth-`n` cloud of a directive sequence `s` and direction `x` is the set
//! of projected path sums `Σ_{k<n} π_x(M_{[0,k)} t_k)` over all automaton
//! paths of length `n`, each tagged with its final letter. The true fractal is
//! within `‖π_x M_{[0,n)}‖₁ · D` of the cloud, where `D` bounds the remainder
//! fractal of the shifted sequence.

use rstar::RTree;
use serde::Serialize;

use crate::automaton::PrefixAutomaton;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::seed::{Ball, ComplexEmbedding};
use crate::words::{DirectiveSequence, Letter};
use crate::worms::{norm1, project_int};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// Derived from certified bounding balls.
    Certified,
    /// Empirical radius of the remainder cloud times a safety factor of 2.
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct FractalApprox {
    pub alphabet_size: usize,
    pub depth: usize,
    /// Letter of each point.
    pub letters: Vec<Letter>,
    /// Worm points in ambient integer coordinates.
    pub ints: Vec<Vec<i64>>,
    /// Projections in lattice coordinates.
    pub points: Vec<Vec<f64>>,
    /// The direction, normalized.
    pub v: Vec<f64>,
    /// The shifted direction `v(x^(n))`.
    pub v_shifted: Vec<f64>,
    /// `‖π_x M_{[0,n)}‖₁`.
    pub contraction: f64,
    pub tail_radius: f64,
    pub tail_kind: TailKind,
    /// The point cap was hit and every level past it was thinned.
    pub downsampled: bool,
}

impl FractalApprox {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn piece(&self, a: Letter) -> impl Iterator<Item = &Vec<f64>> {
        self.letters.iter().zip(&self.points).filter(move |(&b, _)| b == a).map(|(_, p)| p)
    }

    /// Number of points per letter.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.alphabet_size];
        for &a in &self.letters {
            c[a as usize] += 1;
        }
        c
    }

    pub fn with_tail(mut self, radius: f64, kind: TailKind) -> Self {
        self.tail_radius = radius;
        self.tail_kind = kind;
        self
    }

    /// `letter,c1,…,cd` in lattice coordinates.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("letter");
        for i in 1..self.alphabet_size {
            s.push_str(&format!(",c{i}"));
        }
        s.push('\n');
        for (a, p) in self.letters.iter().zip(&self.points) {
            s.push_str(&a.to_string());
            for c in p {
                s.push_str(&format!(",{c}"));
            }
            s.push('\n');
        }
        s
    }

    /// Points in an orthonormal frame of the plane `P`, for plotting.
    pub fn planar(&self) -> Vec<(Letter, [f64; 2])> {
        self.letters.iter().zip(&self.points).map(|(&a, p)| (a, planar(p))).collect()
    }
}

/// Orthonormal coordinates of a point of `P` given in lattice coordinates.
///
/// The frame is `(e_1 − e_0)/√2`, `(2e_2 − e_1 − e_0)/√6`; for one lattice
/// coordinate the second component is zero.
pub fn planar(p: &[f64]) -> [f64; 2] {
    match p.len() {
        0 => [0.0, 0.0],
        1 => [p[0] * std::f64::consts::SQRT_2, 0.0],
        _ => [(2.0 * p[0] + p[1]) / std::f64::consts::SQRT_2, 3.0 * p[1] / 6f64.sqrt()],
    }
}

/// Walks `v` through `M_0^{-1}, …, M_{n-1}^{-1}`, checking that it stays in the
/// positive cone, and returns the normalized `v(x^(k))` for `k ≤ n`.
pub fn shifted_directions(seq: &DirectiveSequence, v: &[f64], n: usize) -> Result<Vec<Vec<f64>>> {
    let mut cur = normalized(v)?;
    let mut out = vec![cur.clone()];
    for k in 0..n {
        let m = seq.get(k).ok_or(Error::Range { start: 0, end: n, len: k })?.matrix();
        let y = m.solve_f64(&cur).ok_or_else(|| Error::input("singular substitution matrix"))?;
        if y.iter().any(|&c| c < -1e-6) {
            return Err(Error::input(format!("direction is not in the cone of the first {} matrices", k + 1)));
        }
        cur = normalized(&y.iter().map(|c| c.max(0.0)).collect::<Vec<_>>())?;
        out.push(cur.clone());
    }
    Ok(out)
}

fn normalized(v: &[f64]) -> Result<Vec<f64>> {
    let s: f64 = v.iter().sum();
    if v.iter().any(|&c| c < 0.0 || !c.is_finite()) || s <= 0.0 {
        return Err(Error::input("direction must be non-negative and non-zero"));
    }
    Ok(v.iter().map(|c| c / s).collect())
}

/// `‖π_x M_{[0,n)}‖₁`, accumulated as `π_{x^(0)} M_0 π_{x^(1)} M_1 ⋯` so the
/// expanding direction never builds up.
pub fn projected_norm(seq: &DirectiveSequence, dirs: &[Vec<f64>], n: usize) -> Result<f64> {
    let d = seq.alphabet_size();
    let mut acc = crate::lyapunov::CocycleAccumulator::new(d);
    for k in 0..n {
        let m = seq.get(k).ok_or(Error::Range { start: 0, end: n, len: k })?.matrix();
        acc.push(m, &dirs[k]);
    }
    Ok(acc.log_projected_norm().exp())
}

/// An integer point with the letter of its piece.
pub type LabeledPoint = (Letter, Vec<i64>);

/// All path sums of length `n` from every starting letter, as ambient integer
/// points. Levels that would exceed `cap` points are thinned by a fixed stride.
pub fn path_cloud(
    aut: &PrefixAutomaton,
    seq: &DirectiveSequence,
    n: usize,
    cap: usize,
) -> Result<(Vec<LabeledPoint>, bool)> {
    let size = aut.alphabet_size();
    let mut cur: Vec<(Letter, Vec<i64>)> = (0..size as Letter).map(|b| (b, vec![0; size])).collect();
    let mut thinned = false;
    for k in (0..n).rev() {
        let id = seq.id(k).ok_or(Error::Range { start: 0, end: n, len: k })?;
        let m = aut.set().get(id).matrix();
        let mut next = Vec::with_capacity(cur.len() * 2);
        for (b, z) in &cur {
            let mut mz = vec![0i64; size];
            for (i, out) in mz.iter_mut().enumerate() {
                for (j, zj) in z.iter().enumerate() {
                    *out = out
                        .checked_add(m[(i, j)].checked_mul(*zj).ok_or(Error::Overflow("path cloud"))?)
                        .ok_or(Error::Overflow("path cloud"))?;
                }
            }
            for tr in aut.out_of(id, *b) {
                let t = &aut.alphabet[tr.t];
                next.push((tr.to, mz.iter().zip(t).map(|(x, y)| x + y).collect()));
            }
        }
        if next.len() > cap {
            let stride = next.len().div_ceil(cap);
            next = next.into_iter().step_by(stride).collect();
            thinned = true;
        }
        cur = next;
    }
    Ok((cur, thinned))
}

/// Depth of the remainder cloud used for the heuristic tail bound.
const REMAINDER_DEPTH: usize = 10;

pub const DEFAULT_CAP: usize = 4_000_000;

/// Depth-`n` approximation with a heuristic tail bound.
pub fn approximate(seq: &DirectiveSequence, v: &[f64], n: usize) -> Result<FractalApprox> {
    approximate_with_cap(seq, v, n, DEFAULT_CAP)
}

pub fn approximate_with_cap(seq: &DirectiveSequence, v: &[f64], n: usize, cap: usize) -> Result<FractalApprox> {
    if v.len() != seq.alphabet_size() {
        return Err(Error::input("direction dimension does not match the alphabet"));
    }
    let aut = PrefixAutomaton::build(seq.set().clone());
    let dirs = shifted_directions(seq, v, n)?;
    let (cloud, downsampled) = path_cloud(&aut, seq, n, cap)?;
    let v0 = dirs[0].clone();
    let vn = dirs[n].clone();
    let contraction = projected_norm(seq, &dirs, n)?;

    // Remainder radius from the shifted sequence, when it is known.
    let rest = seq.shifted(n);
    let m = match rest.known_len() {
        Some(l) => l.min(REMAINDER_DEPTH),
        None => REMAINDER_DEPTH,
    };
    let mut radius = 0.0f64;
    if m > 0 {
        if let Ok((rc, _)) = path_cloud(&aut, &rest, m, 200_000) {
            radius = rc.iter().map(|(_, z)| norm1(&project_int(&vn, z))).fold(0.0, f64::max);
        }
    }
    if radius == 0.0 {
        // One-step scale of the shifted direction.
        radius = (0..v.len())
            .map(|a| {
                let mut e = vec![0i64; v.len()];
                e[a] = 1;
                norm1(&project_int(&vn, &e))
            })
            .fold(0.0, f64::max);
    }
    let (letters, ints): (Vec<Letter>, Vec<Vec<i64>>) = cloud.into_iter().unzip();
    let points = ints.iter().map(|z| project_int(&v0, z)).collect();
    Ok(FractalApprox {
        alphabet_size: v.len(),
        depth: n,
        letters,
        ints,
        points,
        v: v0,
        v_shifted: vn,
        contraction,
        tail_radius: 2.0 * radius * contraction,
        tail_kind: TailKind::Heuristic,
        downsampled,
    })
}

/// Certified tail radius for the periodic sequence of the embedding matrix,
/// read from bounding balls that were certified for it.
///
/// The remainder lies in `β^n O_b` in the complex plane; this is pulled back to
/// lattice coordinates with the operator norm of `φ⁻¹`.
pub fn certified_tail(emb: &ComplexEmbedding, balls: &[Ball], n: usize) -> f64 {
    let extent = balls
        .iter()
        .map(|b| (b.center[0].hypot(b.center[1]) + b.radius) * (1.0 + 1e-12))
        .fold(0.0, f64::max);
    let beta_n = emb.beta.abs().powi(n as u32).hi;
    // Columns of φ on the lattice basis, then the 1-norm bound of the inverse.
    let col = |k: usize| {
        let mut z = vec![0i64; 3];
        z[0] = -1;
        z[k] = 1;
        emb.phi(&z).mid()
    };
    let (c1, c2) = (col(1), col(2));
    let det = c1.0 * c2.1 - c2.0 * c1.1;
    // Inverse of [[c1.re, c2.re], [c1.im, c2.im]] maps (re, im) to lattice coordinates.
    let inv = [[c2.1 / det, -c2.0 / det], [-c1.1 / det, c1.0 / det]];
    // ‖·‖₁ of the ambient vector (−a−b, a, b) is at most 2(|a|+|b|); the
    // complex input has |re|+|im| ≤ √2 |z|.
    let row_max = inv.iter().map(|r| r[0].abs().max(r[1].abs())).sum::<f64>();
    2.0 * std::f64::consts::SQRT_2 * row_max * beta_n * extent * 1.01
}

/// Hausdorff distance between two point sets in the plane.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let ta = RTree::bulk_load(a.to_vec());
    let tb = RTree::bulk_load(b.to_vec());
    let one_sided = |xs: &[[f64; 2]], t: &RTree<[f64; 2]>| {
        xs.iter()
            .map(|p| {
                let q = t.nearest_neighbor(p).expect("non-empty tree");
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max)
    };
    one_sided(a, &tb).max(one_sided(b, &ta))
}

/// Bracket on the Hausdorff distance between the two limit sets.
pub fn hausdorff_estimate(f1: &FractalApprox, f2: &FractalApprox) -> Interval {
    let p1: Vec<[f64; 2]> = f1.points.iter().map(|p| planar(p)).collect();
    let p2: Vec<[f64; 2]> = f2.points.iter().map(|p| planar(p)).collect();
    let h = hausdorff(&p1, &p2);
    let t = f1.tail_radius + f2.tail_radius;
    Interval::new((h - t).max(0.0), h + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::words::cassaigne;

    fn c0c1() -> (DirectiveSequence, Vec<f64>) {
        let seq = DirectiveSequence::periodic(Arc::new(cassaigne()), vec![0, 1]).unwrap();
        let l = 1.754877666246693;
        (seq, vec![l, l * (l - 1.0), 1.0])
    }

    #[test]
    fn depth_zero_is_the_origin() {
        let (seq, v) = c0c1();
        let f = approximate(&seq, &v, 0).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.points.iter().all(|p| p.iter().all(|&c| c == 0.0)));
    }

    #[test]
    fn counts_follow_the_matrix_product() {
        let (seq, v) = c0c1();
        let f = approximate(&seq, &v, 12).unwrap();
        let m = seq.matrix_product(0, 12).unwrap();
        let want: Vec<usize> = (0..3).map(|a| m.row(a).iter().sum::<i64>() as usize).collect();
        assert_eq!(f.counts(), want);
    }

    #[test]
    fn deeper_clouds_stay_within_tail_bounds() {
        let (seq, v) = c0c1();
        let f = approximate(&seq, &v, 10).unwrap();
        let g = approximate(&seq, &v, 14).unwrap();
        assert_eq!(hausdorff_estimate(&f, &g).lo, 0.0);
        let same = hausdorff_estimate(&f, &f);
        assert_eq!(same.lo, 0.0);
        assert!((same.hi - 2.0 * f.tail_radius).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_direction_is_rejected() {
        let (seq, _) = c0c1();
        assert!(approximate(&seq, &[0.9, 0.05, 0.05], 10).is_err());
    }

    #[test]
    fn cloud_points_lie_in_the_certified_balls() {
        let (seq, v) = c0c1();
        let set = cassaigne();
        let sigma = set.get(0).compose(set.get(1));
        let emb = ComplexEmbedding::new(sigma.matrix()).unwrap();
        let balls = [
            Ball { center: [-0.19, -0.15], radius: 0.75 },
            Ball { center: [0.5, -0.6], radius: 0.655 },
            Ball { center: [0.865, 0.123], radius: 0.566 },
        ];
        // Depth 20 in Cassaigne steps is ten levels of c0c1.
        let f = approximate(&seq, &v, 20).unwrap();
        let tail = emb.beta_f64().norm().powi(10) * 1.44;
        for (a, z) in f.letters.iter().zip(&f.ints) {
            let zf: Vec<f64> = z.iter().map(|&c| c as f64).collect();
            let w = emb.phi_f64(&zf);
            let b = balls[*a as usize];
            let dist = (w.re - b.center[0]).hypot(w.im - b.center[1]);
            assert!(dist <= b.radius + tail, "{a} {dist}");
        }
        assert!(certified_tail(&emb, &balls, 10) > 0.0);
    }
}
