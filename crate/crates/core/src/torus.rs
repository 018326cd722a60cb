//! Torus translations, the domain exchange, symbolic codings, bounded
//! remainder sets and the induction/renormalization step of the Cassaigne
//! algorithm.
//!
//! Points of `P` are written in lattice coordinates (drop coordinate 0), so
//! reduction modulo `Λ` is the componentwise fractional part.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rstar::RTree;
use serde::Serialize;

use crate::algebraic::Alg;
use crate::automaton::PrefixAutomaton;
use crate::error::{Error, Result};
use crate::fractal::{approximate, hausdorff, planar, shifted_directions, FractalApprox};
use crate::render::{fit_window, render, tile, Overlay, RenderSpec};
use crate::seed::{Ball, ComplexEmbedding};
use crate::words::{DirectiveSequence, Letter, Substitution, Word};
use crate::worms::{norm1, project_int, torus_reduce};

/// The translation `T_x` of `P/Λ` by `π_x(e_0)`.
#[derive(Clone, Debug, Serialize)]
pub struct TorusTranslation {
    pub v: Vec<f64>,
    /// `π_x(e_0)` reduced to `[0,1)^d`.
    pub t: Vec<f64>,
}

impl TorusTranslation {
    pub fn new(v: &[f64]) -> Result<Self> {
        let s: f64 = v.iter().sum();
        if v.len() < 2 || s <= 0.0 || v.iter().any(|&c| c < 0.0) {
            return Err(Error::input("translation needs a non-negative direction in dimension ≥ 2"));
        }
        let v: Vec<f64> = v.iter().map(|c| c / s).collect();
        let mut e0 = vec![0i64; v.len()];
        e0[0] = 1;
        let t = torus_reduce(&project_int(&v, &e0));
        Ok(TorusTranslation { v, t })
    }

    pub fn translate(&self, p: &[f64]) -> Vec<f64> {
        torus_reduce(&p.iter().zip(&self.t).map(|(a, b)| a + b).collect::<Vec<_>>())
    }

    /// `T^n(p0)` for `n < steps`, computed as `p0 + n·t` to avoid accumulating rounding.
    pub fn orbit(&self, p0: &[f64], steps: usize) -> Vec<Vec<f64>> {
        (0..steps)
            .map(|n| torus_reduce(&p0.iter().zip(&self.t).map(|(a, b)| a + n as f64 * b).collect::<Vec<_>>()))
            .collect()
    }
}

/// Exact scalars for lattice-coordinate arithmetic.
pub trait ExactCoord: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn scale_i64(&self, k: i64) -> Self;
    /// The integer `k` in the same number system as `self`.
    fn int_like(&self, k: i64) -> Self;
    fn fract(&self) -> Self;
    fn same(&self, o: &Self) -> bool;
    fn approx(&self) -> f64;
}

impl ExactCoord for BigRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale_i64(&self, k: i64) -> Self {
        self * BigRational::from_integer(k.into())
    }
    fn int_like(&self, k: i64) -> Self {
        BigRational::from_integer(k.into())
    }
    fn fract(&self) -> Self {
        self - self.floor()
    }
    fn same(&self, o: &Self) -> bool {
        self == o
    }
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl ExactCoord for Alg {
    fn add(&self, o: &Self) -> Self {
        Alg::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Alg::sub(self, o)
    }
    fn scale_i64(&self, k: i64) -> Self {
        Alg::scale_i64(self, k)
    }
    fn int_like(&self, k: i64) -> Self {
        self.field().from_i64(k)
    }
    fn fract(&self) -> Self {
        Alg::fract(self)
    }
    fn same(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }
}

/// `π_x(z)` in lattice coordinates for an exact direction of 1-norm one.
pub fn project_exact_coord<T: ExactCoord>(v: &[T], z: &[i64]) -> Vec<T> {
    let h: i64 = z.iter().sum();
    (1..z.len()).map(|i| v[i].int_like(z[i]).sub(&v[i].scale_i64(h))).collect()
}

fn reduce_exact<T: ExactCoord>(p: &[T]) -> Vec<T> {
    p.iter().map(ExactCoord::fract).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub checked: usize,
    /// First `n` where `π_x(ab(p_{n+1})) ≠ π_x(ab(p_n)) + π_x(e_{u[n]})`.
    pub worm_orbit_failure: Option<usize>,
    /// First `n` where reducing after the exchange differs from translating the reduction.
    pub commuting_failure: Option<usize>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.worm_orbit_failure.is_none() && self.commuting_failure.is_none()
    }
}

/// Checks, exactly, the worm/orbit identity and the commuting square between the
/// domain exchange and the torus translation along the first `n` letters of `u`.
/// Returns the reduced orbit points `T^k(0)` for `k ≤ n` as well.
pub fn exchange_identities<T: ExactCoord>(u: &[Letter], v: &[T], n: usize) -> Result<(IdentityReport, Vec<Vec<T>>)> {
    if u.len() < n {
        return Err(Error::input(format!("word has {} letters, {n} needed", u.len())));
    }
    let d = v.len();
    let basis: Vec<Vec<T>> = (0..d)
        .map(|a| {
            let mut e = vec![0i64; d];
            e[a] = 1;
            project_exact_coord(v, &e)
        })
        .collect();
    let t = reduce_exact(&basis[0]);
    let mut report = IdentityReport { checked: n, worm_orbit_failure: None, commuting_failure: None };
    let mut counts = vec![0i64; d];
    let mut p = project_exact_coord(v, &counts);
    let mut reduced = reduce_exact(&p);
    let mut orbit = vec![reduced.clone()];
    for (k, &a) in u[..n].iter().enumerate() {
        // Domain exchange on the lifted point.
        let exchanged: Vec<T> = p.iter().zip(&basis[a as usize]).map(|(x, y)| x.add(y)).collect();
        counts[a as usize] += 1;
        let next = project_exact_coord(v, &counts);
        if report.worm_orbit_failure.is_none() && !next.iter().zip(&exchanged).all(|(x, y)| x.same(y)) {
            report.worm_orbit_failure = Some(k);
        }
        let translated = reduce_exact(&reduced.iter().zip(&t).map(|(x, y)| x.add(y)).collect::<Vec<_>>());
        let lhs = reduce_exact(&exchanged);
        if report.commuting_failure.is_none() && !lhs.iter().zip(&translated).all(|(x, y)| x.same(y)) {
            report.commuting_failure = Some(k);
        }
        p = next;
        reduced = translated;
        orbit.push(reduced.clone());
    }
    Ok((report, orbit))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certainty {
    Certain,
    Ambiguous,
}

#[derive(Clone, Debug, Serialize)]
pub struct CodedStep {
    pub n: usize,
    pub letter: Letter,
    pub certainty: Certainty,
}

/// Fraction of ambiguous steps.
pub fn ambiguity_rate(steps: &[CodedStep]) -> f64 {
    if steps.is_empty() {
        return 0.0;
    }
    steps.iter().filter(|s| s.certainty == Certainty::Ambiguous).count() as f64 / steps.len() as f64
}

/// Codes torus points against the Rauzy fractal of a periodic sequence `σ^ω`
/// by refining certified bounding disks in the complex plane.
///
/// A node `(a, b, S, m)` stands for the subpiece `S + β^m R_b` of `R_a`, which
/// lies in the disk of center `S + β^m z_b` and radius `|β|^m r_b`. Nodes whose
/// disk misses the point are dropped, the rest are split along the automaton.
/// A point is certain once every surviving node has the same root letter.
pub struct SeedCoder<'a> {
    emb: &'a ComplexEmbedding,
    aut: &'a PrefixAutomaton,
    sub: usize,
    balls: Vec<Ball>,
    pub max_depth: usize,
    beta_pow: Vec<Complex64>,
    beta_abs_pow: Vec<f64>,
    t_phi: Vec<Complex64>,
    extent: f64,
}

const NODE_CAP: usize = 20_000;

impl<'a> SeedCoder<'a> {
    pub fn new(
        emb: &'a ComplexEmbedding,
        aut: &'a PrefixAutomaton,
        sub: usize,
        balls: &[Ball],
        max_depth: usize,
    ) -> Self {
        let beta = emb.beta_f64();
        let beta_pow: Vec<Complex64> = (0..=max_depth as i32 + 1).map(|k| beta.powi(k)).collect();
        let beta_abs_pow = beta_pow.iter().map(|b| b.norm()).collect();
        let t_phi = aut.alphabet.iter().map(|t| emb.phi_f64(&t.iter().map(|&c| c as f64).collect::<Vec<_>>())).collect();
        let extent = balls.iter().map(|b| b.center[0].hypot(b.center[1]) + b.radius).fold(0.0, f64::max);
        SeedCoder { emb, aut, sub, balls: balls.to_vec(), max_depth, beta_pow, beta_abs_pow, t_phi, extent }
    }

    fn inside(&self, w: Complex64, offset: Complex64, b: Letter, m: usize) -> bool {
        let ball = &self.balls[b as usize];
        let c = offset + self.beta_pow[m] * Complex64::new(ball.center[0], ball.center[1]);
        (w - c).norm() <= self.beta_abs_pow[m] * ball.radius * (1.0 + 1e-9) + 1e-12
    }

    /// Letter of the torus point `q` (lattice coordinates).
    pub fn code_point(&self, q: &[f64]) -> Result<(Letter, Certainty)> {
        let d = q.len();
        let mut lifts = Vec::new();
        for i in -3i64..=3 {
            for j in -3i64..=3 {
                let c = [q[0] + i as f64, if d > 1 { q[1] + j as f64 } else { 0.0 }];
                let amb = [-(c[0] + c[1]), c[0], c[1]];
                let w = self.emb.phi_f64(&amb);
                if w.norm() <= self.extent * (1.0 + 1e-9) + 1e-12 {
                    lifts.push(w);
                }
            }
        }
        // (lift, root letter, state, offset)
        let mut nodes: Vec<(usize, Letter, Letter, Complex64)> = Vec::new();
        for (l, &w) in lifts.iter().enumerate() {
            for a in 0..self.balls.len() as Letter {
                if self.inside(w, Complex64::new(0.0, 0.0), a, 0) {
                    nodes.push((l, a, a, Complex64::new(0.0, 0.0)));
                }
            }
        }
        for m in 0..=self.max_depth {
            let Some(first) = nodes.first() else {
                return Err(Error::Coverage(format!("point {q:?} is outside every bounding disk at level {m}")));
            };
            if nodes.iter().all(|n| n.1 == first.1) {
                return Ok((first.1, Certainty::Certain));
            }
            if m == self.max_depth || nodes.len() > NODE_CAP {
                break;
            }
            let mut next = Vec::with_capacity(nodes.len() * 2);
            for &(l, a, b, s) in &nodes {
                for tr in self.aut.into(self.sub, b) {
                    let s2 = s + self.beta_pow[m] * self.t_phi[tr.t];
                    if self.inside(lifts[l], s2, tr.from, m + 1) {
                        next.push((l, a, tr.from, s2));
                    }
                }
            }
            nodes = next;
        }
        // Majority among the survivors.
        let mut votes = vec![0usize; self.balls.len()];
        for n in &nodes {
            votes[n.1 as usize] += 1;
        }
        let best = (0..votes.len()).max_by_key(|&a| (votes[a], std::cmp::Reverse(a))).unwrap_or(0);
        Ok((best as Letter, Certainty::Ambiguous))
    }

    pub fn code_orbit(&self, points: &[Vec<f64>]) -> Result<Vec<CodedStep>> {
        points
            .iter()
            .enumerate()
            .map(|(n, q)| self.code_point(q).map(|(letter, certainty)| CodedStep { n, letter, certainty }))
            .collect()
    }
}

/// Codes torus points against the Rauzy fractal of any directive sequence by
/// refining the path expansion `Σ_k π_x M_{[0,k)} t_k` lazily.
///
/// A node at level `m` with partial sum `z` stands for the points whose
/// expansion starts with the chosen transitions; they lie within
/// `‖π_x M_{[0,m)}‖₁ · ρ_m` of `π_x(z)`, where `ρ_m` is twice the radius of a
/// depth-10 approximation of the shifted fractal. The radii are estimates, so
/// `Certain` means certain relative to them.
pub struct DirectiveCoder {
    aut: PrefixAutomaton,
    seq: DirectiveSequence,
    v: Vec<f64>,
    /// `M_{[0,m)}` for `m ≤ max_depth`.
    prefixes: Vec<crate::linalg::IMatrix>,
    /// Reach of a node at level `m`.
    reach: Vec<f64>,
    pub max_depth: usize,
}

impl DirectiveCoder {
    pub fn new(seq: &DirectiveSequence, v: &[f64], max_depth: usize) -> Result<Self> {
        let aut = PrefixAutomaton::build(seq.set().clone());
        let dirs = shifted_directions(seq, v, max_depth)?;
        let size = seq.alphabet_size();
        let mut prefixes = vec![crate::linalg::IMatrix::identity(size)];
        let mut acc = crate::lyapunov::CocycleAccumulator::new(size);
        let mut reach = Vec::with_capacity(max_depth + 1);
        for m in 0..=max_depth {
            let rest = seq.shifted(m);
            let depth = rest.known_len().map_or(REACH_DEPTH, |l| l.min(REACH_DEPTH));
            let (cloud, _) = crate::fractal::path_cloud(&aut, &rest, depth, 200_000)?;
            let radius = cloud.iter().map(|(_, z)| norm1(&project_int(&dirs[m], z))).fold(0.0, f64::max);
            let scale = if m == 0 { 1.0 } else { acc.log_projected_norm().exp() };
            reach.push(2.0 * radius.max(1.0 / size as f64) * scale);
            if m < max_depth {
                let mk = seq.get(m).ok_or(Error::Range { start: 0, end: max_depth, len: m })?.matrix();
                acc.push(mk, &dirs[m]);
                prefixes.push(prefixes[m].try_mul(mk)?);
            }
        }
        Ok(DirectiveCoder { aut, seq: seq.clone(), v: dirs[0].clone(), prefixes, reach, max_depth })
    }

    /// Letter of the torus point `q` (lattice coordinates).
    pub fn code_point(&self, q: &[f64]) -> Result<(Letter, Certainty)> {
        let d = q.len();
        let span: Vec<Vec<i64>> = crate::worms::lattice_box(d, -3, 3);
        let lifts: Vec<Vec<f64>> = span
            .iter()
            .map(|s| q.iter().zip(s).map(|(a, b)| a + *b as f64).collect::<Vec<f64>>())
            .filter(|p| norm1(p) <= self.reach[0])
            .collect();
        let size = self.aut.alphabet_size();
        // (lift, root letter, state, partial sum)
        let mut nodes: Vec<(usize, Letter, Letter, Vec<i64>)> = Vec::new();
        for l in 0..lifts.len() {
            for a in 0..size as Letter {
                nodes.push((l, a, a, vec![0; size]));
            }
        }
        for m in 0..=self.max_depth {
            let Some(first) = nodes.first() else {
                return Err(Error::Coverage(format!("point {q:?} is outside every piece at level {m}")));
            };
            if nodes.iter().all(|n| n.1 == first.1) {
                return Ok((first.1, Certainty::Certain));
            }
            if m == self.max_depth || nodes.len() > NODE_CAP {
                break;
            }
            let id = self.seq.id(m).ok_or(Error::Range { start: 0, end: self.max_depth, len: m })?;
            let mut next = Vec::with_capacity(nodes.len() * 2);
            for (l, a, b, z) in &nodes {
                for tr in PrefixAutomaton::into(&self.aut, id, *b) {
                    let step = self.prefixes[m].mul_vec(&self.aut.alphabet[tr.t]);
                    let z2: Vec<i64> = z.iter().zip(&step).map(|(x, y)| x + y).collect();
                    let p = project_int(&self.v, &z2);
                    let gap: Vec<f64> = p.iter().zip(&lifts[*l]).map(|(x, y)| x - y).collect();
                    if norm1(&gap) <= self.reach[m + 1] * (1.0 + 1e-9) {
                        next.push((*l, *a, tr.from, z2));
                    }
                }
            }
            nodes = next;
        }
        let mut votes = vec![0usize; size];
        for n in &nodes {
            votes[n.1 as usize] += 1;
        }
        let best = (0..size).max_by_key(|&a| (votes[a], std::cmp::Reverse(a))).unwrap_or(0);
        Ok((best as Letter, Certainty::Ambiguous))
    }

    pub fn code_orbit(&self, points: &[Vec<f64>]) -> Result<Vec<CodedStep>> {
        points
            .iter()
            .enumerate()
            .map(|(n, q)| self.code_point(q).map(|(letter, certainty)| CodedStep { n, letter, certainty }))
            .collect()
    }
}

/// Depth of the approximations that size the nodes of [`DirectiveCoder`].
const REACH_DEPTH: usize = 10;

/// Codes torus points by the nearest point of a finite fractal approximation,
/// considering lattice translates of the cloud.
pub struct CloudCoder {
    trees: Vec<RTree<[f64; 2]>>,
    tail: f64,
    reach: f64,
}

impl CloudCoder {
    pub fn new(f: &FractalApprox) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::Coverage("empty fractal approximation".into()));
        }
        let d = f.alphabet_size - 1;
        let shifts: Vec<Vec<f64>> = match d {
            1 => (-2..=2).map(|i| vec![i as f64]).collect(),
            2 => (-2..=2).flat_map(|i| (-2..=2).map(move |j| vec![i as f64, j as f64])).collect(),
            _ => return Err(Error::input("cloud coding supports one or two lattice coordinates")),
        };
        let mut per: Vec<Vec<[f64; 2]>> = vec![Vec::new(); f.alphabet_size];
        for (a, p) in f.letters.iter().zip(&f.points) {
            for s in &shifts {
                let q: Vec<f64> = p.iter().zip(s).map(|(x, y)| x + y).collect();
                per[*a as usize].push(planar(&q));
            }
        }
        let all: Vec<[f64; 2]> = f.points.iter().map(|p| planar(p)).collect();
        let tree_all = RTree::bulk_load(all.clone());
        // Fill distance of the cloud: largest gap to a nearest neighbour.
        let spacing = all
            .iter()
            .map(|p| {
                tree_all
                    .nearest_neighbor_iter(p)
                    .nth(1)
                    .map(|q| (p[0] - q[0]).hypot(p[1] - q[1]))
                    .unwrap_or(0.0)
            })
            .fold(0.0, f64::max);
        let trees = per.into_iter().map(RTree::bulk_load).collect();
        Ok(CloudCoder { trees, tail: f.tail_radius, reach: f.tail_radius + 2.0 * spacing })
    }

    pub fn code_point(&self, q: &[f64]) -> Result<(Letter, Certainty)> {
        let p = planar(q);
        let dists: Vec<f64> = self
            .trees
            .iter()
            .map(|t| t.nearest_neighbor(&p).map(|r| (p[0] - r[0]).hypot(p[1] - r[1])).unwrap_or(f64::INFINITY))
            .collect();
        let (best, &dbest) =
            dists.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty alphabet");
        if dbest > self.reach {
            return Err(Error::Coverage(format!("point {q:?} is {dbest} away from the cloud")));
        }
        let runner_up = dists.iter().enumerate().filter(|(a, _)| *a != best).map(|(_, d)| *d).fold(f64::INFINITY, f64::min);
        let certainty = if runner_up > dbest + 2.0 * self.tail { Certainty::Certain } else { Certainty::Ambiguous };
        Ok((best as Letter, certainty))
    }

    pub fn code_orbit(&self, points: &[Vec<f64>]) -> Result<Vec<CodedStep>> {
        points
            .iter()
            .enumerate()
            .map(|(n, q)| self.code_point(q).map(|(letter, certainty)| CodedStep { n, letter, certainty }))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    /// `max_{N ≤ N_max} ‖ab(p_N) − N·v‖₁`.
    pub k: f64,
    /// Per-letter maxima of `|ab(p_N)_a − N·v_a|`.
    pub per_letter: Vec<f64>,
    /// Smallest `N` attaining `k`.
    pub argmax: usize,
}

/// Largest deviation of the letter counts of the prefixes of `u` from the
/// frequency vector `v`.
pub fn bounded_remainder_check(u: &[Letter], v: &[f64], n_max: usize) -> Result<Discrepancy> {
    if u.len() < n_max {
        return Err(Error::input(format!("prefix has {} letters, {n_max} needed", u.len())));
    }
    let d = v.len();
    let mut counts = vec![0u64; d];
    let mut out = Discrepancy { k: 0.0, per_letter: vec![0.0; d], argmax: 0 };
    for n in 1..=n_max {
        counts[u[n - 1] as usize] += 1;
        let mut total = 0.0;
        for a in 0..d {
            let dev = (counts[a] as f64 - n as f64 * v[a]).abs();
            out.per_letter[a] = out.per_letter[a].max(dev);
            total += dev;
        }
        if total > out.k {
            out.k = total;
            out.argmax = n;
        }
    }
    Ok(out)
}

/// Exact version of [`bounded_remainder_check`] for rational frequencies.
pub fn bounded_remainder_exact(u: &[Letter], v: &[BigRational], n_max: usize) -> Result<BigRational> {
    if u.len() < n_max {
        return Err(Error::input(format!("prefix has {} letters, {n_max} needed", u.len())));
    }
    let mut counts = vec![0i64; v.len()];
    let mut best = BigRational::zero();
    for n in 1..=n_max {
        counts[u[n - 1] as usize] += 1;
        let nn = BigRational::from_integer((n as i64).into());
        let total = counts
            .iter()
            .zip(v)
            .map(|(&c, va)| (BigRational::from_integer(c.into()) - &nn * va).abs())
            .fold(BigRational::zero(), |a, b| a + b);
        if total > best {
            best = total;
        }
    }
    Ok(best)
}

/// Number of ways to write `w` as a concatenation of `words`, capped at 2.
pub fn factorization_count(w: &[Letter], words: &[Word]) -> u8 {
    let mut ways = vec![0u8; w.len() + 1];
    ways[0] = 1;
    for i in 0..w.len() {
        if ways[i] == 0 {
            continue;
        }
        for x in words {
            if w[i..].starts_with(x) {
                ways[i + x.len()] = (ways[i + x.len()] + ways[i]).min(2);
            }
        }
    }
    ways[w.len()]
}

/// Recovers `u'` from `σ(u')` when the images of `σ` form a code. Trailing
/// letters that do not complete an image are dropped.
pub fn desubstitute(sigma: &Substitution, w: &[Letter]) -> Result<Word> {
    let images = sigma.images();
    let n = w.len();
    // Parse from the right so the longest fully determined prefix is returned.
    let mut reach = vec![false; n + 1];
    let mut end = n;
    loop {
        reach.iter_mut().for_each(|r| *r = false);
        reach[end] = true;
        for i in (0..end).rev() {
            reach[i] = images.iter().any(|x| w[i..end].starts_with(x) && reach[i + x.len()]);
        }
        if reach[0] {
            break;
        }
        if end == 0 {
            return Err(Error::input("word does not start with an image"));
        }
        end -= 1;
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < end {
        let opts: Vec<usize> =
            (0..images.len()).filter(|&a| w[i..end].starts_with(&images[a]) && reach[i + images[a].len()]).collect();
        if opts.len() != 1 {
            return Err(Error::input(format!("ambiguous parse at position {i}")));
        }
        out.push(opts[0] as Letter);
        i += images[opts[0]].len();
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InductionType {
    /// `v_0 < v_2`: induce on `R \ (R_0 + π_x(e_0))`, step `c1`.
    Top,
    /// `v_0 > v_2`: induce on `R \ R_2`, step `c0`.
    Bottom,
}

#[derive(Clone, Debug, Serialize)]
pub struct RenormalizationStep {
    pub kind: InductionType,
    pub substitution: String,
    pub v: Vec<f64>,
    pub v_next: Vec<f64>,
    /// Columns are the lattice coordinates of `π_x(M(e_i − e_0))`.
    pub n_matrix: Vec<Vec<f64>>,
    pub det_n: f64,
    /// `|det M| / ‖M v'‖₁`.
    pub det_expected: f64,
    /// The induced cloud equals the image of the next cloud point for point.
    pub cloud_match: bool,
    /// Planar Hausdorff distance between the induced cloud and `N·(next cloud)`.
    pub hausdorff: f64,
}

impl RenormalizationStep {
    pub fn det_error(&self) -> f64 {
        (self.det_n.abs() - self.det_expected).abs()
    }
}

/// Worm points of the induced set `U`, as a multiset of integer points.
fn induced_ints(f: &FractalApprox, kind: InductionType) -> Vec<(Letter, Vec<i64>)> {
    let pts: Vec<(Letter, Vec<i64>)> = f.letters.iter().copied().zip(f.ints.iter().cloned()).collect();
    match kind {
        InductionType::Bottom => pts.into_iter().filter(|(a, _)| *a != 2).collect(),
        InductionType::Top => {
            let mut removed: HashMap<Vec<i64>, usize> = HashMap::new();
            for (a, z) in &pts {
                if *a == 0 {
                    let mut z = z.clone();
                    z[0] += 1;
                    *removed.entry(z).or_default() += 1;
                }
            }
            pts.into_iter()
                .filter(|(a, z)| {
                    if *a != 2 {
                        return true;
                    }
                    match removed.get_mut(z) {
                        Some(c) if *c > 0 => {
                            *c -= 1;
                            false
                        }
                        _ => true,
                    }
                })
                .collect()
        }
    }
}

/// One induction step for the Cassaigne algorithm: selects the type from the
/// piece weights `v_0` and `v_2`, builds `N` with `N∘π_{F(x)} = π_x∘M`, and
/// checks that `N` maps the next approximation onto the induced set.
pub fn renormalize(seq: &DirectiveSequence, v: &[f64], f: &FractalApprox) -> Result<(RenormalizationStep, FractalApprox)> {
    if v.len() != 3 || seq.alphabet_size() != 3 {
        return Err(Error::input("renormalization is implemented for the Cassaigne algorithm"));
    }
    if f.depth == 0 {
        return Err(Error::input("renormalization needs an approximation of depth at least 1"));
    }
    let s: f64 = v.iter().sum();
    let v: Vec<f64> = v.iter().map(|c| c / s).collect();
    let kind = match v[0].partial_cmp(&v[2]) {
        Some(std::cmp::Ordering::Greater) => InductionType::Bottom,
        Some(std::cmp::Ordering::Less) => InductionType::Top,
        _ => {
            return Err(Error::Domain {
                algorithm: "cassaigne".into(),
                step: 0,
                reason: "the pieces R_0 and R_2 have equal measure; refusing to branch".into(),
            })
        }
    };
    let sigma = seq.get(0).ok_or(Error::Range { start: 0, end: 1, len: 0 })?;
    let expected = if kind == InductionType::Bottom { "c0" } else { "c1" };
    if sigma.name() != expected {
        return Err(Error::input(format!("directive sequence starts with {} but the weights select {expected}", sigma.name())));
    }
    let m = sigma.matrix();
    let v_next = shifted_directions(seq, &v, 1)?.pop().expect("two directions");
    let cols: Vec<Vec<f64>> = (1..3)
        .map(|i| {
            let mut e = vec![0i64; 3];
            e[i] = 1;
            e[0] = -1;
            project_int(&v, &m.mul_vec(&e))
        })
        .collect();
    let n_matrix = vec![vec![cols[0][0], cols[1][0]], vec![cols[0][1], cols[1][1]]];
    let det_n = n_matrix[0][0] * n_matrix[1][1] - n_matrix[0][1] * n_matrix[1][0];
    let mv: f64 = m.mul_vec_f64(&v_next).iter().map(|x| x.abs()).sum();
    let det_expected = m.det().to_f64().unwrap_or(f64::NAN).abs() / mv;

    let next = approximate(&seq.shifted(1), &v_next, f.depth - 1)?;
    let mut lhs: Vec<Vec<i64>> = induced_ints(f, kind).into_iter().map(|(_, z)| z).collect();
    let mut rhs: Vec<Vec<i64>> = next.ints.iter().map(|z| m.mul_vec(z)).collect();
    lhs.sort();
    rhs.sort();
    let cloud_match = !f.downsampled && lhs == rhs;
    let apply_n = |p: &[f64]| vec![n_matrix[0][0] * p[0] + n_matrix[0][1] * p[1], n_matrix[1][0] * p[0] + n_matrix[1][1] * p[1]];
    let image: Vec<[f64; 2]> = next.points.iter().map(|p| planar(&apply_n(p))).collect();
    let induced: Vec<[f64; 2]> = induced_ints(f, kind).iter().map(|(_, z)| planar(&project_int(&v, z))).collect();
    let step = RenormalizationStep {
        kind,
        substitution: sigma.name().to_string(),
        v,
        v_next,
        n_matrix,
        det_n,
        det_expected,
        cloud_match,
        hausdorff: hausdorff(&induced, &image),
    };
    Ok((step, next))
}

/// Runs `steps` renormalization steps from `v` along the Cassaigne orbit and
/// draws the fractals `R(x), R(F(x)), …` in one row, with the images of their
/// pieces under the domain exchange, `R_a + π(e_a)`, in a second row.
pub fn renormalization_figure(
    seq: &DirectiveSequence,
    v: &[f64],
    depth: usize,
    steps: usize,
    panel: u32,
) -> Result<(Vec<RenormalizationStep>, image::RgbImage)> {
    let mut clouds = vec![approximate(seq, v, depth)?];
    let mut cur_seq = seq.clone();
    let mut cur_v = v.to_vec();
    let mut reports = Vec::new();
    for _ in 0..steps {
        let (step, next) = renormalize(&cur_seq, &cur_v, clouds.last().expect("non-empty"))?;
        cur_v = step.v_next.clone();
        cur_seq = cur_seq.shifted(1);
        reports.push(step);
        clouds.push(next);
    }
    let spec = RenderSpec { width: panel, height: panel, ..RenderSpec::default() };
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for f in &clouds {
        let pieces = f.planar();
        let exchanged: Vec<(Letter, [f64; 2])> = f
            .letters
            .iter()
            .zip(&f.ints)
            .map(|(&a, z)| {
                let mut z = z.clone();
                z[a as usize] += 1;
                (a, planar(&project_int(&f.v, &z)))
            })
            .collect();
        let both: Vec<(Letter, [f64; 2])> = pieces.iter().chain(&exchanged).copied().collect();
        let col_spec = RenderSpec { window: Some(fit_window(&both)), ..spec.clone() };
        top.push(render(&pieces, &col_spec, &Overlay::default())?);
        bottom.push(render(&exchanged, &col_spec, &Overlay::default())?);
    }
    let cols = clouds.len();
    top.extend(bottom);
    Ok((reports, tile(&top, cols, spec.background)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::cf::perron_direction_exact;
    use crate::words::{cassaigne, fixed_point_word, parse_word, sturmian, SubstitutionSet};

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn golden_translation() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let t = TorusTranslation::new(&[phi, 1.0]).unwrap();
        let v1 = 1.0 / (phi + 1.0);
        assert!((t.t[0] - (1.0 - v1)).abs() < 1e-15);
        assert_eq!(t.translate(&[0.0]), t.t);
    }

    #[test]
    fn rational_rotation_returns() {
        let v = [q(3, 5), q(2, 5)];
        let mut p = vec![BigRational::zero()];
        let t = reduce_exact(&project_exact_coord(&v, &[1, 0]));
        for _ in 0..5 {
            p = reduce_exact(&[p[0].clone() + &t[0]]);
        }
        assert_eq!(p[0], BigRational::zero());
    }

    #[test]
    fn identities_for_a_rational_direction() {
        let u: Word = parse_word("01001").unwrap().repeat(20);
        let (rep, orbit) = exchange_identities(&u, &[q(3, 5), q(2, 5)], 100).unwrap();
        assert!(rep.holds());
        assert_eq!(orbit[5][0], BigRational::zero());
    }

    #[test]
    fn identities_for_the_seed_direction() {
        let set = Arc::new(cassaigne());
        let seq = DirectiveSequence::periodic(set.clone(), vec![0, 1]).unwrap();
        let u = fixed_point_word(&seq, 500, 0).unwrap();
        let m = set.get(0).compose(set.get(1)).matrix().clone();
        let (_, v) = perron_direction_exact(&m).unwrap();
        let (rep, _) = exchange_identities(&u, &v, 500).unwrap();
        assert!(rep.holds());
    }

    #[test]
    fn periodic_word_discrepancy() {
        let u: Word = parse_word("01001").unwrap().repeat(10);
        let k = bounded_remainder_exact(&u, &[q(3, 5), q(2, 5)], 50).unwrap();
        let k5 = bounded_remainder_exact(&u, &[q(3, 5), q(2, 5)], 5).unwrap();
        assert_eq!(k, k5);
        assert_eq!(k, q(6, 5));
    }

    #[test]
    fn golden_sturmian_is_one_balanced() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let v = [phi / (phi + 1.0), 1.0 / (phi + 1.0)];
        let seq = DirectiveSequence::periodic(Arc::new(sturmian()), vec![0, 1]).unwrap();
        let u = fixed_point_word(&seq, 10_000, 0).unwrap();
        let d = bounded_remainder_check(&u, &v, 10_000).unwrap();
        assert!(d.per_letter.iter().all(|&k| k <= 1.0 + 1e-9), "{:?}", d.per_letter);
    }

    #[test]
    fn return_words_of_c0() {
        let set = cassaigne();
        let words: Vec<Word> = set.get(0).images().to_vec();
        assert_eq!(words, vec![parse_word("0").unwrap(), parse_word("02").unwrap(), parse_word("1").unwrap()]);
        assert_eq!(factorization_count(&parse_word("0201021").unwrap(), &words), 1);
        assert_eq!(factorization_count(&parse_word("2").unwrap(), &words), 0);
        let u = parse_word("1020").unwrap();
        assert_eq!(desubstitute(set.get(0), &u).unwrap(), parse_word("210").unwrap());
    }

    #[test]
    fn seed_coder_on_short_orbit() {
        let set = cassaigne();
        let sigma = set.get(0).compose(set.get(1));
        let emb = ComplexEmbedding::new(sigma.matrix()).unwrap();
        let aut = PrefixAutomaton::build(Arc::new(SubstitutionSet::new("c0c1", vec![sigma.clone()]).unwrap()));
        let balls = [
            Ball { center: [-0.19, -0.15], radius: 0.75 },
            Ball { center: [0.5, -0.6], radius: 0.655 },
            Ball { center: [0.865, 0.123], radius: 0.566 },
        ];
        let coder = SeedCoder::new(&emb, &aut, 0, &balls, 20);
        let seq = DirectiveSequence::periodic(Arc::new(set.clone()), vec![0, 1]).unwrap();
        let u = fixed_point_word(&seq, 300, 0).unwrap();
        let (_, v) = perron_direction_exact(sigma.matrix()).unwrap();
        let (_, orbit) = exchange_identities(&u, &v, 300).unwrap();
        let pts: Vec<Vec<f64>> = orbit.iter().take(300).map(|p| p.iter().map(|c| c.to_f64()).collect()).collect();
        let coded = coder.code_orbit(&pts).unwrap();
        assert_eq!(coded[0].certainty, Certainty::Certain);
        for s in &coded {
            if s.certainty == Certainty::Certain {
                assert_eq!(s.letter, u[s.n], "step {}", s.n);
            }
        }
        assert!(ambiguity_rate(&coded) < 0.05);
    }

    #[test]
    fn directive_coder_matches_the_fixed_point() {
        let set = Arc::new(cassaigne());
        let v = [0.279291082100669, 0.1294709739854265, 0.5912379439139045];
        let rec = crate::cf::directive_sequence(crate::cf::Algorithm::Cassaigne, v.to_vec(), 100).unwrap();
        let seq = DirectiveSequence::finite(set, rec.ids.clone()).unwrap();
        let u = fixed_point_word(&seq, 500, 0).unwrap();
        let pts = TorusTranslation::new(&v).unwrap().orbit(&[0.0, 0.0], 500);
        let mut rates = Vec::new();
        for depth in [20, 40, 60, 80] {
            let coded = DirectiveCoder::new(&seq, &v, depth).unwrap().code_orbit(&pts).unwrap();
            for s in &coded {
                if s.certainty == Certainty::Certain {
                    assert_eq!(s.letter, u[s.n], "step {}", s.n);
                }
            }
            rates.push(ambiguity_rate(&coded));
        }
        assert!(rates.windows(2).all(|w| w[1] <= w[0]), "{rates:?}");
        assert!(rates[3] < 0.01, "{rates:?}");
    }

    #[test]
    fn renormalization_of_the_seed() {
        let set = Arc::new(cassaigne());
        let seq = DirectiveSequence::periodic(set, vec![0, 1]).unwrap();
        let l = 1.754877666246693;
        let v = [l, l * (l - 1.0), 1.0];
        let f = approximate(&seq, &v, 12).unwrap();
        let (step, next) = renormalize(&seq, &v, &f).unwrap();
        assert_eq!(step.kind, InductionType::Bottom);
        assert!(step.cloud_match);
        assert!(step.det_error() < 1e-10);
        assert!(step.hausdorff < 1e-9);
        let (step2, _) = renormalize(&seq.shifted(1), &step.v_next, &next).unwrap();
        assert_eq!(step2.kind, InductionType::Top);
        assert!(step2.cloud_match);
        assert!(step2.det_error() < 1e-10);
    }

    #[test]
    fn tie_refuses_to_branch() {
        let seq = DirectiveSequence::periodic(Arc::new(cassaigne()), vec![0, 1]).unwrap();
        let v = [0.25, 0.5, 0.25];
        let f = approximate(&DirectiveSequence::finite(Arc::new(cassaigne()), vec![0]).unwrap(), &v, 1).unwrap();
        assert!(matches!(renormalize(&seq, &v, &f), Err(Error::Domain { .. })));
    }
}
