//! Worms of words, the projection `π_x` onto the hyperplane `P = {h = 0}`,
//! lattice coordinates and the torus `P/Λ`.
//!
//! Points of `P` are stored in the basis `e_1 − e_0, …, e_d − e_0` of `Λ`,
//! which amounts to dropping the coordinate of letter 0. Reducing modulo `Λ`
//! is then a componentwise fractional part.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::words::Letter;

/// The staircase of abelianized prefixes of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Worm {
    /// `points[i] = ab(w[..i])`; it has height `h = i`.
    pub points: Vec<Vec<i64>>,
    /// `letters[i]` is the letter read after `points[i]`.
    pub letters: Vec<Letter>,
}

impl Worm {
    pub fn new(word: &[Letter], alphabet_size: usize) -> Self {
        let mut points = Vec::with_capacity(word.len());
        let mut cur = vec![0i64; alphabet_size];
        for &a in word {
            points.push(cur.clone());
            cur[a as usize] += 1;
        }
        Worm { points, letters: word.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points followed by letter `a`.
    pub fn piece(&self, a: Letter) -> impl Iterator<Item = &Vec<i64>> {
        self.points.iter().zip(&self.letters).filter(move |(_, &b)| b == a).map(|(p, _)| p)
    }

    /// CSV with columns `h,x0,…,xd,letter`.
    pub fn to_csv(&self) -> String {
        let d1 = self.points.first().map_or(0, Vec::len);
        let mut s = String::from("h");
        for i in 0..d1 {
            s.push_str(&format!(",x{i}"));
        }
        s.push_str(",letter\n");
        for (p, a) in self.points.iter().zip(&self.letters) {
            let h: i64 = p.iter().sum();
            s.push_str(&h.to_string());
            for c in p {
                s.push_str(&format!(",{c}"));
            }
            s.push_str(&format!(",{a}\n"));
        }
        s
    }
}

/// `h(z)`, the sum of coordinates.
pub fn height<T: Copy + std::iter::Sum<T>>(z: &[T]) -> T {
    z.iter().copied().sum()
}

/// `π_x(z) = z − h(z) v` in lattice coordinates, for `v` of 1-norm one.
pub fn project(v: &[f64], z: &[f64]) -> Vec<f64> {
    let h: f64 = z.iter().sum();
    (1..z.len()).map(|i| z[i] - h * v[i]).collect()
}

pub fn project_int(v: &[f64], z: &[i64]) -> Vec<f64> {
    let h = z.iter().sum::<i64>() as f64;
    (1..z.len()).map(|i| z[i] as f64 - h * v[i]).collect()
}

/// Exact projection of an integer vector.
pub fn project_exact(v: &[BigRational], z: &[i64]) -> Vec<BigRational> {
    let h = BigRational::from_integer(z.iter().sum::<i64>().into());
    (1..z.len()).map(|i| BigRational::from_integer(z[i].into()) - &h * &v[i]).collect()
}

/// Ambient coordinates of a point of `P` given in lattice coordinates.
pub fn ambient(p: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(-p.iter().sum::<f64>());
    out.extend_from_slice(p);
    out
}

/// Ambient 1-norm of a point of `P` given in lattice coordinates.
pub fn norm1(p: &[f64]) -> f64 {
    p.iter().sum::<f64>().abs() + p.iter().map(|x| x.abs()).sum::<f64>()
}

/// Largest `‖π_x(p)‖₁` over the worm of `prefix`.
pub fn projection_radius(prefix: &[Letter], v: &[f64]) -> f64 {
    let worm = Worm::new(prefix, v.len());
    worm.points.iter().map(|z| norm1(&project_int(v, z))).fold(0.0, f64::max)
}

/// Canonical representative in `[0,1)^d` of a point of `P/Λ`.
pub fn torus_reduce(p: &[f64]) -> Vec<f64> {
    p.iter()
        .map(|x| {
            let f = x - x.floor();
            if f >= 1.0 {
                0.0
            } else {
                f
            }
        })
        .collect()
}

pub fn torus_reduce_exact(p: &[BigRational]) -> Vec<BigRational> {
    p.iter()
        .map(|x| {
            let fl = x.numer().div_floor(x.denom());
            x - BigRational::from_integer(fl)
        })
        .collect()
}

/// Tests whether the translates of a worm by a finite window of `Λ` cover
/// each level `ℍ_i`, `i < height`, exactly once on the region the window can
/// reach from every level.
///
/// `window` holds lattice coordinates. Worm points are grouped by level; a
/// level with no point, or with two, shows up as a count other than one.
pub fn tiling_check(worm_points: &[Vec<i64>], window: &[Vec<i64>], height: usize) -> bool {
    let Some(first) = worm_points.first() else { return height == 0 };
    let d = first.len() - 1;
    if window.is_empty() {
        return height == 0;
    }
    let mut levels: Vec<Vec<&Vec<i64>>> = vec![Vec::new(); height];
    for p in worm_points {
        let h: i64 = p.iter().sum();
        if (0..height as i64).contains(&h) {
            levels[h as usize].push(p);
        }
    }
    let lo: Vec<i64> = (0..d).map(|j| window.iter().map(|t| t[j]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..d).map(|j| window.iter().map(|t| t[j]).max().unwrap()).collect();
    // Target region: lattice coordinates reachable from every level's point.
    let mut tlo = vec![i64::MIN; d];
    let mut thi = vec![i64::MAX; d];
    for lvl in &levels {
        for p in lvl {
            for j in 0..d {
                tlo[j] = tlo[j].max(lo[j] + p[j + 1]);
                thi[j] = thi[j].min(hi[j] + p[j + 1]);
            }
        }
    }
    if (0..d).any(|j| tlo[j] > thi[j]) {
        return false;
    }
    for lvl in &levels {
        let mut counts: HashMap<Vec<i64>, u32> = HashMap::new();
        for p in lvl {
            for t in window {
                let z: Vec<i64> = (0..d).map(|j| p[j + 1] + t[j]).collect();
                if (0..d).all(|j| tlo[j] <= z[j] && z[j] <= thi[j]) {
                    *counts.entry(z).or_default() += 1;
                }
            }
        }
        let cells: i64 = (0..d).map(|j| thi[j] - tlo[j] + 1).product();
        if counts.len() as i64 != cells || counts.values().any(|&c| c != 1) {
            return false;
        }
    }
    true
}

/// All lattice vectors with coordinates in `[lo, hi]^d`.
pub fn lattice_box(d: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Exact check that the difference `π_x(e_a) − π_x(e_0)` is a lattice vector.
pub fn exchange_is_lattice(v: &[BigRational]) -> bool {
    let d1 = v.len();
    let e = |a: usize| -> Vec<i64> { (0..d1).map(|i| i64::from(i == a)).collect() };
    let p0 = project_exact(v, &e(0));
    (1..d1).all(|a| {
        let pa = project_exact(v, &e(a));
        pa.iter().zip(&p0).all(|(x, y)| {
            let diff = x - y;
            diff.is_integer() || diff.is_zero()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    fn periodic(w: &str, n: usize) -> Vec<Letter> {
        parse_word(w).unwrap().into_iter().cycle().take(n).collect()
    }

    #[test]
    fn worm_of_periodic_word() {
        let worm = Worm::new(&periodic("01001", 16), 2);
        let first: Vec<Vec<i64>> = vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 1], vec![3, 1], vec![3, 2]];
        assert_eq!(worm.points[..6], first[..]);
        assert_eq!(worm.piece(1).count(), 6);
        for (i, p) in worm.points.iter().enumerate() {
            assert_eq!(p.iter().sum::<i64>(), i as i64);
        }
        assert!(Worm::new(&[], 2).is_empty());
    }

    #[test]
    fn projection_examples() {
        let v = [0.6, 0.4];
        assert!((project(&v, &[1.0, 0.0])[0] + 0.4).abs() < 1e-15);
        assert!(project(&v, &v).iter().all(|x| x.abs() < 1e-15));
        assert_eq!(project(&v, &[1.0, -1.0]), vec![-1.0]);
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(project_exact(&[q(3, 5), q(2, 5)], &[1, 0]), vec![q(-2, 5)]);
        assert!(exchange_is_lattice(&[q(1, 7), q(2, 7), q(4, 7)]));
    }

    #[test]
    fn projection_kills_direction() {
        let v = [0.2, 0.3, 0.5];
        let z = [3.0, -1.0, 2.0];
        let shifted: Vec<f64> = z.iter().zip(&v).map(|(a, b)| a + 2.5 * b).collect();
        let (a, b) = (project(&v, &z), project(&v, &shifted));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn torus_reduction() {
        assert_eq!(torus_reduce(&[3.0, -2.0]), vec![0.0, 0.0]);
        assert_eq!(torus_reduce(&[0.4, -0.25]), vec![0.4, 0.75]);
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(torus_reduce_exact(&[q(-2, 5), q(7, 3)]), vec![q(3, 5), q(1, 3)]);
    }

    #[test]
    fn tiling_of_periodic_worm() {
        let worm = Worm::new(&periodic("01001", 10), 2);
        let window = lattice_box(1, -3, 3);
        assert!(tiling_check(&worm.points, &window, 10));
        assert!(tiling_check(&[], &window, 0));
        let mut dup = worm.points.clone();
        dup[4] = dup[3].clone();
        dup[4][1] += 1;
        dup[4][0] -= 1;
        dup.push(dup[4].clone());
        assert!(!tiling_check(&dup, &window, 10));
        let mut gap = worm.points.clone();
        gap.remove(5);
        assert!(!tiling_check(&gap, &window, 10));
    }

    #[test]
    fn csv_export() {
        let csv = Worm::new(&parse_word("01").unwrap(), 2).to_csv();
        assert_eq!(csv, "h,x0,x1,letter\n0,0,0,0\n1,1,0,1\n");
    }
}
