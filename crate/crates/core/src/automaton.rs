//! The Dumont–Thomas alphabet and the abelianized prefix automaton.
//!
//! There is a transition `a →(t,σ) b` whenever `σ(a) = u b v` with `ab(u) = t`.
//! A path `b_n → ⋯ → b_0 = a` read along a directive sequence (the step into
//! `b_k` uses `s_k`) describes the worm point `Σ_k M_{[0,k)} t_k`.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{abelianize, DirectiveSequence, Letter, Substitution, SubstitutionSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: Letter,
    /// Index into the Dumont–Thomas alphabet.
    pub t: usize,
    pub sub: usize,
    pub to: Letter,
}

#[derive(Clone, Debug)]
pub struct PrefixAutomaton {
    set: Arc<SubstitutionSet>,
    /// The Dumont–Thomas alphabet: abelianized proper prefixes of images.
    pub alphabet: Vec<Vec<i64>>,
    pub transitions: Vec<Transition>,
    /// `into[sub][b]`: transitions under `sub` that end in `b`.
    into: Vec<Vec<Vec<Transition>>>,
    /// `out[sub][a]`: transitions under `sub` that start in `a`.
    out: Vec<Vec<Vec<Transition>>>,
}

impl PrefixAutomaton {
    pub fn build(set: Arc<SubstitutionSet>) -> Self {
        let size = set.alphabet_size();
        let mut alphabet = BTreeSet::new();
        let mut raw = Vec::new();
        for (id, sub) in set.iter().enumerate() {
            for a in 0..size as Letter {
                let img = sub.image(a);
                for (i, &b) in img.iter().enumerate() {
                    let t = abelianize(&img[..i], size);
                    alphabet.insert(t.clone());
                    raw.push((a, t, id, b));
                }
            }
        }
        let alphabet: Vec<Vec<i64>> = alphabet.into_iter().collect();
        let mut into = vec![vec![Vec::new(); size]; set.len()];
        let mut out = vec![vec![Vec::new(); size]; set.len()];
        let transitions: Vec<Transition> = raw
            .into_iter()
            .map(|(from, t, sub, to)| {
                let t = alphabet.binary_search(&t).expect("inserted above");
                let tr = Transition { from, t, sub, to };
                into[sub][to as usize].push(tr);
                out[sub][from as usize].push(tr);
                tr
            })
            .collect();
        PrefixAutomaton { set, alphabet, transitions, into, out }
    }

    pub fn set(&self) -> &Arc<SubstitutionSet> {
        &self.set
    }

    pub fn alphabet_size(&self) -> usize {
        self.set.alphabet_size()
    }

    /// Transitions under substitution `sub` that end in letter `b`.
    pub fn into(&self, sub: usize, b: Letter) -> &[Transition] {
        &self.into[sub][b as usize]
    }

    /// Transitions under substitution `sub` that start in letter `a`.
    pub fn out_of(&self, sub: usize, a: Letter) -> &[Transition] {
        &self.out[sub][a as usize]
    }

    /// Graphviz rendering with edge labels `t,σ`.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", self.set.name);
        let _ = writeln!(s, "  rankdir=LR;");
        for a in 0..self.alphabet_size() {
            let _ = writeln!(s, "  {a} [shape=circle];");
        }
        for tr in &self.transitions {
            let t = &self.alphabet[tr.t];
            let label = if t.iter().all(|&x| x == 0) {
                "0".to_string()
            } else {
                t.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| if c == 1 { format!("e{i}") } else { format!("{c}e{i}") })
                    .collect::<Vec<_>>()
                    .join("+")
            };
            let _ = writeln!(
                s,
                "  {} -> {} [label=\"{},{}\"];",
                tr.from,
                tr.to,
                label,
                self.set.get(tr.sub).name()
            );
        }
        s.push_str("}\n");
        s
    }

    /// Number of paths `b → ⋯ → a` of length `l − k` read along `s_k, …, s_{l−1}`.
    /// It always equals the entry `(M_{[k,l)})_{a,b}`.
    pub fn path_count(&self, seq: &DirectiveSequence, k: usize, l: usize, a: Letter, b: Letter) -> Result<u128> {
        if k > l {
            return Err(Error::Range { start: k, end: l, len: seq.known_len().unwrap_or(usize::MAX) });
        }
        let size = self.alphabet_size();
        let mut counts = vec![0u128; size];
        counts[a as usize] = 1;
        for j in k..l {
            let id = seq.id(j).ok_or(Error::Range { start: k, end: l, len: j })?;
            let mut next = vec![0u128; size];
            for (dst, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for tr in self.into(id, dst as Letter) {
                    next[tr.from as usize] += c;
                }
            }
            counts = next;
        }
        Ok(counts[b as usize])
    }
}

/// Worm points produced by all paths of length `n` that start in one of the
/// `start` letters, as `(end letter, point)` pairs.
///
/// Points are accumulated by Horner's rule, `t_0 + M_0(t_1 + M_1(⋯))`, from
/// the deepest transition up.
pub fn path_points(
    aut: &PrefixAutomaton,
    seq: &DirectiveSequence,
    n: usize,
    start: &[Letter],
    cap: usize,
) -> Result<Vec<(Letter, Vec<i64>)>> {
    let size = aut.alphabet_size();
    let mut cur: Vec<(Letter, Vec<i64>)> = start.iter().map(|&b| (b, vec![0i64; size])).collect();
    for k in (0..n).rev() {
        let id = seq.id(k).ok_or(Error::Range { start: 0, end: n, len: k })?;
        let m = aut.set.get(id).matrix();
        let mut next = Vec::with_capacity(cur.len() * 2);
        for (b, z) in &cur {
            let mz = m.mul_vec(z);
            for tr in aut.out_of(id, *b) {
                let t = &aut.alphabet[tr.t];
                next.push((tr.to, mz.iter().zip(t).map(|(x, y)| x + y).collect()));
            }
        }
        if next.len() > cap {
            return Err(Error::input(format!("path enumeration exceeds {cap} points at depth {k}")));
        }
        cur = next;
    }
    Ok(cur)
}

/// The part of the worm `W_a(u_0)` reachable by paths of length `n` from the
/// given first letters `b_n` of `u_n`.
pub fn enumerate_worm(
    aut: &PrefixAutomaton,
    seq: &DirectiveSequence,
    a: Letter,
    n: usize,
    start: &[Letter],
) -> Result<BTreeSet<Vec<i64>>> {
    Ok(path_points(aut, seq, n, start, usize::MAX)?
        .into_iter()
        .filter(|(b, _)| *b == a)
        .map(|(_, z)| z)
        .collect())
}

/// Checks `W_a(σ(u)) = ⋃_{b →(t,σ) a} ab(σ) W_b(u) + t` on the worm of the
/// finite word `u`.
pub fn worm_recursion_check(sigma: &Substitution, u: &[Letter]) -> bool {
    let size = sigma.alphabet_size();
    let image = sigma.apply(u);
    let m = sigma.matrix();
    for a in 0..size as Letter {
        let mut lhs = BTreeSet::new();
        let mut cur = vec![0i64; size];
        for &c in &image {
            if c == a {
                lhs.insert(cur.clone());
            }
            cur[c as usize] += 1;
        }
        let mut rhs = BTreeSet::new();
        let mut p = vec![0i64; size];
        for &b in u {
            let mp = m.mul_vec(&p);
            let img = sigma.image(b);
            for (i, &c) in img.iter().enumerate() {
                if c == a {
                    let t = abelianize(&img[..i], size);
                    rhs.insert(mp.iter().zip(&t).map(|(x, y)| x + y).collect::<Vec<_>>());
                }
            }
            p[b as usize] += 1;
        }
        if lhs != rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{cassaigne, parse_word, sturmian, Substitution};
    use crate::worms::Worm;

    #[test]
    fn dumont_thomas_alphabets() {
        let st = PrefixAutomaton::build(Arc::new(sturmian()));
        assert_eq!(st.alphabet, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        let c = PrefixAutomaton::build(Arc::new(cassaigne()));
        assert_eq!(c.alphabet, vec![vec![0, 0, 0], vec![1, 0, 0]]);
        // One transition per letter of each image.
        assert_eq!(c.transitions.len(), 8);
        let id = Substitution::identity(2);
        let a = PrefixAutomaton::build(Arc::new(SubstitutionSet::new("id", vec![id]).unwrap()));
        assert_eq!(a.transitions.len(), 2);
        assert!(a.transitions.iter().all(|t| t.from == t.to && a.alphabet[t.t] == vec![0, 0]));
    }

    #[test]
    fn cassaigne_path_counts() {
        let set = Arc::new(cassaigne());
        let aut = PrefixAutomaton::build(set.clone());
        let s = DirectiveSequence::periodic(set.clone(), vec![0]).unwrap();
        assert_eq!(aut.path_count(&s, 0, 1, 0, 1).unwrap(), 1);
        assert_eq!(aut.path_count(&s, 3, 3, 2, 2).unwrap(), 1);
        assert_eq!(aut.path_count(&s, 3, 3, 2, 1).unwrap(), 0);
        let s = DirectiveSequence::periodic(set, vec![0, 1]).unwrap();
        let m = s.matrix_product(0, 2).unwrap();
        for a in 0..3u8 {
            for b in 0..3u8 {
                assert_eq!(aut.path_count(&s, 0, 2, a, b).unwrap(), m[(a as usize, b as usize)] as u128);
            }
        }
    }

    #[test]
    fn paths_rebuild_the_worm() {
        let set = Arc::new(cassaigne());
        let aut = PrefixAutomaton::build(set.clone());
        let s = DirectiveSequence::parse(set, "c0c1c1c0c1c0c0c1", false).unwrap();
        for b in 0..3u8 {
            let word = s.apply_range(0, 8, &[b], usize::MAX).unwrap();
            let worm = Worm::new(&word, 3);
            let pts = path_points(&aut, &s, 8, &[b], usize::MAX).unwrap();
            assert_eq!(pts.len(), word.len());
            for a in 0..3u8 {
                let expect: BTreeSet<Vec<i64>> = worm.piece(a).cloned().collect();
                assert_eq!(enumerate_worm(&aut, &s, a, 8, &[b]).unwrap(), expect);
            }
        }
        let empty = enumerate_worm(&aut, &s, 1, 0, &[0]).unwrap();
        assert!(empty.is_empty());
        assert_eq!(enumerate_worm(&aut, &s, 0, 0, &[0]).unwrap().len(), 1);
    }

    #[test]
    fn recursion_on_worms() {
        let st = sturmian();
        let u: Vec<Letter> = parse_word("01001").unwrap().into_iter().cycle().take(100).collect();
        assert!(worm_recursion_check(st.get(0), &u));
        assert!(worm_recursion_check(&Substitution::identity(2), &u));
    }

    #[test]
    fn dot_export() {
        let dot = PrefixAutomaton::build(Arc::new(cassaigne())).to_dot();
        assert!(dot.starts_with("digraph \"cassaigne\""));
        assert!(dot.contains("1 -> 2 [label=\"e0,c0\"]"));
    }
}
