//! Factor complexity, balance and letter frequencies of finite prefixes, and
//! primitivity and growth diagnostics of directive sequences.

use num_rational::Ratio;
use serde::Serialize;

use crate::linalg::{pattern, pattern_mul};
use crate::words::{DirectiveSequence, Letter};

/// Number of distinct factors of each length in a finite prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityTable {
    /// `counts[n]` is `p(n)`, starting with `p(0) = 1`.
    pub counts: Vec<usize>,
    pub prefix_length: usize,
    /// Set when the prefix is shorter than fifty times the largest length.
    pub short_prefix: bool,
}

impl ComplexityTable {
    pub fn p(&self, n: usize) -> usize {
        self.counts[n]
    }

    pub fn n_max(&self) -> usize {
        self.counts.len() - 1
    }

    /// CSV with header `n,p(n),prefix_length`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,p(n),prefix_length\n");
        for (n, p) in self.counts.iter().enumerate() {
            s.push_str(&format!("{n},{p},{}\n", self.prefix_length));
        }
        s
    }
}

/// Exact factor counts `p(n)` for `n ≤ n_max`.
///
/// Windows of length `n + 1` are classified by refining the classes of length
/// `n` with the following letter, so each length costs one linear pass.
pub fn complexity(prefix: &[Letter], n_max: usize) -> ComplexityTable {
    let len = prefix.len();
    let alpha = prefix.iter().map(|&a| a as usize + 1).max().unwrap_or(1);
    let mut counts = vec![1usize];
    // class[i] identifies the factor of length n starting at i (for i + n ≤ len).
    let mut class = vec![0u32; len + 1];
    let mut classes = 1usize;
    let mut table: Vec<u32> = Vec::new();
    let mut touched: Vec<usize> = Vec::new();
    for n in 0..n_max {
        if n + 1 > len {
            counts.push(0);
            continue;
        }
        table.resize(classes * alpha, u32::MAX);
        let mut next = 0u32;
        for i in 0..len - n {
            let key = class[i] as usize * alpha + prefix[i + n] as usize;
            if table[key] == u32::MAX {
                table[key] = next;
                touched.push(key);
                next += 1;
            }
            class[i] = table[key];
        }
        for &k in &touched {
            table[k] = u32::MAX;
        }
        touched.clear();
        classes = next as usize;
        counts.push(classes);
    }
    ComplexityTable { counts, prefix_length: len, short_prefix: len < 50 * n_max }
}

/// Maximal imbalance per window length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    /// `per_length[n−1][a]` is `max |v|_a − min |w|_a` over factors of length `n`.
    pub per_length: Vec<Vec<usize>>,
    /// Maximum over all tested lengths, per letter.
    pub per_letter: Vec<usize>,
}

impl BalanceReport {
    /// Smallest `k` for which the prefix is `k`-balanced on the tested lengths.
    pub fn k(&self) -> usize {
        self.per_letter.iter().copied().max().unwrap_or(0)
    }
}

/// Imbalance of letter counts between factors of equal length `1..=n_max`.
pub fn balance_measure(prefix: &[Letter], alphabet_size: usize, n_max: usize) -> BalanceReport {
    let len = prefix.len();
    // cum[a][i] = |prefix[..i]|_a
    let mut cum = vec![vec![0usize; len + 1]; alphabet_size];
    for (i, &b) in prefix.iter().enumerate() {
        for (a, row) in cum.iter_mut().enumerate() {
            row[i + 1] = row[i] + usize::from(b as usize == a);
        }
    }
    let mut per_length = Vec::new();
    let mut per_letter = vec![0; alphabet_size];
    for n in 1..=n_max.min(len) {
        let mut row = Vec::with_capacity(alphabet_size);
        for (a, c) in cum.iter().enumerate() {
            let (mut lo, mut hi) = (usize::MAX, 0);
            for i in 0..=len - n {
                let k = c[i + n] - c[i];
                lo = lo.min(k);
                hi = hi.max(k);
            }
            row.push(hi - lo);
            per_letter[a] = per_letter[a].max(hi - lo);
        }
        per_length.push(row);
    }
    BalanceReport { per_length, per_letter }
}

/// Letter frequencies of a non-empty prefix, as exact fractions.
pub fn frequency(prefix: &[Letter], alphabet_size: usize) -> Vec<Ratio<i64>> {
    assert!(!prefix.is_empty(), "frequency of the empty word");
    let n = prefix.len() as i64;
    let mut counts = vec![0i64; alphabet_size];
    for &a in prefix {
        counts[a as usize] += 1;
    }
    counts.into_iter().map(|c| Ratio::new(c, n)).collect()
}

/// Least `n ≤ horizon` with `M_{[k,n)}` strictly positive.
pub fn is_primitive_window(seq: &DirectiveSequence, k: usize, horizon: usize) -> Option<usize> {
    let d = seq.alphabet_size();
    let mut acc: Vec<bool> = (0..d * d).map(|i| i / d == i % d).collect();
    for n in k..horizon {
        let m = seq.get(n)?.matrix();
        acc = pattern_mul(&acc, &pattern(m), d);
        if acc.iter().all(|&x| x) {
            return Some(n + 1);
        }
    }
    None
}

/// Column norms of `M_{[0,n)}` for `n = 0, …, horizon`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthTrace {
    pub column_norms: Vec<Vec<f64>>,
    /// Letters whose column norm did not move over the second half of the window.
    pub stalled: Vec<Letter>,
}

impl GrowthTrace {
    pub fn flagged(&self) -> bool {
        !self.stalled.is_empty()
    }
}

pub fn is_everywhere_growing_window(seq: &DirectiveSequence, horizon: usize) -> GrowthTrace {
    let d = seq.alphabet_size();
    let mut m: Vec<f64> = (0..d * d).map(|i| f64::from(u8::from(i / d == i % d))).collect();
    let norms_of = |m: &[f64]| (0..d).map(|j| (0..d).map(|i| m[i * d + j]).sum()).collect::<Vec<f64>>();
    let mut column_norms = vec![norms_of(&m)];
    for n in 0..horizon {
        let Some(s) = seq.get(n) else { break };
        let step = s.matrix();
        let mut next = vec![0.0; d * d];
        for i in 0..d {
            for l in 0..d {
                let a = m[i * d + l];
                if a != 0.0 {
                    for j in 0..d {
                        next[i * d + j] += a * step[(l, j)] as f64;
                    }
                }
            }
        }
        m = next;
        column_norms.push(norms_of(&m));
    }
    let half = column_norms.len() / 2;
    let last = column_norms.last().cloned().unwrap_or_default();
    let stalled = (0..d)
        .filter(|&a| column_norms.len() > 2 && column_norms[half][a] == last[a])
        .map(|a| a as Letter)
        .collect();
    GrowthTrace { column_norms, stalled }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{cassaigne, parse_word, sturmian, DirectiveSequence, Substitution, SubstitutionSet};
    use std::collections::HashSet;
    use std::sync::Arc;

    fn brute_complexity(w: &[Letter], n: usize) -> usize {
        if n > w.len() {
            return 0;
        }
        w.windows(n.max(1)).take(if n == 0 { 1 } else { usize::MAX }).map(|f| &f[..n]).collect::<HashSet<_>>().len()
    }

    #[test]
    fn complexity_matches_brute_force() {
        let w = parse_word("0100101001001010010100100101001001").unwrap();
        let t = complexity(&w, 12);
        for n in 0..=12 {
            assert_eq!(t.p(n), brute_complexity(&w, n), "n = {n}");
        }
        assert!(t.short_prefix);
    }

    #[test]
    fn constant_word() {
        let t = complexity(&[0; 500], 9);
        assert!(t.counts.iter().all(|&p| p == 1));
        assert!(t.to_csv().starts_with("n,p(n),prefix_length\n0,1,500\n"));
    }

    #[test]
    fn balance_of_small_words() {
        let r = balance_measure(&parse_word("0011").unwrap(), 2, 2);
        assert_eq!(r.per_length[1][0], 2);
        assert_eq!(r.k(), 2);
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(frequency(&parse_word("01001").unwrap(), 2), vec![Ratio::new(3, 5), Ratio::new(2, 5)]);
        assert_eq!(frequency(&[0], 3), vec![Ratio::from(1), Ratio::from(0), Ratio::from(0)]);
    }

    #[test]
    fn primitivity_windows() {
        let c = Arc::new(cassaigne());
        let s = DirectiveSequence::periodic(c, vec![0, 1]).unwrap();
        let n = is_primitive_window(&s, 0, 10).unwrap();
        assert!(n <= 10);
        let st = Arc::new(sturmian());
        let t0 = DirectiveSequence::periodic(st, vec![0]).unwrap();
        assert_eq!(is_primitive_window(&t0, 0, 200), None);
        let pos = Arc::new(SubstitutionSet::new("p", vec![Substitution::parse("p", &["01", "10"]).unwrap()]).unwrap());
        let s = DirectiveSequence::periodic(pos, vec![0]).unwrap();
        assert_eq!(is_primitive_window(&s, 0, 5), Some(1));
    }

    #[test]
    fn growth_traces() {
        let c = Arc::new(cassaigne());
        let s = DirectiveSequence::periodic(c, vec![0, 1]).unwrap();
        let g = is_everywhere_growing_window(&s, 40);
        assert!(!g.flagged());
        let last = &g.column_norms[40];
        let prev = &g.column_norms[38];
        for a in 0..3 {
            let ratio = last[a] / prev[a];
            assert!((ratio - 1.754_877_666).abs() < 1e-3, "{ratio}");
        }
        let st = Arc::new(sturmian());
        let t0 = DirectiveSequence::periodic(st, vec![0]).unwrap();
        assert_eq!(is_everywhere_growing_window(&t0, 20).stalled, vec![0]);
        let id = Arc::new(SubstitutionSet::new("id", vec![Substitution::identity(3)]).unwrap());
        let s = DirectiveSequence::periodic(id, vec![0]).unwrap();
        assert_eq!(is_everywhere_growing_window(&s, 10).stalled.len(), 3);
    }
}
