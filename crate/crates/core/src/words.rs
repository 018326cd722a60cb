//! Words, substitutions, directive sequences and their fixed points.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::IMatrix;

/// A letter is an index into the alphabet `{0, …, d}`.
pub type Letter = u8;

/// A finite word.
pub type Word = Vec<Letter>;

/// Parses a word written with one decimal digit per letter.
pub fn parse_word(s: &str) -> Result<Word> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as Letter)
                .ok_or_else(|| Error::input(format!("invalid letter {c:?} in word {s:?}")))
        })
        .collect()
}

pub fn format_word(w: &[Letter]) -> String {
    w.iter().map(|&a| char::from(b'0' + a)).collect()
}

/// Letter counts of `w` over an alphabet of the given size.
pub fn abelianize(w: &[Letter], alphabet_size: usize) -> Vec<i64> {
    let mut v = vec![0i64; alphabet_size];
    for &a in w {
        v[a as usize] += 1;
    }
    v
}

/// Length of the longest common prefix of all the words.
pub fn common_prefix_len<W: AsRef<[Letter]>>(words: &[W]) -> usize {
    let Some(first) = words.first() else { return 0 };
    let first = first.as_ref();
    let mut n = first.len();
    for w in &words[1..] {
        let w = w.as_ref();
        n = n.min(w.len());
        n = (0..n).find(|&i| w[i] != first[i]).unwrap_or(n);
    }
    n
}

/// A non-erasing substitution together with its abelianization matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Substitution {
    name: String,
    images: Vec<Word>,
    matrix: IMatrix,
}

impl Substitution {
    pub fn new(name: impl Into<String>, images: Vec<Word>) -> Result<Self> {
        let name = name.into();
        let size = images.len();
        if size == 0 {
            return Err(Error::input(format!("substitution {name} has an empty alphabet")));
        }
        for (a, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::input(format!("substitution {name} erases letter {a}")));
            }
            if let Some(&b) = img.iter().find(|&&b| b as usize >= size) {
                return Err(Error::input(format!("substitution {name} uses letter {b} outside the alphabet")));
            }
        }
        let cols: Vec<Vec<i64>> = images.iter().map(|w| abelianize(w, size)).collect();
        let matrix = IMatrix::from_columns(&cols);
        Ok(Substitution { name, images, matrix })
    }

    /// Builds a substitution from images written as digit strings.
    pub fn parse(name: impl Into<String>, images: &[&str]) -> Result<Self> {
        let images = images.iter().map(|s| parse_word(s)).collect::<Result<Vec<_>>>()?;
        Substitution::new(name, images)
    }

    pub fn identity(size: usize) -> Self {
        Substitution::new("id", (0..size).map(|a| vec![a as Letter]).collect()).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet_size(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, a: Letter) -> &[Letter] {
        &self.images[a as usize]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Column `a` is the abelianization of the image of `a`.
    pub fn matrix(&self) -> &IMatrix {
        &self.matrix
    }

    pub fn is_unimodular(&self) -> bool {
        let d = self.matrix.det();
        d == 1.into() || d == (-1).into()
    }

    pub fn apply(&self, w: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(w.len() * 2);
        for &a in w {
            out.extend_from_slice(self.image(a));
        }
        out
    }

    /// The prefix of length at most `max_len` of the image of `w`.
    pub fn apply_truncated(&self, w: &[Letter], max_len: usize) -> Word {
        let mut out = Vec::new();
        for &a in w {
            if out.len() >= max_len {
                break;
            }
            out.extend_from_slice(self.image(a));
        }
        out.truncate(max_len);
        out
    }

    /// `self ∘ other`, i.e. `a ↦ self(other(a))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        assert_eq!(self.alphabet_size(), other.alphabet_size(), "alphabet mismatch");
        let images = other.images.iter().map(|w| self.apply(w)).collect();
        Substitution::new(format!("{}{}", self.name, other.name), images).unwrap()
    }

    pub fn pow(&self, n: usize) -> Substitution {
        let mut acc = Substitution::identity(self.alphabet_size());
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc.name = format!("({})^{n}", self.name);
        acc
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.name)?;
        let parts: Vec<String> =
            self.images.iter().enumerate().map(|(a, w)| format!("{a}->{}", format_word(w))).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Serialized form of a substitution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubstitutionSpec {
    pub name: String,
    pub alphabet_size: usize,
    pub images: BTreeMap<String, String>,
}

impl TryFrom<SubstitutionSpec> for Substitution {
    type Error = Error;
    fn try_from(spec: SubstitutionSpec) -> Result<Self> {
        let mut images = vec![None; spec.alphabet_size];
        for (k, v) in &spec.images {
            let a: usize = k.trim().parse().map_err(|_| Error::input(format!("invalid letter key {k:?}")))?;
            let slot = images
                .get_mut(a)
                .ok_or_else(|| Error::input(format!("letter {a} outside alphabet of size {}", spec.alphabet_size)))?;
            *slot = Some(parse_word(v)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(a, w)| w.ok_or_else(|| Error::input(format!("{}: missing image of letter {a}", spec.name))))
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(spec.name, images)
    }
}

impl From<&Substitution> for SubstitutionSpec {
    fn from(s: &Substitution) -> Self {
        SubstitutionSpec {
            name: s.name.clone(),
            alphabet_size: s.alphabet_size(),
            images: s.images.iter().enumerate().map(|(a, w)| (a.to_string(), format_word(w))).collect(),
        }
    }
}

/// A finite set `S` of substitutions on a common alphabet, indexed by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionSet {
    pub name: String,
    subs: Vec<Substitution>,
}

#[derive(Serialize, Deserialize)]
struct SetSpec {
    name: String,
    alphabet_size: usize,
    substitutions: Vec<SubstitutionSpec>,
}

impl SubstitutionSet {
    pub fn new(name: impl Into<String>, subs: Vec<Substitution>) -> Result<Self> {
        let name = name.into();
        let Some(first) = subs.first() else {
            return Err(Error::input(format!("substitution set {name} is empty")));
        };
        let size = first.alphabet_size();
        if subs.iter().any(|s| s.alphabet_size() != size) {
            return Err(Error::input(format!("substitution set {name} mixes alphabets")));
        }
        Ok(SubstitutionSet { name, subs })
    }

    pub fn alphabet_size(&self) -> usize {
        self.subs[0].alphabet_size()
    }

    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    pub fn get(&self, id: usize) -> &Substitution {
        &self.subs[id]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Substitution> {
        self.subs.iter()
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.subs.iter().position(|s| s.name() == name)
    }

    /// Splits a string such as `"c1c1c0"` or `"c1 c1 c0"` into substitution ids,
    /// matching names greedily.
    pub fn parse_ids(&self, s: &str) -> Result<Vec<usize>> {
        let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
        let mut ids = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let best = self
                .subs
                .iter()
                .enumerate()
                .filter(|(_, sub)| rest.starts_with(sub.name()))
                .max_by_key(|(_, sub)| sub.name().len());
            match best {
                Some((id, sub)) => {
                    ids.push(id);
                    rest = &rest[sub.name().len()..];
                }
                None => return Err(Error::input(format!("unknown substitution at {rest:?} in set {}", self.name))),
            }
        }
        Ok(ids)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SetSpec = serde_json::from_str(text)?;
        let subs = spec
            .substitutions
            .into_iter()
            .map(|s| {
                if s.alphabet_size != spec.alphabet_size {
                    return Err(Error::input(format!("{}: alphabet size disagrees with the set", s.name)));
                }
                Substitution::try_from(s)
            })
            .collect::<Result<Vec<_>>>()?;
        SubstitutionSet::new(spec.name, subs)
    }

    pub fn to_json(&self) -> String {
        let spec = SetSpec {
            name: self.name.clone(),
            alphabet_size: self.alphabet_size(),
            substitutions: self.subs.iter().map(SubstitutionSpec::from).collect(),
        };
        serde_json::to_string_pretty(&spec).expect("serializable")
    }
}

/// The two Sturmian substitutions `τ0, τ1`.
pub fn sturmian() -> SubstitutionSet {
    SubstitutionSet::new(
        "sturmian",
        vec![
            Substitution::parse("t0", &["0", "01"]).unwrap(),
            Substitution::parse("t1", &["10", "1"]).unwrap(),
        ],
    )
    .unwrap()
}

/// The two Cassaigne substitutions `c0, c1`.
pub fn cassaigne() -> SubstitutionSet {
    SubstitutionSet::new(
        "cassaigne",
        vec![
            Substitution::parse("c0", &["0", "02", "1"]).unwrap(),
            Substitution::parse("c1", &["1", "02", "2"]).unwrap(),
        ],
    )
    .unwrap()
}

/// The three Arnoux–Rauzy substitutions `ar0, ar1, ar2`.
pub fn arnoux_rauzy() -> SubstitutionSet {
    SubstitutionSet::new(
        "arnoux-rauzy",
        vec![
            Substitution::parse("ar0", &["0", "10", "20"]).unwrap(),
            Substitution::parse("ar1", &["01", "1", "21"]).unwrap(),
            Substitution::parse("ar2", &["02", "12", "2"]).unwrap(),
        ],
    )
    .unwrap()
}

/// Brun permutations `ζ`, listed as `(ζ(0), ζ(1), ζ(2))` with `x_ζ(0) < x_ζ(1) < x_ζ(2)`.
pub const BRUN_PERMUTATIONS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 2, 0], [1, 0, 2], [2, 0, 1], [2, 1, 0]];

/// The six Brun substitutions `b_ζ`: `ζ(1) ↦ ζ(1)ζ(2)`, every other letter fixed.
pub fn brun() -> SubstitutionSet {
    let subs = BRUN_PERMUTATIONS
        .iter()
        .map(|z| {
            let mut images: Vec<Word> = (0..3).map(|a| vec![a as Letter]).collect();
            images[z[1]] = vec![z[1] as Letter, z[2] as Letter];
            Substitution::new(format!("b{}{}{}", z[0], z[1], z[2]), images).unwrap()
        })
        .collect();
    SubstitutionSet::new("brun", subs).unwrap()
}

/// How a directive sequence continues after its explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// Repeats the given ids forever.
    Periodic(Vec<usize>),
    /// Nothing is known past the prefix.
    Unknown,
}

/// A sequence `(s_k)` of substitutions drawn from a fixed set.
#[derive(Clone, Debug)]
pub struct DirectiveSequence {
    set: Arc<SubstitutionSet>,
    prefix: Vec<usize>,
    tail: Tail,
}

impl DirectiveSequence {
    pub fn new(set: Arc<SubstitutionSet>, prefix: Vec<usize>, tail: Tail) -> Result<Self> {
        let bad = prefix.iter().chain(match &tail {
            Tail::Periodic(p) => p.iter(),
            Tail::Unknown => [].iter(),
        });
        for &id in bad {
            if id >= set.len() {
                return Err(Error::input(format!("substitution id {id} not in set {}", set.name)));
            }
        }
        if matches!(&tail, Tail::Periodic(p) if p.is_empty()) {
            return Err(Error::input("empty period"));
        }
        Ok(DirectiveSequence { set, prefix, tail })
    }

    pub fn periodic(set: Arc<SubstitutionSet>, period: Vec<usize>) -> Result<Self> {
        DirectiveSequence::new(set, Vec::new(), Tail::Periodic(period))
    }

    pub fn finite(set: Arc<SubstitutionSet>, prefix: Vec<usize>) -> Result<Self> {
        DirectiveSequence::new(set, prefix, Tail::Unknown)
    }

    /// Parses names, e.g. `"c1c1c0"`; with `periodic` the word is repeated forever.
    pub fn parse(set: Arc<SubstitutionSet>, s: &str, periodic: bool) -> Result<Self> {
        let ids = set.parse_ids(s)?;
        if periodic {
            DirectiveSequence::periodic(set, ids)
        } else {
            DirectiveSequence::finite(set, ids)
        }
    }

    pub fn set(&self) -> &Arc<SubstitutionSet> {
        &self.set
    }

    pub fn alphabet_size(&self) -> usize {
        self.set.alphabet_size()
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Number of known terms, `None` when infinite.
    pub fn known_len(&self) -> Option<usize> {
        match self.tail {
            Tail::Periodic(_) => None,
            Tail::Unknown => Some(self.prefix.len()),
        }
    }

    pub fn id(&self, k: usize) -> Option<usize> {
        if k < self.prefix.len() {
            return Some(self.prefix[k]);
        }
        match &self.tail {
            Tail::Periodic(p) => Some(p[(k - self.prefix.len()) % p.len()]),
            Tail::Unknown => None,
        }
    }

    pub fn get(&self, k: usize) -> Option<&Substitution> {
        self.id(k).map(|id| self.set.get(id))
    }

    fn require(&self, k: usize) -> Result<&Substitution> {
        self.get(k).ok_or(Error::Range { start: k, end: k + 1, len: self.prefix.len() })
    }

    /// The first `n` ids; fails if fewer are known.
    pub fn ids(&self, n: usize) -> Result<Vec<usize>> {
        (0..n)
            .map(|k| self.id(k).ok_or(Error::Range { start: 0, end: n, len: self.prefix.len() }))
            .collect()
    }

    /// `M_{[k,l)} = M_k ⋯ M_{l−1}`.
    pub fn matrix_product(&self, k: usize, l: usize) -> Result<IMatrix> {
        if k > l {
            return Err(Error::Range { start: k, end: l, len: self.known_len().unwrap_or(usize::MAX) });
        }
        let mut acc = IMatrix::identity(self.alphabet_size());
        for i in k..l {
            acc = acc.try_mul(self.require(i)?.matrix())?;
        }
        Ok(acc)
    }

    /// The sequence `(s_{k+j})_j`.
    pub fn shifted(&self, k: usize) -> DirectiveSequence {
        let (prefix, tail) = if k <= self.prefix.len() {
            (self.prefix[k..].to_vec(), self.tail.clone())
        } else {
            match &self.tail {
                Tail::Periodic(p) => {
                    let r = (k - self.prefix.len()) % p.len();
                    let mut rot = p[r..].to_vec();
                    rot.extend_from_slice(&p[..r]);
                    (Vec::new(), Tail::Periodic(rot))
                }
                Tail::Unknown => (Vec::new(), Tail::Unknown),
            }
        };
        DirectiveSequence { set: self.set.clone(), prefix, tail }
    }

    /// The prefix of length at most `max_len` of `s_{[k,l)}(w)`.
    pub fn apply_range(&self, k: usize, l: usize, w: &[Letter], max_len: usize) -> Result<Word> {
        let mut cur = w.to_vec();
        for i in (k..l).rev() {
            cur = self.require(i)?.apply_truncated(&cur, max_len);
        }
        cur.truncate(max_len);
        Ok(cur)
    }

    /// Human readable names of the first `n` terms.
    pub fn names(&self, n: usize) -> Vec<String> {
        (0..n).map_while(|k| self.get(k).map(|s| s.name().to_string())).collect()
    }
}

/// A periodic point of a substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPoint {
    pub period: usize,
    pub prefix: Word,
}

/// The periodic point of `σ` starting with `a`, truncated to length `len`.
///
/// The period is the length of the cycle of `a` under the first-letter map.
pub fn periodic_point(sigma: &Substitution, a: Letter, len: usize) -> Result<PeriodicPoint> {
    let size = sigma.alphabet_size();
    if a as usize >= size {
        return Err(Error::input(format!("letter {a} outside alphabet")));
    }
    let first = |b: Letter| sigma.image(b)[0];
    let mut period = None;
    let mut b = a;
    for p in 1..=size * size {
        b = first(b);
        if b == a {
            period = Some(p);
            break;
        }
    }
    let period = period.ok_or(Error::NotGrowing(a))?;
    let power = sigma.pow(period);
    // σ^p(a) starts with a, so the iterates form a chain of prefixes; it grows
    // without bound exactly when σ^p(a) has length at least two.
    if power.image(a).len() < 2 {
        return Err(Error::NotGrowing(a));
    }
    let mut w = vec![a];
    while w.len() < len {
        w = power.apply_truncated(&w, len);
    }
    w.truncate(len);
    Ok(PeriodicPoint { period, prefix: w })
}

/// Finite prefixes of a fixed point `(u_k)` of a directive sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSequencePrefix {
    /// Row `k` is a prefix of `u_k`.
    pub rows: Vec<Word>,
    /// Per row, how many letters are forced by the directive sequence alone;
    /// letters past this point depend on the seed letter.
    pub determined: Vec<usize>,
    /// Depth of the directive sequence that was used.
    pub depth: usize,
}

impl WordSequencePrefix {
    /// True when every row reaches `len` letters without relying on the seed.
    pub fn fully_determined(&self, len: usize) -> bool {
        self.determined.iter().all(|&d| d >= len)
    }

    /// Checks that `u_k` is a prefix of `s_k(u_{k+1})` on the materialized rows.
    pub fn check_relation(&self, seq: &DirectiveSequence) -> bool {
        self.rows.windows(2).enumerate().all(|(k, pair)| {
            let Some(s) = seq.get(k) else { return false };
            let img = s.apply_truncated(&pair[1], pair[0].len());
            let n = img.len().min(pair[0].len());
            img[..n] == pair[0][..n]
        })
    }
}

const MAX_FIXED_POINT_DEPTH: usize = 1024;

/// Prefixes of length `len` of the rows `u_0, …, u_{rows−1}` of a fixed point.
///
/// The forced prefix of `u_k` is computed at depth `n` from both the common
/// prefix of `s_{[k,n)}(c)` over all letters `c` and the recursion
/// `D_k = s_k(D_{k+1}) · lcp_a s_k(a)`. When `seed` is given, rows are extended
/// by `s_{[k,n)}(seed)` past the forced part. For infinite sequences the depth
/// grows until every row is forced up to `len` or a cap is reached.
pub fn fixed_point_prefix(
    seq: &DirectiveSequence,
    rows: usize,
    len: usize,
    seed: Option<Letter>,
) -> Result<WordSequencePrefix> {
    let size = seq.alphabet_size();
    if let Some(s) = seed {
        if s as usize >= size {
            return Err(Error::input(format!("seed letter {s} outside alphabet")));
        }
    }
    let mut depth = match seq.known_len() {
        Some(n) => n,
        None => rows.max(8),
    };
    if depth < rows {
        return Err(Error::Range { start: 0, end: rows, len: depth });
    }
    loop {
        let out = fixed_point_at_depth(seq, rows, len, seed, depth)?;
        if seq.known_len().is_some() || out.fully_determined(len) || depth >= MAX_FIXED_POINT_DEPTH {
            return Ok(out);
        }
        depth *= 2;
    }
}

fn fixed_point_at_depth(
    seq: &DirectiveSequence,
    rows: usize,
    len: usize,
    seed: Option<Letter>,
    depth: usize,
) -> Result<WordSequencePrefix> {
    let size = seq.alphabet_size();
    let mut images: Vec<Word> = (0..size).map(|c| vec![c as Letter]).collect();
    let mut forced: Word = Vec::new();
    let mut chosen: Option<Word> = seed.map(|s| vec![s]);
    let mut out_rows = vec![Vec::new(); rows];
    let mut determined = vec![0; rows];
    for k in (0..depth).rev() {
        let s = seq.require(k)?;
        for w in images.iter_mut() {
            *w = s.apply_truncated(w, len);
        }
        let lcp_images = common_prefix_len(s.images());
        let mut rec = s.apply_truncated(&forced, len);
        if rec.len() < len {
            let from_first = &s.images()[0][..lcp_images];
            rec.extend_from_slice(from_first);
            rec.truncate(len);
        }
        let lcp_all = common_prefix_len(&images);
        forced = if lcp_all > rec.len() { images[0][..lcp_all].to_vec() } else { rec };
        if let Some(c) = chosen.as_mut() {
            *c = s.apply_truncated(c, len);
        }
        if k < rows {
            determined[k] = forced.len();
            out_rows[k] = match &chosen {
                Some(c) if c.len() > forced.len() => {
                    debug_assert_eq!(&c[..forced.len()], &forced[..]);
                    c.clone()
                }
                _ => forced.clone(),
            };
        }
    }
    Ok(WordSequencePrefix { rows: out_rows, determined, depth })
}

/// Convenience: the fixed point row `u_0` truncated to `len`, seeded if needed.
pub fn fixed_point_word(seq: &DirectiveSequence, len: usize, seed: Letter) -> Result<Word> {
    let p = fixed_point_prefix(seq, 1, len, Some(seed))?;
    Ok(p.rows.into_iter().next().unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_examples() {
        let c = cassaigne();
        assert_eq!(format_word(&c.get(0).apply(&parse_word("1").unwrap())), "02");
        assert!(c.get(1).apply(&[]).is_empty());
        let c0c1 = c.get(0).compose(c.get(1));
        assert_eq!(format_word(c0c1.image(0)), "02");
        assert_eq!(format_word(c0c1.image(1)), "01");
        assert_eq!(format_word(c0c1.image(2)), "1");
    }

    #[test]
    fn abelianization_examples() {
        assert_eq!(abelianize(&parse_word("01001").unwrap(), 2), vec![3, 2]);
        assert_eq!(abelianize(&[], 3), vec![0, 0, 0]);
        assert_eq!(abelianize(&parse_word("0212").unwrap(), 3), vec![1, 1, 2]);
    }

    #[test]
    fn matrices() {
        let c = cassaigne();
        assert_eq!(c.get(0).matrix().to_rows(), vec![vec![1, 1, 0], vec![0, 0, 1], vec![0, 1, 0]]);
        assert_eq!(c.get(1).matrix().to_rows(), vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 1, 1]]);
        assert_eq!(Substitution::identity(3).matrix(), &IMatrix::identity(3));
        for set in [sturmian(), cassaigne(), arnoux_rauzy(), brun()] {
            assert!(set.iter().all(Substitution::is_unimodular), "{}", set.name);
        }
    }

    #[test]
    fn brun_matrices_and_identity() {
        let b = brun();
        let get = |n: &str| b.get(b.id_of(n).unwrap()).clone();
        assert_eq!(get("b012").matrix().to_rows(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 1, 1]]);
        assert_eq!(get("b210").matrix().to_rows(), vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let prod = get("b210").compose(&get("b021")).compose(&get("b102"));
        let rot = Substitution::parse("r", &["10", "2", "0"]).unwrap();
        assert_eq!(prod.images(), rot.pow(3).images());
        assert_eq!(format_word(prod.image(0)), "0210");
    }

    #[test]
    fn rejects_erasing_substitutions() {
        assert!(Substitution::parse("bad", &["0", ""]).is_err());
        assert!(Substitution::parse("bad", &["0", "2"]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let set = cassaigne();
        let back = SubstitutionSet::from_json(&set.to_json()).unwrap();
        assert_eq!(set, back);
        let one: SubstitutionSpec =
            serde_json::from_str(r#"{"name":"c0","alphabet_size":3,"images":{"0":"0","1":"02","2":"1"}}"#).unwrap();
        assert_eq!(Substitution::try_from(one).unwrap(), *set.get(0));
    }

    #[test]
    fn parse_ids_greedy() {
        let set = cassaigne();
        assert_eq!(set.parse_ids("c1c1c0").unwrap(), vec![1, 1, 0]);
        assert_eq!(set.parse_ids("c1 c0, c1").unwrap(), vec![1, 0, 1]);
        assert!(set.parse_ids("c2").is_err());
    }

    #[test]
    fn periodic_points() {
        let c = cassaigne();
        let c0c1 = c.get(0).compose(c.get(1));
        let p = periodic_point(&c0c1, 0, 10).unwrap();
        assert_eq!(p.period, 1);
        // 0 -> 02 -> 021 -> 02101 -> 02101021...
        assert_eq!(format_word(&p.prefix), "0210102010");
        let trib = Substitution::parse("trib", &["01", "02", "0"]).unwrap();
        assert_eq!(format_word(&periodic_point(&trib, 0, 5).unwrap().prefix), "01020");
        assert!(matches!(periodic_point(&Substitution::identity(2), 0, 5), Err(Error::NotGrowing(0))));
    }

    #[test]
    fn shifted_periodic() {
        let set = Arc::new(cassaigne());
        let s = DirectiveSequence::periodic(set, vec![0, 1]).unwrap();
        assert_eq!(s.shifted(1).ids(4).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(s.matrix_product(0, 2).unwrap().to_rows(), vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 0]]);
        assert_eq!(s.matrix_product(3, 3).unwrap(), IMatrix::identity(3));
    }

    #[test]
    fn identity_fixed_point_is_flagged() {
        let set = Arc::new(SubstitutionSet::new("id", vec![Substitution::identity(2)]).unwrap());
        let s = DirectiveSequence::periodic(set, vec![0]).unwrap();
        let p = fixed_point_prefix(&s, 3, 10, Some(0)).unwrap();
        assert!(!p.fully_determined(10));
        assert!(p.rows.iter().all(|r| r == &vec![0]));
        assert_eq!(p.determined, vec![0, 0, 0]);
    }
}
