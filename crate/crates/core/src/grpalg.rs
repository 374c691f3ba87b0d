//! Words in free groups, Magnus expansion into truncated tensor algebras, and
//! the translation of edge paths in a graph-like simplicial set into words.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{q, zero_vector, QVector, Rational};
use crate::sset::{EdgePath, FiniteSimplicialSet, Model, SsetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrpAlgError {
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },
    #[error("cannot project from level {from} to level {to}")]
    BadProjection { from: usize, to: usize },
    #[error("generator g{generator} out of range for rank {rank}")]
    GeneratorOutOfRange { generator: usize, rank: usize },
    #[error("cannot parse word token {0:?}")]
    Parse(String),
    #[error("path runs from vertex {start} to {end}, expected {expected_start} to {expected_end}")]
    EndpointMismatch {
        start: usize,
        end: usize,
        expected_start: usize,
        expected_end: usize,
    },
    #[error("vertex {0} is not reachable from the base point")]
    Disconnected(usize),
    #[error(transparent)]
    Sset(#[from] SsetError),
}

/// One letter `g_k` or `g_k^-1`, with `k` starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize) -> Self {
        Letter {
            generator,
            inverse: false,
        }
    }

    pub fn inv(generator: usize) -> Self {
        Letter {
            generator,
            inverse: true,
        }
    }

    pub fn inverted(self) -> Self {
        Letter {
            inverse: !self.inverse,
            ..self
        }
    }
}

/// A word in traversal order: the leftmost letter is walked first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn positive(generators: &[usize]) -> Self {
        Word(generators.iter().map(|&g| Letter::new(g)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| !l.inverse)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn check_rank(&self, rank: usize) -> Result<(), GrpAlgError> {
        match self.0.iter().find(|l| l.generator == 0 || l.generator > rank) {
            Some(l) => Err(GrpAlgError::GeneratorOutOfRange {
                generator: l.generator,
                rank,
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "g{}", l.generator)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = GrpAlgError;

    /// Whitespace-separated `g<k>` and `g<k>^-1`; `1` or the empty string is
    /// the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (body, inverse) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let generator = body
                .strip_prefix('g')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| GrpAlgError::Parse(tok.to_owned()))?;
            letters.push(Letter { generator, inverse });
        }
        Ok(Word(letters))
    }
}

/// A tensor monomial `e_{i1} ⊗ ... ⊗ e_{ik}`, generator indices from 1.
pub type Monomial = Vec<usize>;

pub fn format_monomial(m: &[usize]) -> String {
    if m.is_empty() {
        "1".to_owned()
    } else {
        m.iter().map(|i| format!("e{i}")).collect::<Vec<_>>().join("*")
    }
}

/// Monomials of degree at most `n` in `r` letters, by degree and then lexicographically.
pub fn monomial_basis(r: usize, n: usize) -> Vec<Monomial> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Monomial> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(layer.len() * r);
        for m in &layer {
            for g in 1..=r {
                let mut m2 = m.clone();
                m2.push(g);
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `1 + r + ... + r^n`.
pub fn algebra_dim(r: usize, n: usize) -> usize {
    (0..=n).map(|k| r.pow(k as u32)).sum()
}

/// An element of the tensor algebra truncated above degree `level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncElem {
    level: usize,
    coeffs: BTreeMap<Monomial, Rational>,
}

impl TruncElem {
    pub fn zero(level: usize) -> Self {
        TruncElem {
            level,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(level: usize) -> Self {
        Self::monomial(level, Vec::new(), Rational::one())
    }

    /// `c · m`, or zero when `m` lies above the truncation.
    pub fn monomial(level: usize, m: Monomial, c: Rational) -> Self {
        let mut e = Self::zero(level);
        if m.len() <= level {
            e.add_term(m, &c);
        }
        e
    }

    fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c.clone());
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.coeffs
    }

    pub fn coefficient(&self, m: &[usize]) -> Rational {
        self.coeffs.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.level)
    }

    fn check_level(&self, other: &TruncElem) -> Result<(), GrpAlgError> {
        if self.level != other.level {
            return Err(GrpAlgError::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncElem) -> Result<TruncElem, GrpAlgError> {
        self.check_level(other)?;
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &Rational) -> TruncElem {
        let mut out = Self::zero(self.level);
        for (m, v) in &self.coeffs {
            out.add_term(m.clone(), &(v * c));
        }
        out
    }

    /// Concatenation product, dropping monomials above the level.
    pub fn mul(&self, other: &TruncElem) -> Result<TruncElem, GrpAlgError> {
        self.check_level(other)?;
        let mut out = Self::zero(self.level);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if a.len() + b.len() > self.level {
                    continue;
                }
                let mut m = a.clone();
                m.extend_from_slice(b);
                out.add_term(m, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// Image in a lower truncation.
    pub fn project(&self, to: usize) -> Result<TruncElem, GrpAlgError> {
        if to > self.level {
            return Err(GrpAlgError::BadProjection {
                from: self.level,
                to,
            });
        }
        let mut out = Self::zero(to);
        for (m, c) in self.coeffs.iter().filter(|(m, _)| m.len() <= to) {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    /// Coordinates in [`monomial_basis`]`(r, level)`.
    pub fn to_vector(&self, r: usize) -> Result<QVector, GrpAlgError> {
        let basis = monomial_basis(r, self.level);
        let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = zero_vector(basis.len());
        for (m, c) in &self.coeffs {
            let g = m.iter().copied().find(|&g| g == 0 || g > r).unwrap_or(0);
            let i = index
                .get(m)
                .ok_or(GrpAlgError::GeneratorOutOfRange { generator: g, rank: r })?;
            v[*i] = c.clone();
        }
        Ok(v)
    }
}

impl fmt::Display for TruncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &Rational)> = self.coeffs.iter().collect();
        terms.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{}", format_monomial(m))?;
            } else {
                write!(f, "({})·{}", crate::exactla::format_rational(c), format_monomial(m))?;
            }
        }
        Ok(())
    }
}

/// Multiplicative extension of `g ↦ 1 + e`, `g^-1 ↦ Σ (-1)^k e^k`.
pub fn magnus(w: &Word, n: usize) -> TruncElem {
    let mut acc = TruncElem::one(n);
    for l in w.letters() {
        let mut factor = TruncElem::zero(n);
        let top = if l.inverse { n } else { 1.min(n) };
        for k in 0..=top {
            let sign = if l.inverse && k % 2 == 1 { -1 } else { 1 };
            factor.add_term(vec![l.generator; k], &q(sign));
        }
        acc = acc.mul(&factor).expect("same level");
    }
    acc
}

/// Formal rational combination of words.
pub type WordCombination = Vec<(Word, Rational)>;

/// Magnus image of a combination of words.
pub fn magnus_combination(combo: &[(Word, Rational)], n: usize) -> TruncElem {
    let mut acc = TruncElem::zero(n);
    for (w, c) in combo {
        acc = acc.add(&magnus(w, n).scaled(c)).expect("same level");
    }
    acc
}

/// Expansion of `(g_{i1} - 1) ... (g_{ik} - 1)` into `2^k` signed positive words.
pub fn basis_lift(m: &[usize]) -> WordCombination {
    let k = m.len();
    let mut out = Vec::with_capacity(1 << k);
    for subset in 0u64..(1u64 << k) {
        let gens: Vec<usize> = (0..k).filter(|&i| subset >> i & 1 == 1).map(|i| m[i]).collect();
        let sign = if (k - gens.len()).is_multiple_of(2) { 1 } else { -1 };
        out.push((Word::positive(&gens), q(sign)));
    }
    out
}

/// Rewrites each inverse letter as `Σ_{k ≤ n} (1 - g)^k`, which agrees with
/// `g^-1` modulo the `(n+1)`-st power of the augmentation ideal. The result
/// is a combination of positive words with the same image at level `n`.
pub fn positive_expansion(w: &Word, n: usize) -> WordCombination {
    // coefficient of g^j in Σ_{k=j}^{n} (1 - g)^k
    let binom = |a: usize, b: usize| -> i64 {
        (0..b).fold(1i64, |acc, i| acc * (a - i) as i64 / (i as i64 + 1))
    };
    let inverse_terms: Vec<(usize, Rational)> = (0..=n)
        .map(|j| {
            let s: i64 = (j..=n).map(|k| binom(k, j)).sum();
            (j, q(if j % 2 == 0 { s } else { -s }))
        })
        .collect();
    let mut acc: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    acc.insert(Vec::new(), Rational::one());
    for l in w.letters() {
        let mut next: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (gens, c) in &acc {
            if l.inverse {
                for (j, cj) in &inverse_terms {
                    let mut g2 = gens.clone();
                    g2.extend(std::iter::repeat_n(l.generator, *j));
                    *next.entry(g2).or_insert_with(Rational::zero) += c * cj;
                }
            } else {
                let mut g2 = gens.clone();
                g2.push(l.generator);
                *next.entry(g2).or_insert_with(Rational::zero) += c;
            }
        }
        acc = next;
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(g, c)| (Word::positive(&g), c))
        .collect()
}

/// Translation between edge paths of a graph-like model and words in the
/// free fundamental group at `x`, trivialized along a reference path to `y`.
#[derive(Debug, Clone)]
pub struct GroupoidSetup {
    rank: usize,
    x: usize,
    y: usize,
    reference: EdgePath,
    reference_word: Word,
    edge_words: Vec<Word>,
    loops: Vec<Option<EdgePath>>,
    inverse_loops: Vec<Option<EdgePath>>,
}

impl GroupoidSetup {
    /// Free generators are the edges outside a breadth-first spanning tree
    /// rooted at `x`, in edge order. On `WedgeInv` models the edge `f_i` is
    /// read as the inverse of `e_i` instead.
    pub fn for_model(
        set: &FiniteSimplicialSet,
        model: &Model,
        x: usize,
        y: usize,
    ) -> Result<Self, GrpAlgError> {
        for v in [x, y] {
            if v >= set.vertex_count() {
                return Err(SsetError::NotAVertex(v).into());
            }
        }
        let edges = set.count(1);
        let ends: Vec<(usize, usize)> = (0..edges)
            .map(|e| set.edge_endpoints(e))
            .collect::<Result<_, _>>()?;
        if let Model::WedgeInv(r) = model {
            let r = *r;
            let edge_words = (0..edges)
                .map(|e| {
                    if e < r {
                        Word(vec![Letter::new(e + 1)])
                    } else {
                        Word(vec![Letter::inv(e - r + 1)])
                    }
                })
                .collect();
            return Ok(GroupoidSetup {
                rank: r,
                x,
                y,
                reference: EdgePath::constant(x),
                reference_word: Word::empty(),
                edge_words,
                loops: (0..r).map(|e| Some(EdgePath::new(x, vec![e]))).collect(),
                inverse_loops: (0..r).map(|e| Some(EdgePath::new(x, vec![r + e]))).collect(),
            });
        }

        // breadth-first spanning tree over undirected edges
        let nv = set.vertex_count();
        let mut parent_edge: Vec<Option<usize>> = vec![None; nv];
        let mut seen = vec![false; nv];
        let mut tree = vec![false; edges];
        let mut queue = VecDeque::from([x]);
        seen[x] = true;
        while let Some(u) = queue.pop_front() {
            for (e, &(a, b)) in ends.iter().enumerate() {
                let other = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    tree[e] = true;
                    parent_edge[other] = Some(e);
                    queue.push_back(other);
                }
            }
        }
        if let Some(v) = (0..nv).find(|&v| !seen[v]) {
            return Err(GrpAlgError::Disconnected(v));
        }
        let mut edge_words = Vec::with_capacity(edges);
        let mut generator_edges = Vec::new();
        for (e, &in_tree) in tree.iter().enumerate() {
            if in_tree {
                edge_words.push(Word::empty());
            } else {
                generator_edges.push(e);
                edge_words.push(Word(vec![Letter::new(generator_edges.len())]));
            }
        }
        // forward tree path from x to v, when every tree step points away from x
        let forward_from_x = |v: usize| -> Option<Vec<usize>> {
            let mut path = Vec::new();
            let mut cur = v;
            while cur != x {
                let e = parent_edge[cur]?;
                let (a, b) = ends[e];
                if b != cur {
                    return None;
                }
                path.push(e);
                cur = a;
            }
            path.reverse();
            Some(path)
        };
        let forward_to_x = |v: usize| -> Option<Vec<usize>> {
            let mut path = Vec::new();
            let mut cur = v;
            while cur != x {
                let e = parent_edge[cur]?;
                let (a, b) = ends[e];
                if a != cur {
                    return None;
                }
                path.push(e);
                cur = b;
            }
            Some(path)
        };
        let loops = generator_edges
            .iter()
            .map(|&e| {
                let (u, v) = ends[e];
                let mut steps = forward_from_x(u)?;
                steps.push(e);
                steps.extend(forward_to_x(v)?);
                Some(EdgePath::new(x, steps))
            })
            .collect();
        let reference = if x == y {
            EdgePath::constant(x)
        } else {
            shortest_forward_path(&ends, nv, x, y).ok_or(GrpAlgError::Disconnected(y))?
        };
        let mut setup = GroupoidSetup {
            rank: generator_edges.len(),
            x,
            y,
            reference_word: Word::empty(),
            reference: reference.clone(),
            edge_words,
            loops,
            inverse_loops: vec![None; generator_edges.len()],
        };
        setup.reference_word = setup.word_of_path(set, &reference)?;
        Ok(setup)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn y(&self) -> usize {
        self.y
    }

    pub fn basepoints_equal(&self) -> bool {
        self.x == self.y
    }

    pub fn reference_path(&self) -> &EdgePath {
        &self.reference
    }

    /// Word of the loop `γ · T(end → x)` for a path starting at `x`.
    pub fn word_of_path(&self, set: &FiniteSimplicialSet, path: &EdgePath) -> Result<Word, GrpAlgError> {
        path.vertices(set)?;
        let mut letters = Vec::new();
        for &e in &path.edges {
            letters.extend_from_slice(self.edge_words[e].letters());
        }
        Ok(Word(letters))
    }

    /// Class of a path from `x` to `y` in the truncated algebra, trivialized
    /// by the reference path.
    pub fn groupoid_class(
        &self,
        set: &FiniteSimplicialSet,
        path: &EdgePath,
        n: usize,
    ) -> Result<TruncElem, GrpAlgError> {
        let verts = path.vertices(set)?;
        let (start, end) = (verts[0], *verts.last().unwrap_or(&verts[0]));
        if start != self.x || end != self.y {
            return Err(GrpAlgError::EndpointMismatch {
                start,
                end,
                expected_start: self.x,
                expected_end: self.y,
            });
        }
        let w = self.word_of_path(set, path)?.concat(&self.reference_word.inverse());
        Ok(magnus(&w, n))
    }

    /// A path from `x` to `y` whose class is `w`, built from forward edges
    /// only; `None` when some letter has no forward realization.
    pub fn realize(&self, w: &Word) -> Option<EdgePath> {
        let mut path = EdgePath::constant(self.x);
        for l in w.letters() {
            let table = if l.inverse { &self.inverse_loops } else { &self.loops };
            let lp = table.get(l.generator.checked_sub(1)?)?.as_ref()?;
            path = path.then(lp);
        }
        Some(path.then(&self.reference))
    }

    /// True when every positive word can be realized.
    pub fn realizes_generators(&self) -> bool {
        self.loops.iter().all(Option::is_some)
    }
}

fn shortest_forward_path(ends: &[(usize, usize)], nv: usize, x: usize, y: usize) -> Option<EdgePath> {
    let mut via: Vec<Option<usize>> = vec![None; nv];
    let mut seen = vec![false; nv];
    seen[x] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(u) = queue.pop_front() {
        for (e, &(a, b)) in ends.iter().enumerate() {
            if a == u && !seen[b] {
                seen[b] = true;
                via[b] = Some(e);
                queue.push_back(b);
            }
        }
    }
    if !seen[y] {
        return None;
    }
    let mut steps = Vec::new();
    let mut cur = y;
    while cur != x {
        let e = via[cur]?;
        steps.push(e);
        cur = ends[e].0;
    }
    steps.reverse();
    Some(EdgePath::new(x, steps))
}
