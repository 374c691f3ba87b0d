use std::fmt;

/// A simplex of a simplicial set in Eilenberg-Zilber normal form.
///
/// Stored as a nondegenerate base simplex `(base_dim, base)` together with the
/// monotone surjection `[degree] -> [base_dim]` through which it is pulled
/// back. The surjection and the strictly decreasing degeneracy word
/// `s_{j_k} ... s_{j_1}` carry the same information: `j` occurs in the word
/// exactly when `map[j] == map[j + 1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexKey {
    base_dim: usize,
    base: usize,
    map: Vec<usize>,
}

impl SimplexKey {
    pub fn nondegenerate(dim: usize, id: usize) -> Self {
        SimplexKey {
            base_dim: dim,
            base: id,
            map: (0..=dim).collect(),
        }
    }

    /// The vertex `v` degenerated all the way up to degree `d`.
    pub fn totally_degenerate(v: usize, d: usize) -> Self {
        SimplexKey {
            base_dim: 0,
            base: v,
            map: vec![0; d + 1],
        }
    }

    pub(crate) fn from_parts(base_dim: usize, base: usize, map: Vec<usize>) -> Self {
        debug_assert!(map.first() == Some(&0) && map.last() == Some(&base_dim));
        debug_assert!(map.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
        SimplexKey { base_dim, base, map }
    }

    /// Builds `s_{j_k} ... s_{j_1} x` from a strictly decreasing word.
    pub fn from_degeneracy_word(base_dim: usize, base: usize, word: &[usize]) -> Option<Self> {
        if word.windows(2).any(|w| w[0] <= w[1]) {
            return None;
        }
        let mut key = Self::nondegenerate(base_dim, base);
        for &j in word.iter().rev() {
            if j > key.degree() {
                return None;
            }
            key = key.degenerate(j);
        }
        Some(key)
    }

    pub fn degree(&self) -> usize {
        self.map.len() - 1
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// The surjection `[degree] -> [base_dim]`.
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.base_dim == self.degree()
    }

    /// True when this is a degenerate copy of a vertex.
    pub fn is_vertex_like(&self) -> bool {
        self.base_dim == 0
    }

    /// Positions `j` with `map[j] == map[j + 1]`, as a bit set.
    pub(crate) fn repeat_mask(&self) -> u64 {
        self.map
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] == w[1])
            .fold(0u64, |acc, (j, _)| acc | (1u64 << j))
    }

    /// Strictly decreasing degeneracy indices (empty when nondegenerate).
    pub fn degeneracy_word(&self) -> Vec<usize> {
        let mut word: Vec<usize> = self
            .map
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] == w[1])
            .map(|(j, _)| j)
            .collect();
        word.reverse();
        word
    }

    /// `s_j` of this simplex.
    pub fn degenerate(&self, j: usize) -> Self {
        assert!(j <= self.degree(), "degeneracy index out of range");
        let mut map = self.map.clone();
        map.insert(j + 1, self.map[j]);
        SimplexKey {
            base_dim: self.base_dim,
            base: self.base,
            map,
        }
    }
}

impl fmt::Debug for SimplexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in self.degeneracy_word() {
            write!(f, "s{j}")?;
        }
        write!(f, "[{}#{}]", self.base_dim, self.base)
    }
}
