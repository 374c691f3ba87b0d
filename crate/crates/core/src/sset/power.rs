//! Categorical n-fold products.
//!
//! A d-simplex of `X^n` is an n-tuple of d-simplices of `X`; it is
//! nondegenerate exactly when no single `s_j` divides every component.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{fresh_uid, Cell, FiniteSimplicialSet, SimplexKey, SsetError};

pub const DEFAULT_MAX_CELLS: usize = 5_000_000;

/// Upper bound on the number of nondegenerate simplices a construction may create.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceGuard {
    pub max_cells: usize,
}

impl Default for ResourceGuard {
    fn default() -> Self {
        ResourceGuard {
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

/// `X^n` truncated at some degree, with the component tuple of every simplex.
#[derive(Debug, Clone)]
pub struct PowerSet {
    set: FiniteSimplicialSet,
    factors: usize,
    base_uid: u64,
    components: Vec<Vec<Vec<SimplexKey>>>,
    index: Vec<HashMap<Vec<SimplexKey>, usize>>,
}

/// Every d-simplex of `x`, degenerate or not, in a fixed order.
pub(crate) fn all_simplices(x: &FiniteSimplicialSet, d: usize) -> Vec<SimplexKey> {
    let mut out = Vec::new();
    for k in 0..=d.min(x.dimension()) {
        let jumps = jump_sets(d, k);
        for id in 0..x.count(k) {
            for js in &jumps {
                let mut map = Vec::with_capacity(d + 1);
                let mut v = 0;
                map.push(0);
                for t in 1..=d {
                    if js.contains(&t) {
                        v += 1;
                    }
                    map.push(v);
                }
                out.push(SimplexKey::from_parts(k, id, map));
            }
        }
    }
    out
}

/// All k-element subsets of `1..=d`, lexicographically.
fn jump_sets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for t in start..=d {
            cur.push(t);
            rec(t + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, d, k, &mut Vec::new(), &mut out);
    out
}

/// Splits off the common degeneracy of a tuple of equal-degree simplices.
///
/// Returns the nondegenerate reduced tuple and the collapse surjection
/// `[d] -> [d']` whose pullback recovers the input.
pub(crate) fn normalize_tuple(tuple: &[SimplexKey], degree: usize) -> (Vec<SimplexKey>, Vec<usize>) {
    let common = tuple
        .iter()
        .fold((1u64 << degree) - 1, |acc, k| acc & k.repeat_mask());
    let mut collapse = Vec::with_capacity(degree + 1);
    let mut v = 0;
    collapse.push(0);
    for t in 1..=degree {
        if common & (1u64 << (t - 1)) == 0 {
            v += 1;
        }
        collapse.push(v);
    }
    let reduced = tuple
        .iter()
        .map(|k| {
            let map: Vec<usize> = (0..=degree)
                .filter(|&t| t == 0 || common & (1u64 << (t - 1)) == 0)
                .map(|t| k.map()[t])
                .collect();
            SimplexKey::from_parts(k.base_dim(), k.base(), map)
        })
        .collect();
    (reduced, collapse)
}

/// The n-fold product of `x`, with nondegenerate simplices up to degree `cap`.
pub fn power(
    x: &FiniteSimplicialSet,
    n: usize,
    cap: usize,
    guard: &ResourceGuard,
) -> Result<PowerSet, SsetError> {
    if !x.tracks_degree(cap) {
        return Err(SsetError::DegreeAboveCap {
            degree: cap,
            cap: x.cap(),
        });
    }
    let mut components: Vec<Vec<Vec<SimplexKey>>> = Vec::with_capacity(cap + 1);
    let mut index: Vec<HashMap<Vec<SimplexKey>, usize>> = Vec::with_capacity(cap + 1);
    let mut total = 0usize;
    for d in 0..=cap {
        let simplices = all_simplices(x, d);
        let raw = (simplices.len() as u128).saturating_pow(n as u32);
        let budget = (guard.max_cells as u128).saturating_mul(64);
        if raw > budget {
            return Err(SsetError::ResourceGuard {
                needed: usize::try_from(raw).unwrap_or(usize::MAX),
                limit: guard.max_cells,
            });
        }
        let masks: Vec<u64> = simplices.iter().map(SimplexKey::repeat_mask).collect();
        let full = if d == 0 { 0 } else { (1u64 << d) - 1 };
        let mut level = Vec::new();
        let mut picks = Vec::with_capacity(n);
        enumerate_tuples(&masks, n, full, &mut picks, &mut |picks| {
            level.push(picks.iter().map(|&i| simplices[i].clone()).collect::<Vec<_>>());
            total + level.len() <= guard.max_cells
        });
        total += level.len();
        if total > guard.max_cells {
            return Err(SsetError::ResourceGuard {
                needed: total,
                limit: guard.max_cells,
            });
        }
        let idx = level
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        components.push(level);
        index.push(idx);
    }

    let mut cells: Vec<Vec<Cell>> = Vec::with_capacity(cap + 1);
    cells.push(vec![
        Cell {
            faces: Vec::new(),
            label: None
        };
        components[0].len()
    ]);
    for d in 1..=cap {
        let level: Result<Vec<Cell>, SsetError> = components[d]
            .par_iter()
            .map(|tuple| {
                let faces = (0..=d)
                    .map(|i| {
                        let face: Vec<SimplexKey> = tuple
                            .iter()
                            .map(|k| x.face(k, i))
                            .collect::<Result<_, _>>()?;
                        lookup_in(&index, &face, d - 1)
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Cell { faces, label: None })
            })
            .collect();
        cells.push(level?);
    }
    let truncated = cap < n * x.dimension();
    Ok(PowerSet {
        set: FiniteSimplicialSet {
            uid: fresh_uid(),
            cap,
            truncated,
            cells,
        },
        factors: n,
        base_uid: x.uid(),
        components,
        index,
    })
}

/// Depth-first enumeration of index tuples whose repeat masks have empty
/// intersection. `visit` returns false to stop early.
fn enumerate_tuples(
    masks: &[u64],
    n: usize,
    common: u64,
    picks: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if picks.len() == n {
        if common == 0 {
            return visit(picks);
        }
        return true;
    }
    for (i, &m) in masks.iter().enumerate() {
        picks.push(i);
        let keep_going = enumerate_tuples(masks, n, common & m, picks, visit);
        picks.pop();
        if !keep_going {
            return false;
        }
    }
    true
}

fn lookup_in(
    index: &[HashMap<Vec<SimplexKey>, usize>],
    tuple: &[SimplexKey],
    degree: usize,
) -> Result<SimplexKey, SsetError> {
    let (reduced, collapse) = normalize_tuple(tuple, degree);
    let d = *collapse.last().unwrap_or(&0);
    let id = index
        .get(d)
        .and_then(|m| m.get(&reduced))
        .copied()
        .ok_or(SsetError::DegreeAboveCap {
            degree: d,
            cap: index.len().saturating_sub(1),
        })?;
    Ok(SimplexKey::from_parts(d, id, collapse))
}

impl PowerSet {
    pub fn set(&self) -> &FiniteSimplicialSet {
        &self.set
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    /// Uid of the factor `X`.
    pub fn base_uid(&self) -> u64 {
        self.base_uid
    }

    /// Component tuple of a nondegenerate simplex.
    pub fn components(&self, d: usize, id: usize) -> &[SimplexKey] {
        &self.components[d][id]
    }

    /// Normal form of an arbitrary tuple of equal-degree simplices of `X`.
    pub fn lookup(&self, tuple: &[SimplexKey]) -> Result<SimplexKey, SsetError> {
        if tuple.len() != self.factors {
            return Err(SsetError::ComponentOutOfRange {
                component: tuple.len(),
                factors: self.factors,
            });
        }
        let degree = match tuple.first() {
            Some(k) => k.degree(),
            None => 0,
        };
        if tuple.iter().any(|k| k.degree() != degree) {
            return Err(SsetError::InvalidParameter("components of different degrees".into()));
        }
        if degree > self.set.cap() {
            return Err(SsetError::DegreeAboveCap {
                degree,
                cap: self.set.cap(),
            });
        }
        lookup_in(&self.index, tuple, degree)
    }

    /// Id of a nondegenerate simplex given by its components.
    pub fn id_of(&self, tuple: &[SimplexKey]) -> Option<usize> {
        let d = tuple.first().map_or(0, SimplexKey::degree);
        self.index.get(d)?.get(tuple).copied()
    }
}
