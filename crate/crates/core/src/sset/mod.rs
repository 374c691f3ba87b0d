//! Finite simplicial sets.
//!
//! A [`FiniteSimplicialSet`] stores its nondegenerate simplices per degree,
//! interned as integer ids, together with a face table. Degenerate simplices
//! never get ids of their own: they are addressed by a [`SimplexKey`], the
//! Eilenberg-Zilber normal form `s_{j_k} ... s_{j_1} x` with `x` nondegenerate.
//!
//! Edge orientation: `d_1` of an edge is its start vertex, `d_0` its end vertex.

mod chain;
mod key;
mod mask;
mod models;
mod path;
mod power;

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

pub use chain::{normalized_chain_complex, Chain};
pub use key::SimplexKey;
pub use mask::{coordinate_constraint_subset, intersect_subsets, union_subsets, Constraint, SubsetMask};
pub use models::{standard_model, Model};
pub use path::EdgePath;
pub use power::{power, PowerSet, ResourceGuard, DEFAULT_MAX_CELLS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SsetError {
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("face index {index} out of range for a simplex of degree {degree}")]
    FaceIndexOutOfRange { index: usize, degree: usize },
    #[error("no nondegenerate simplex {id} in degree {degree}")]
    UnknownSimplex { degree: usize, id: usize },
    #[error("component {component} out of range for a {factors}-fold product")]
    ComponentOutOfRange { component: usize, factors: usize },
    #[error("{0} is not a vertex")]
    NotAVertex(usize),
    #[error("subsets belong to different simplicial sets")]
    ParentMismatch,
    #[error("subset is not closed under faces (degree {degree}, simplex {id})")]
    NotFaceClosed { degree: usize, id: usize },
    #[error("resource guard exceeded: {needed} cells needed, limit is {limit}")]
    ResourceGuard { needed: usize, limit: usize },
    #[error("simplicial identity violated: {0}")]
    SimplicialIdentity(String),
    #[error("degree {degree} is above the tracked cap {cap}")]
    DegreeAboveCap { degree: usize, cap: usize },
    #[error("invalid edge path: {0}")]
    InvalidPath(String),
}

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

fn fresh_uid() -> u64 {
    NEXT_UID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cell {
    faces: Vec<SimplexKey>,
    label: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FiniteSimplicialSet {
    uid: u64,
    cap: usize,
    truncated: bool,
    cells: Vec<Vec<Cell>>,
}

impl FiniteSimplicialSet {
    /// Identity used to tie subsets and chain complexes to their parent.
    pub fn uid(&self) -> u64 {
        self.uid
    }

    /// Highest degree whose nondegenerate simplices are known.
    pub fn cap(&self) -> usize {
        self.cap
    }

    /// True when nondegenerate simplices may exist above the cap.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Whether degree `d` is fully described (either below the cap, or the
    /// set is known to be empty above it).
    pub fn tracks_degree(&self, d: usize) -> bool {
        d <= self.cap || !self.truncated
    }

    pub fn count(&self, d: usize) -> usize {
        self.cells.get(d).map_or(0, Vec::len)
    }

    /// Nondegenerate simplex counts for degrees `0..=cap`.
    pub fn counts(&self) -> Vec<usize> {
        (0..=self.cap).map(|d| self.count(d)).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// Top degree carrying a nondegenerate simplex.
    pub fn dimension(&self) -> usize {
        (0..self.cells.len())
            .rev()
            .find(|&d| !self.cells[d].is_empty())
            .unwrap_or(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.count(0)
    }

    pub fn label(&self, d: usize, id: usize) -> Option<&str> {
        self.cells.get(d)?.get(id)?.label.as_deref()
    }

    pub fn find_label(&self, d: usize, label: &str) -> Option<usize> {
        self.cells
            .get(d)?
            .iter()
            .position(|c| c.label.as_deref() == Some(label))
    }

    /// Display name of a nondegenerate simplex: its label, or `d<deg>#<id>`.
    pub fn name(&self, d: usize, id: usize) -> String {
        self.label(d, id)
            .map(str::to_owned)
            .unwrap_or_else(|| format!("d{d}#{id}"))
    }

    /// The stored face `d_i` of a nondegenerate simplex.
    pub fn nondeg_face(&self, d: usize, id: usize, i: usize) -> Result<&SimplexKey, SsetError> {
        let cell = self
            .cells
            .get(d)
            .and_then(|c| c.get(id))
            .ok_or(SsetError::UnknownSimplex { degree: d, id })?;
        cell.faces
            .get(i)
            .ok_or(SsetError::FaceIndexOutOfRange { index: i, degree: d })
    }

    /// `(start, end)` vertices of a nondegenerate edge.
    pub fn edge_endpoints(&self, e: usize) -> Result<(usize, usize), SsetError> {
        let start = self.nondeg_face(1, e, 1)?.base();
        let end = self.nondeg_face(1, e, 0)?.base();
        Ok((start, end))
    }

    pub fn check_key(&self, key: &SimplexKey) -> Result<(), SsetError> {
        if key.base() >= self.count(key.base_dim()) {
            return Err(SsetError::UnknownSimplex {
                degree: key.base_dim(),
                id: key.base(),
            });
        }
        Ok(())
    }

    /// `d_i` of an arbitrary simplex, returned in normal form.
    ///
    /// With `key = x . eta` for a surjection `eta: [d] -> [k]`, the face is
    /// `x . (eta . delta_i)` when that composite stays surjective; otherwise it
    /// factors through `delta_m` and the face of `x` itself is taken.
    pub fn face(&self, key: &SimplexKey, i: usize) -> Result<SimplexKey, SsetError> {
        let d = key.degree();
        if d == 0 || i > d {
            return Err(SsetError::FaceIndexOutOfRange { index: i, degree: d });
        }
        let map = key.map();
        let mut composed: Vec<usize> = Vec::with_capacity(d);
        composed.extend_from_slice(&map[..i]);
        composed.extend_from_slice(&map[i + 1..]);
        let hit = map[i];
        let still_onto = composed.contains(&hit);
        if still_onto {
            return Ok(SimplexKey::from_parts(key.base_dim(), key.base(), composed));
        }
        // The value `hit` is no longer reached: key.face(i) = (d_hit x) . mu'.
        let reduced: Vec<usize> = composed
            .iter()
            .map(|&v| if v > hit { v - 1 } else { v })
            .collect();
        let inner = self.nondeg_face(key.base_dim(), key.base(), hit)?;
        let outer: Vec<usize> = reduced.iter().map(|&v| inner.map()[v]).collect();
        Ok(SimplexKey::from_parts(inner.base_dim(), inner.base(), outer))
    }

    /// Checks `d_i d_j = d_{j-1} d_i` for `i < j` on every nondegenerate simplex.
    pub fn check_simplicial_identities(&self) -> Result<(), SsetError> {
        for d in 2..self.cells.len() {
            for id in 0..self.count(d) {
                let key = SimplexKey::nondegenerate(d, id);
                for j in 1..=d {
                    let dj = self.face(&key, j)?;
                    for i in 0..j {
                        let lhs = self.face(&dj, i)?;
                        let di = self.face(&key, i)?;
                        let rhs = self.face(&di, j - 1)?;
                        if lhs != rhs {
                            return Err(SsetError::SimplicialIdentity(format!(
                                "degree {d} simplex {id}: d{i} d{j} != d{} d{i}",
                                j - 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Formal boundary `sum (-1)^i d_i` of a chain, dropping degenerate faces.
    pub fn boundary(&self, chain: &Chain) -> Result<Chain, SsetError> {
        let d = chain.degree();
        let mut out = Chain::zero(d.saturating_sub(1));
        if d == 0 {
            return Ok(out);
        }
        for (&id, coeff) in chain.terms() {
            for i in 0..=d {
                let face = self.nondeg_face(d, id, i)?;
                if face.is_nondegenerate() {
                    if i % 2 == 0 {
                        out.add_term(face.base(), coeff);
                    } else {
                        out.add_term(face.base(), &-coeff.clone());
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Incremental constructor for small hand-made simplicial sets.
#[derive(Debug, Default)]
pub struct SimplicialSetBuilder {
    cells: Vec<Vec<Cell>>,
}

impl SimplicialSetBuilder {
    pub fn new() -> Self {
        SimplicialSetBuilder {
            cells: vec![Vec::new()],
        }
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> usize {
        self.cells[0].push(Cell {
            faces: Vec::new(),
            label: Some(label.into()),
        });
        self.cells[0].len() - 1
    }

    pub fn add_edge(
        &mut self,
        from: usize,
        to: usize,
        label: impl Into<String>,
    ) -> Result<usize, SsetError> {
        self.add_simplex(
            1,
            vec![SimplexKey::nondegenerate(0, to), SimplexKey::nondegenerate(0, from)],
            Some(label.into()),
        )
    }

    /// Adds a nondegenerate simplex of degree `d` with faces `d_0 .. d_d`.
    pub fn add_simplex(
        &mut self,
        d: usize,
        faces: Vec<SimplexKey>,
        label: Option<String>,
    ) -> Result<usize, SsetError> {
        if d == 0 {
            return Err(SsetError::InvalidParameter(
                "use add_vertex for 0-simplices".into(),
            ));
        }
        if faces.len() != d + 1 {
            return Err(SsetError::InvalidParameter(format!(
                "a {d}-simplex needs {} faces, got {}",
                d + 1,
                faces.len()
            )));
        }
        for f in &faces {
            if f.degree() != d - 1 {
                return Err(SsetError::InvalidParameter(format!(
                    "face of degree {} given for a {d}-simplex",
                    f.degree()
                )));
            }
            if f.base() >= self.cells.get(f.base_dim()).map_or(0, Vec::len) {
                return Err(SsetError::UnknownSimplex {
                    degree: f.base_dim(),
                    id: f.base(),
                });
            }
        }
        while self.cells.len() <= d {
            self.cells.push(Vec::new());
        }
        self.cells[d].push(Cell { faces, label });
        Ok(self.cells[d].len() - 1)
    }

    pub fn build(mut self) -> Result<FiniteSimplicialSet, SsetError> {
        while self.cells.len() > 1 && self.cells.last().is_some_and(Vec::is_empty) {
            self.cells.pop();
        }
        let set = FiniteSimplicialSet {
            uid: fresh_uid(),
            cap: self.cells.len() - 1,
            truncated: false,
            cells: self.cells,
        };
        set.check_simplicial_identities()?;
        Ok(set)
    }
}
