//! Rational homology of (relative) normalized chain complexes.
//!
//! A [`ChainComplex`] is attached to a simplicial set together with an
//! ambient subset `M` and a relative subset `A ⊆ M`; its degree-d basis is
//! the nondegenerate d-simplices of `M` not in `A`. Chains on the parent set
//! are converted to complex vectors by dropping the terms that lie in `A`.

use std::ops::RangeInclusive;
use std::sync::Arc;

use thiserror::Error;

use crate::exactla::{is_zero_vector, zero_vector, LinAlgError, LinearSolver, QMatrix, QVector};
use crate::sset::{Chain, FiniteSimplicialSet, SsetError, SubsetMask};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error(transparent)]
    Sset(#[from] SsetError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("homology in degree {degree} needs chains through degree {needed}; complex stops at {top}")]
    DegreeOutOfCap { degree: usize, needed: usize, top: usize },
    #[error("chain is not a relative cycle")]
    NotACycle,
    #[error("chain has simplex {id} of degree {degree} outside the ambient subset")]
    OutsideAmbient { degree: usize, id: usize },
    #[error("relative subset is not contained in the ambient subset")]
    RelNotInAmbient,
    #[error("chain of degree {found} given where degree {expected} is expected")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("image of representative {index} is not a relative cycle in the target")]
    ImageNotCycle { index: usize },
    #[error("boundary of representative {index} is not supported on the middle subset")]
    BoundaryOutsideSubset { index: usize },
}

#[derive(Debug, Clone)]
pub struct ChainComplex {
    set_uid: u64,
    top: usize,
    ambient: Option<SubsetMask>,
    rel: Option<SubsetMask>,
    basis: Vec<Vec<usize>>,
    position: Vec<Vec<Option<usize>>>,
    boundary: Vec<QMatrix>,
}

impl ChainComplex {
    /// Chains of `ambient` (the whole set when `None`) modulo `rel`, in
    /// degrees `0..=top`.
    pub fn new(
        set: &FiniteSimplicialSet,
        ambient: Option<&SubsetMask>,
        rel: Option<&SubsetMask>,
        top: usize,
    ) -> Result<Self, HomologyError> {
        if !set.tracks_degree(top) {
            return Err(SsetError::DegreeAboveCap {
                degree: top,
                cap: set.cap(),
            }
            .into());
        }
        for m in ambient.iter().chain(rel.iter()) {
            m.check_face_closed(set)?;
        }
        if let (Some(a), Some(r)) = (ambient, rel) {
            if !r.is_subset_of(a) {
                return Err(HomologyError::RelNotInAmbient);
            }
        }
        let in_basis = |d: usize, id: usize| {
            ambient.is_none_or(|a| a.contains(d, id)) && !rel.is_some_and(|r| r.contains(d, id))
        };
        let mut basis = Vec::with_capacity(top + 1);
        let mut position = Vec::with_capacity(top + 1);
        for d in 0..=top {
            let ids: Vec<usize> = (0..set.count(d)).filter(|&id| in_basis(d, id)).collect();
            let mut pos = vec![None; set.count(d)];
            for (i, &id) in ids.iter().enumerate() {
                pos[id] = Some(i);
            }
            basis.push(ids);
            position.push(pos);
        }
        let mut boundary = Vec::with_capacity(top + 1);
        boundary.push(QMatrix::zeros(0, basis[0].len()));
        for d in 1..=top {
            let mut m = QMatrix::zeros(basis[d - 1].len(), basis[d].len());
            for (col, &id) in basis[d].iter().enumerate() {
                for i in 0..=d {
                    let face = set.nondeg_face(d, id, i)?;
                    if !face.is_nondegenerate() {
                        continue;
                    }
                    if let Some(row) = position[d - 1][face.base()] {
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        m.add_to(row, col, &crate::exactla::q(sign));
                    }
                }
            }
            boundary.push(m);
        }
        Ok(ChainComplex {
            set_uid: set.uid(),
            top,
            ambient: ambient.cloned(),
            rel: rel.cloned(),
            basis,
            position,
            boundary,
        })
    }

    pub fn set_uid(&self) -> u64 {
        self.set_uid
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn ambient(&self) -> Option<&SubsetMask> {
        self.ambient.as_ref()
    }

    pub fn rel(&self) -> Option<&SubsetMask> {
        self.rel.as_ref()
    }

    pub fn basis_count(&self, d: usize) -> usize {
        self.basis.get(d).map_or(0, Vec::len)
    }

    pub fn basis(&self, d: usize) -> &[usize] {
        &self.basis[d]
    }

    /// Boundary matrix from degree `d` to degree `d - 1`.
    pub fn boundary_matrix(&self, d: usize) -> &QMatrix {
        &self.boundary[d]
    }

    /// True when every composite `∂_{d-1} ∂_d` is exactly zero.
    pub fn squares_to_zero(&self) -> bool {
        (2..=self.top).all(|d| {
            self.boundary[d - 1]
                .mul(&self.boundary[d])
                .map(|m| m.is_zero())
                .unwrap_or(false)
        })
    }

    /// Coordinates of a chain on the parent set; terms in the relative
    /// subset are dropped, terms outside the ambient subset are an error.
    pub fn vector_of(&self, chain: &Chain) -> Result<QVector, HomologyError> {
        let d = chain.degree();
        if d > self.top {
            return Err(HomologyError::DegreeOutOfCap {
                degree: d,
                needed: d,
                top: self.top,
            });
        }
        let mut v = zero_vector(self.basis[d].len());
        for (&id, c) in chain.terms() {
            if self.rel.as_ref().is_some_and(|r| r.contains(d, id)) {
                continue;
            }
            match self.position[d].get(id).copied().flatten() {
                Some(i) => v[i] = c.clone(),
                None => return Err(HomologyError::OutsideAmbient { degree: d, id }),
            }
        }
        Ok(v)
    }

    pub fn chain_of(&self, d: usize, v: &[crate::exactla::Rational]) -> Chain {
        let mut chain = Chain::zero(d);
        for (i, c) in v.iter().enumerate() {
            chain.add_term(self.basis[d][i], c);
        }
        chain
    }
}

/// `H_q` of a chain complex, with chosen representative cycles.
#[derive(Debug, Clone)]
pub struct HomologySpace {
    complex: Arc<ChainComplex>,
    degree: usize,
    cycle_dim: usize,
    boundary_rank: usize,
    representatives: Vec<QVector>,
    solver: LinearSolver,
}

pub fn homology_space(complex: &Arc<ChainComplex>, q: usize) -> Result<HomologySpace, HomologyError> {
    if q + 1 > complex.top {
        return Err(HomologyError::DegreeOutOfCap {
            degree: q,
            needed: q + 1,
            top: complex.top,
        });
    }
    let n = complex.basis_count(q);
    let incoming = complex.boundary_matrix(q + 1);
    let (_, image_pivots) = incoming.rref();
    let image = incoming.select_columns(&image_pivots);
    let cycles = if q == 0 {
        QMatrix::identity(n)
    } else {
        QMatrix::from_columns(n, &complex.boundary_matrix(q).kernel_basis())?
    };
    let stacked = image.hstack(&cycles)?;
    let (_, pivots) = stacked.rref();
    let b = image.cols();
    let chosen: Vec<usize> = pivots.iter().copied().filter(|&p| p >= b).collect();
    let representatives: Vec<QVector> = chosen.iter().map(|&p| stacked.column(p)).collect();
    let basis = image.hstack(&QMatrix::from_columns(n, &representatives)?)?;
    Ok(HomologySpace {
        complex: Arc::clone(complex),
        degree: q,
        cycle_dim: cycles.cols(),
        boundary_rank: b,
        representatives,
        solver: LinearSolver::new(&basis),
    })
}

impl HomologySpace {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    pub fn cycle_dimension(&self) -> usize {
        self.cycle_dim
    }

    pub fn boundary_rank(&self) -> usize {
        self.boundary_rank
    }

    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.complex
    }

    pub fn representatives(&self) -> &[QVector] {
        &self.representatives
    }

    pub fn representative_chain(&self, i: usize) -> Chain {
        self.complex.chain_of(self.degree, &self.representatives[i])
    }

    /// Class coordinates of a cycle vector of the complex.
    pub fn coords_vector(&self, v: &[crate::exactla::Rational]) -> Result<QVector, HomologyError> {
        if self.degree > 0 {
            let b = self.complex.boundary_matrix(self.degree).mul_vec(v)?;
            if !is_zero_vector(&b) {
                return Err(HomologyError::NotACycle);
            }
        }
        let x = self.solver.solve(v)?;
        Ok(x[self.boundary_rank..].to_vec())
    }

    /// Class coordinates of a chain on the parent set.
    pub fn coords(&self, chain: &Chain) -> Result<QVector, HomologyError> {
        if chain.degree() != self.degree {
            return Err(HomologyError::DegreeMismatch {
                expected: self.degree,
                found: chain.degree(),
            });
        }
        self.coords_vector(&self.complex.vector_of(chain)?)
    }
}

/// Matrix of the map induced by a chain map, in the chosen bases.
pub fn induced_map(
    src: &HomologySpace,
    tgt: &HomologySpace,
    map: impl Fn(&Chain) -> Result<Chain, HomologyError>,
) -> Result<QMatrix, HomologyError> {
    let columns: Vec<QVector> = (0..src.dimension())
        .map(|i| {
            let image = map(&src.representative_chain(i))?;
            tgt.coords(&image).map_err(|e| match e {
                HomologyError::NotACycle | HomologyError::OutsideAmbient { .. } => {
                    HomologyError::ImageNotCycle { index: i }
                }
                other => other,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(QMatrix::from_columns(tgt.dimension(), &columns)?)
}

/// Map induced by the identity on chains (inclusions of pairs).
pub fn inclusion_map(src: &HomologySpace, tgt: &HomologySpace) -> Result<QMatrix, HomologyError> {
    induced_map(src, tgt, |c| Ok(c.clone()))
}

/// Connecting morphism `H_q(P, Y) -> H_{q-1}(Y, Z)`: a relative cycle goes
/// to the class of its full boundary, which must lie in `Y`.
pub fn connecting_matrix(
    set: &FiniteSimplicialSet,
    src: &HomologySpace,
    tgt: &HomologySpace,
    middle: &SubsetMask,
) -> Result<QMatrix, HomologyError> {
    let columns: Vec<QVector> = (0..src.dimension())
        .map(|i| {
            let rep = src.representative_chain(i);
            let boundary = set.boundary(&rep)?;
            if !boundary.supported_in(middle) {
                return Err(HomologyError::BoundaryOutsideSubset { index: i });
            }
            tgt.coords(&boundary)
        })
        .collect::<Result<_, _>>()?;
    Ok(QMatrix::from_columns(tgt.dimension(), &columns)?)
}

/// The connecting morphism of a triple together with the spaces it was computed in.
#[derive(Debug, Clone)]
pub struct ConnectingMorphism {
    pub matrix: QMatrix,
    pub source: HomologySpace,
    pub target: HomologySpace,
}

pub fn connecting_triple(
    set: &FiniteSimplicialSet,
    y: &SubsetMask,
    z: &SubsetMask,
    q: usize,
) -> Result<ConnectingMorphism, HomologyError> {
    if q == 0 {
        return Err(HomologyError::DegreeOutOfCap {
            degree: 0,
            needed: 1,
            top: 0,
        });
    }
    let upper = Arc::new(ChainComplex::new(set, None, Some(y), q + 1)?);
    let lower = Arc::new(ChainComplex::new(set, Some(y), Some(z), q)?);
    let source = homology_space(&upper, q)?;
    let target = homology_space(&lower, q - 1)?;
    let matrix = connecting_matrix(set, &source, &target, y)?;
    Ok(ConnectingMorphism {
        matrix,
        source,
        target,
    })
}

/// Result of one exactness test in a long exact sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LesNode {
    pub group: String,
    pub degree: usize,
    pub dimension: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub composite_zero: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LesReport {
    pub nodes: Vec<LesNode>,
}

impl LesReport {
    pub fn all_pass(&self) -> bool {
        self.nodes.iter().all(|n| n.pass)
    }
}

fn exactness_node(
    group: &str,
    degree: usize,
    dimension: usize,
    incoming: &QMatrix,
    outgoing: &QMatrix,
) -> Result<LesNode, HomologyError> {
    let composite_zero = outgoing.mul(incoming)?.is_zero();
    let rank_in = incoming.rank();
    let rank_out = outgoing.rank();
    Ok(LesNode {
        group: group.to_owned(),
        degree,
        dimension,
        rank_in,
        rank_out,
        composite_zero,
        pass: composite_zero && rank_in + rank_out == dimension,
    })
}

/// Exactness of `H_q(Y,Z) -> H_q(P,Z) -> H_q(P,Y) -> H_{q-1}(Y,Z)` at every
/// node in the given degree range.
pub fn verify_triple_les(
    set: &FiniteSimplicialSet,
    y: &SubsetMask,
    z: &SubsetMask,
    degrees: RangeInclusive<usize>,
) -> Result<LesReport, HomologyError> {
    let (lo, hi) = (*degrees.start(), *degrees.end());
    let top = hi + 1;
    let c_yz = Arc::new(ChainComplex::new(set, Some(y), Some(z), top)?);
    let c_pz = Arc::new(ChainComplex::new(set, None, Some(z), top)?);
    let c_py = Arc::new(ChainComplex::new(set, None, Some(y), top)?);

    let first = lo.saturating_sub(1);
    let mut h_yz = Vec::new();
    let mut h_pz = Vec::new();
    let mut h_py = Vec::new();
    for q in first..=hi {
        h_yz.push(homology_space(&c_yz, q)?);
        h_pz.push(homology_space(&c_pz, q)?);
        h_py.push(homology_space(&c_py, q)?);
    }
    let at = |q: usize| q - first;
    let incl: Vec<QMatrix> = (first..=hi)
        .map(|q| inclusion_map(&h_yz[at(q)], &h_pz[at(q)]))
        .collect::<Result<_, _>>()?;
    let proj: Vec<QMatrix> = (first..=hi)
        .map(|q| inclusion_map(&h_pz[at(q)], &h_py[at(q)]))
        .collect::<Result<_, _>>()?;
    let conn = |q: usize| -> Result<QMatrix, HomologyError> {
        if q == 0 {
            Ok(QMatrix::zeros(0, h_py[at(0)].dimension()))
        } else {
            connecting_matrix(set, &h_py[at(q)], &h_yz[at(q - 1)], y)
        }
    };
    let mut report = LesReport::default();
    for q in lo..=hi {
        report.nodes.push(exactness_node(
            "H(P,Z)",
            q,
            h_pz[at(q)].dimension(),
            &incl[at(q)],
            &proj[at(q)],
        )?);
        report.nodes.push(exactness_node(
            "H(P,Y)",
            q,
            h_py[at(q)].dimension(),
            &proj[at(q)],
            &conn(q)?,
        )?);
        if q > first {
            report.nodes.push(exactness_node(
                "H(Y,Z)",
                q - 1,
                h_yz[at(q - 1)].dimension(),
                &conn(q)?,
                &incl[at(q - 1)],
            )?);
        }
    }
    Ok(report)
}

/// Long exact sequence of the pair `(P, A)`.
pub fn verify_les(
    set: &FiniteSimplicialSet,
    a: &SubsetMask,
    degrees: RangeInclusive<usize>,
) -> Result<LesReport, HomologyError> {
    verify_triple_les(set, a, &SubsetMask::empty(set), degrees)
}
