//! Diagonal pair families `(X^n, Y^(n))`, their staircase cycles, and the
//! transition morphisms `κ_n : H_n(X^n, Y^(n)) → H_{n-1}(X^{n-1}, Y^(n-1))`
//! compared against projection of truncated groupoid algebras.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exactla::{q, zero_vector, LinAlgError, QMatrix, QVector, Rational};
use crate::grpalg::{
    algebra_dim, basis_lift, magnus, monomial_basis, positive_expansion, GroupoidSetup, GrpAlgError, Word,
};
use crate::homology::{
    connecting_triple, homology_space, induced_map, ChainComplex, ConnectingMorphism, HomologyError,
    HomologySpace,
};
use crate::sset::{
    coordinate_constraint_subset, intersect_subsets, power, union_subsets, Chain, Constraint, EdgePath,
    FiniteSimplicialSet, PowerSet, ResourceGuard, SimplexKey, SsetError, SubsetMask,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeilinsonError {
    #[error(transparent)]
    Sset(#[from] SsetError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    GrpAlg(#[from] GrpAlgError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("path runs from vertex {start} to {end}; the pair family expects {x} to {y}")]
    EndpointMismatch { start: usize, end: usize, x: usize, y: usize },
    #[error("staircase chain of degree {n} has boundary outside Y")]
    NotRelativeCycle { n: usize },
    #[error("excision map at level {n} is not invertible ({rows}x{cols}, rank {rank})")]
    ExcisionNotInvertible { n: usize, rows: usize, cols: usize, rank: usize },
    #[error("algebra has dimension {algebra} but H_{n} has dimension {homology}")]
    DimensionMismatch { n: usize, algebra: usize, homology: usize },
    #[error("no forward walks realize a basis of the truncated algebra at level {0}")]
    Unrealizable(usize),
    #[error("levels {upper} and {lower} are not consecutive or do not share base points")]
    LevelMismatch { upper: usize, lower: usize },
}

/// Which `Y_i` is kept out of `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Retained {
    /// `Z = Y_1 ∪ ... ∪ Y_n`, identifying `Y_0` with `X^{n-1}`.
    #[default]
    First,
    /// `Z = Y_0 ∪ ... ∪ Y_{n-1}`, identifying `Y_n` with `X^{n-1}`.
    Last,
}

impl fmt::Display for Retained {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Retained::First => "first",
            Retained::Last => "last",
        })
    }
}

/// Sign rule for the simplices of a staircase chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StaircaseSigns {
    #[default]
    Standard,
    /// Drops the permutation sign. Used only as a negative control.
    Corrupted,
}

#[derive(Debug, Clone)]
pub struct PairFamily {
    n: usize,
    x: usize,
    y: usize,
    retained: Retained,
    base: FiniteSimplicialSet,
    power: PowerSet,
    parts: Vec<SubsetMask>,
    y_mask: SubsetMask,
    z_mask: SubsetMask,
    a_mask: SubsetMask,
}

pub fn build_pair_family(
    base: &FiniteSimplicialSet,
    x: usize,
    y: usize,
    n: usize,
    retained: Retained,
    guard: &ResourceGuard,
) -> Result<PairFamily, BeilinsonError> {
    for v in [x, y] {
        if v >= base.vertex_count() {
            return Err(SsetError::NotAVertex(v).into());
        }
    }
    let power = power(base, n, n + 1, guard)?;
    let set = power.set();
    if n == 0 {
        let y_mask = if x == y {
            SubsetMask::full(set)
        } else {
            SubsetMask::empty(set)
        };
        return Ok(PairFamily {
            n,
            x,
            y,
            retained,
            base: base.clone(),
            parts: vec![y_mask.clone()],
            y_mask,
            z_mask: SubsetMask::empty(set),
            a_mask: SubsetMask::empty(set),
            power,
        });
    }
    let mut parts = Vec::with_capacity(n + 1);
    parts.push(coordinate_constraint_subset(&power, base, Constraint::PinnedTo(1, x))?);
    for i in 1..n {
        parts.push(coordinate_constraint_subset(&power, base, Constraint::Eq(i, i + 1))?);
    }
    parts.push(coordinate_constraint_subset(&power, base, Constraint::PinnedTo(n, y))?);
    let all: Vec<&SubsetMask> = parts.iter().collect();
    let y_mask = union_subsets(&all)?;
    let (kept, others): (&SubsetMask, Vec<&SubsetMask>) = match retained {
        Retained::First => (&parts[0], parts[1..].iter().collect()),
        Retained::Last => (&parts[n], parts[..n].iter().collect()),
    };
    let z_mask = union_subsets(&others)?;
    let a_mask = intersect_subsets(&[kept, &z_mask])?;
    Ok(PairFamily {
        n,
        x,
        y,
        retained,
        base: base.clone(),
        y_mask,
        z_mask,
        a_mask,
        parts,
        power,
    })
}

impl PairFamily {
    pub fn level(&self) -> usize {
        self.n
    }

    pub fn basepoints(&self) -> (usize, usize) {
        (self.x, self.y)
    }

    pub fn retained(&self) -> Retained {
        self.retained
    }

    pub fn base(&self) -> &FiniteSimplicialSet {
        &self.base
    }

    pub fn power(&self) -> &PowerSet {
        &self.power
    }

    pub fn set(&self) -> &FiniteSimplicialSet {
        self.power.set()
    }

    /// `Y_0 .. Y_n`; a single entry at level 0.
    pub fn parts(&self) -> &[SubsetMask] {
        &self.parts
    }

    pub fn y_mask(&self) -> &SubsetMask {
        &self.y_mask
    }

    pub fn z_mask(&self) -> &SubsetMask {
        &self.z_mask
    }

    pub fn a_mask(&self) -> &SubsetMask {
        &self.a_mask
    }

    pub fn retained_part(&self) -> &SubsetMask {
        match self.retained {
            Retained::First => &self.parts[0],
            Retained::Last => &self.parts[self.n],
        }
    }

    fn check_endpoints(&self, path: &EdgePath) -> Result<(), BeilinsonError> {
        let verts = path.vertices(&self.base)?;
        let (start, end) = (verts[0], verts[verts.len() - 1]);
        if start != self.x || end != self.y {
            return Err(BeilinsonError::EndpointMismatch {
                start,
                end,
                x: self.x,
                y: self.y,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StaircaseChain {
    pub path: EdgePath,
    pub n: usize,
    pub chain: Chain,
}

impl StaircaseChain {
    /// True when every nondegenerate boundary term lies in `Y^(n)`.
    pub fn boundary_in_y(&self, pf: &PairFamily) -> Result<bool, BeilinsonError> {
        if self.n == 0 {
            return Ok(true);
        }
        Ok(pf.set().boundary(&self.chain)?.supported_in(pf.y_mask()))
    }
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Sign of the staircase simplex for the permutation `perm`.
fn staircase_sign(n: usize, perm: &[usize], signs: StaircaseSigns) -> i64 {
    let orientation = if n.is_multiple_of(2) { -1 } else { 1 };
    match signs {
        StaircaseSigns::Standard => orientation * permutation_sign(perm),
        StaircaseSigns::Corrupted => orientation,
    }
}

/// Triangulation of `(t_1, ..., t_n) ↦ (γ(t_1), ..., γ(t_n))` over the
/// ordered region `0 ≤ t_1 ≤ ... ≤ t_n ≤ L`.
pub fn staircase_chain(
    pf: &PairFamily,
    path: &EdgePath,
    signs: StaircaseSigns,
) -> Result<StaircaseChain, BeilinsonError> {
    pf.check_endpoints(path)?;
    let n = pf.n;
    let len = path.len();
    let mut chain = Chain::zero(n);
    if n == 0 {
        let id = pf.power.id_of(&[]).ok_or(SsetError::UnknownSimplex { degree: 0, id: 0 })?;
        chain.add_term(id, &q(staircase_sign(0, &[], signs)));
        return Ok(StaircaseChain {
            path: path.clone(),
            n,
            chain,
        });
    }
    let perms = permutations(n);
    let mut cell = vec![0usize; n];
    let total = len.checked_pow(n as u32).unwrap_or(0);
    for code in 0..total {
        let mut c = code;
        for slot in cell.iter_mut() {
            *slot = c % len;
            c /= len;
        }
        if cell.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        for perm in &perms {
            // step k moves coordinate perm[k]; every vertex must stay ordered
            let mut p = cell.clone();
            let mut ok = true;
            for &j in perm {
                p[j] += 1;
                if p.windows(2).any(|w| w[0] > w[1]) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let mut jump_step = vec![0usize; n];
            for (k, &j) in perm.iter().enumerate() {
                jump_step[j] = k + 1;
            }
            let tuple: Vec<SimplexKey> = (0..n)
                .map(|j| {
                    let map = (0..=n).map(|t| usize::from(t >= jump_step[j])).collect();
                    SimplexKey::from_parts(1, path.edges[cell[j]], map)
                })
                .collect();
            let key = pf.power.lookup(&tuple)?;
            if key.is_nondegenerate() {
                chain.add_term(key.base(), &q(staircase_sign(n, perm, signs)));
            }
        }
    }
    Ok(StaircaseChain {
        path: path.clone(),
        n,
        chain,
    })
}

/// Pulls a level-(n-1) chain into level n by inserting the pinned vertex as
/// the first (retained = first) or last (retained = last) component.
pub fn embed_prev(prev: &PairFamily, cur: &PairFamily, chain: &Chain) -> Result<Chain, BeilinsonError> {
    if prev.n + 1 != cur.n || prev.basepoints() != cur.basepoints() {
        return Err(BeilinsonError::LevelMismatch {
            upper: cur.n,
            lower: prev.n,
        });
    }
    let d = chain.degree();
    let mut out = Chain::zero(d);
    for (&id, c) in chain.terms() {
        let key = embed_simplex(prev, cur, d, id)?;
        if key.is_nondegenerate() {
            out.add_term(key.base(), c);
        }
    }
    Ok(out)
}

fn embed_simplex(prev: &PairFamily, cur: &PairFamily, d: usize, id: usize) -> Result<SimplexKey, BeilinsonError> {
    let mut tuple = prev.power.components(d, id).to_vec();
    match cur.retained {
        Retained::First => tuple.insert(0, SimplexKey::totally_degenerate(cur.x, d)),
        Retained::Last => tuple.push(SimplexKey::totally_degenerate(cur.y, d)),
    }
    Ok(cur.power.lookup(&tuple)?)
}

/// Checks that the pinned-coordinate embedding is a bijection from the
/// level-(n-1) pair onto `(Y_retained, A)` in degrees up to `n`.
pub fn check_identification(prev: &PairFamily, cur: &PairFamily) -> Result<bool, BeilinsonError> {
    for d in 0..=cur.n {
        let mut image = vec![false; cur.set().count(d)];
        for id in 0..prev.set().count(d) {
            let key = embed_simplex(prev, cur, d, id)?;
            if !key.is_nondegenerate() || image[key.base()] {
                return Ok(false);
            }
            image[key.base()] = true;
            if prev.y_mask.contains(d, id) != cur.a_mask.contains(d, key.base()) {
                return Ok(false);
            }
        }
        let kept = cur.retained_part();
        if (0..image.len()).any(|i| image[i] != kept.contains(d, i)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A pair family with its relative complex and `H_n(X^n, Y^(n))`.
#[derive(Debug, Clone)]
pub struct Level {
    pub family: PairFamily,
    pub homology: HomologySpace,
    pub signs: StaircaseSigns,
}

impl Level {
    pub fn build(
        base: &FiniteSimplicialSet,
        x: usize,
        y: usize,
        n: usize,
        retained: Retained,
        guard: &ResourceGuard,
        signs: StaircaseSigns,
    ) -> Result<Self, BeilinsonError> {
        let family = build_pair_family(base, x, y, n, retained, guard)?;
        let complex = Arc::new(ChainComplex::new(family.set(), None, Some(family.y_mask()), n + 1)?);
        let homology = homology_space(&complex, n)?;
        Ok(Level {
            family,
            homology,
            signs,
        })
    }

    pub fn n(&self) -> usize {
        self.family.n
    }

    pub fn dimension(&self) -> usize {
        self.homology.dimension()
    }

    pub fn staircase(&self, path: &EdgePath) -> Result<StaircaseChain, BeilinsonError> {
        staircase_chain(&self.family, path, self.signs)
    }
}

/// Class of the staircase cycle of `path` in `H_n(X^n, Y^(n))`.
pub fn tau(level: &Level, path: &EdgePath) -> Result<QVector, BeilinsonError> {
    let sc = level.staircase(path)?;
    match level.homology.coords(&sc.chain) {
        Err(HomologyError::NotACycle) => Err(BeilinsonError::NotRelativeCycle { n: level.n() }),
        other => Ok(other?),
    }
}

/// `τ` of a rational combination of paths.
pub fn tau_paths(level: &Level, combo: &[(EdgePath, Rational)]) -> Result<QVector, BeilinsonError> {
    let mut acc = zero_vector(level.dimension());
    for (path, c) in combo {
        for (a, b) in acc.iter_mut().zip(tau(level, path)?) {
            *a += c * b;
        }
    }
    Ok(acc)
}

/// Paths realizing a word (through the reference path), expanding inverse
/// letters that have no edge of their own.
pub fn realize_word(setup: &GroupoidSetup, w: &Word, n: usize) -> Option<Vec<(EdgePath, Rational)>> {
    if let Some(p) = setup.realize(w) {
        return Some(vec![(p, Rational::one())]);
    }
    positive_expansion(w, n)
        .into_iter()
        .map(|(pw, c)| setup.realize(&pw).map(|p| (p, c)))
        .collect()
}

/// Matrix of `τ^(n)` in the Magnus monomial basis.
pub fn tau_matrix(level: &Level, setup: &GroupoidSetup) -> Result<QMatrix, BeilinsonError> {
    let n = level.n();
    let basis = monomial_basis(setup.rank(), n);
    if setup.realizes_generators() {
        let columns: Vec<QVector> = basis
            .par_iter()
            .map(|m| {
                let combo: Vec<(EdgePath, Rational)> = basis_lift(m)
                    .into_iter()
                    .map(|(w, c)| (setup.realize(&w).expect("positive words are realizable"), c))
                    .collect();
                tau_paths(level, &combo)
            })
            .collect::<Result<_, _>>()?;
        return Ok(QMatrix::from_columns(level.dimension(), &columns)?);
    }
    tau_matrix_from_walks(level, setup, basis.len())
}

/// Fallback when some free generator has no forward loop: collect forward
/// walks from `x` to `y` until their Magnus images span the algebra, then
/// solve for the matrix.
fn tau_matrix_from_walks(level: &Level, setup: &GroupoidSetup, dim: usize) -> Result<QMatrix, BeilinsonError> {
    const MAX_WALKS: usize = 200_000;
    let n = level.n();
    let base = level.family.base();
    let (x, y) = level.family.basepoints();
    let ends: Vec<(usize, usize)> = (0..base.count(1))
        .map(|e| base.edge_endpoints(e))
        .collect::<Result<_, _>>()?;
    let mut chosen_paths: Vec<EdgePath> = Vec::new();
    let mut chosen_vectors: Vec<QVector> = Vec::new();
    let mut frontier = vec![EdgePath::constant(x)];
    let mut explored = 0;
    while chosen_vectors.len() < dim && !frontier.is_empty() && explored < MAX_WALKS {
        let mut next = Vec::new();
        for walk in frontier {
            explored += 1;
            let end = walk.end(base)?;
            if end == y {
                let v = setup.groupoid_class(base, &walk, n)?.to_vector(setup.rank())?;
                let mut trial = chosen_vectors.clone();
                trial.push(v);
                if QMatrix::from_columns(dim, &trial)?.rank() == trial.len() {
                    chosen_vectors = trial;
                    chosen_paths.push(walk.clone());
                }
            }
            for (e, &(a, _)) in ends.iter().enumerate() {
                if a == end {
                    let mut steps = walk.edges.clone();
                    steps.push(e);
                    next.push(EdgePath::new(x, steps));
                }
            }
        }
        frontier = next;
    }
    if chosen_vectors.len() < dim {
        return Err(BeilinsonError::Unrealizable(n));
    }
    let m = QMatrix::from_columns(dim, &chosen_vectors)?;
    let h_cols: Vec<QVector> = chosen_paths
        .par_iter()
        .map(|p| tau(level, p))
        .collect::<Result<_, _>>()?;
    let h = QMatrix::from_columns(level.dimension(), &h_cols)?;
    Ok(h.mul(&m.inverse()?)?)
}

/// Outcome of the rank contract for `τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauRank {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub expected_rank: usize,
    /// With equal base points, whether the kernel is the span of the unit.
    pub kernel_is_unit: bool,
    pub pass: bool,
}

pub fn check_tau_rank(t: &QMatrix, basepoints_equal: bool) -> TauRank {
    let rank = t.rank();
    let cols = t.cols();
    let (expected_rank, kernel_is_unit) = if basepoints_equal {
        let kernel = t.kernel_basis();
        let unit_only = kernel.len() == 1 && kernel[0].iter().skip(1).all(Zero::is_zero) && !kernel[0][0].is_zero();
        (cols.saturating_sub(1), unit_only)
    } else {
        (cols, true)
    };
    TauRank {
        rows: t.rows(),
        cols,
        rank,
        expected_rank,
        kernel_is_unit,
        pass: rank == expected_rank && kernel_is_unit && t.rows() == expected_rank,
    }
}

/// `κ_n` with the data it was assembled from.
#[derive(Debug, Clone)]
pub struct Transition {
    pub n: usize,
    pub connecting: ConnectingMorphism,
    pub excision: QMatrix,
    pub kappa: QMatrix,
    /// One line per representative of `H_n(X^n, Y^(n))`.
    pub trace: Vec<String>,
}

/// The excision map `g_{n-1} : H_{n-1}(X^{n-1}, Y^(n-1)) → H_{n-1}(Y^(n), Z^(n))`,
/// with the target space it is expressed in.
pub fn excision_iso(prev: &Level, cur: &Level) -> Result<(QMatrix, HomologySpace), BeilinsonError> {
    let n = cur.n();
    if n == 0 {
        return Err(BeilinsonError::LevelMismatch { upper: 0, lower: 0 });
    }
    let complex = Arc::new(ChainComplex::new(
        cur.family.set(),
        Some(cur.family.y_mask()),
        Some(cur.family.z_mask()),
        n,
    )?);
    let target = homology_space(&complex, n - 1)?;
    let g = excision_between(prev, cur, &target)?;
    Ok((g, target))
}

fn excision_between(prev: &Level, cur: &Level, target: &HomologySpace) -> Result<QMatrix, BeilinsonError> {
    let g = induced_map(&prev.homology, target, |c| {
        embed_prev(&prev.family, &cur.family, c).map_err(|e| match e {
            BeilinsonError::Homology(h) => h,
            BeilinsonError::Sset(s) => HomologyError::Sset(s),
            _ => HomologyError::NotACycle,
        })
    })?;
    if g.rows() != g.cols() || g.rank() != g.rows() {
        return Err(BeilinsonError::ExcisionNotInvertible {
            n: cur.n(),
            rows: g.rows(),
            cols: g.cols(),
            rank: g.rank(),
        });
    }
    Ok(g)
}

/// `κ_n = g_{n-1}^{-1} ∘ δ` for the triple `Z^(n) ⊂ Y^(n) ⊂ X^n`.
pub fn kappa(prev: &Level, cur: &Level) -> Result<Transition, BeilinsonError> {
    let n = cur.n();
    if n == 0 || prev.n() + 1 != n || prev.family.basepoints() != cur.family.basepoints() {
        return Err(BeilinsonError::LevelMismatch {
            upper: n,
            lower: prev.n(),
        });
    }
    let set = cur.family.set();
    let connecting = connecting_triple(set, cur.family.y_mask(), cur.family.z_mask(), n)?;
    let excision = excision_between(prev, cur, &connecting.target)?;
    // δ's source is computed afresh; re-express it in the level's basis.
    let change = crate::homology::inclusion_map(&cur.homology, &connecting.source)?;
    let delta = connecting.matrix.mul(&change)?;
    let kappa = excision.inverse()?.mul(&delta)?;
    let trace = (0..cur.dimension())
        .map(|i| {
            let rep = cur.homology.representative_chain(i);
            let boundary = set.boundary(&rep).map(|b| b.len()).unwrap_or(0);
            format!(
                "rep {i}: {} terms, boundary {} terms, delta {}, kappa {}",
                rep.len(),
                boundary,
                fmt_vector(&delta.column(i)),
                fmt_vector(&kappa.column(i)),
            )
        })
        .collect();
    Ok(Transition {
        n,
        connecting,
        excision,
        kappa,
        trace,
    })
}

pub fn fmt_vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(crate::exactla::format_rational).collect();
    format!("[{}]", parts.join(", "))
}

/// How the two sides of the square compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdVerdict {
    Exact,
    /// Equal after multiplying one side by -1.
    UpToSign,
    Mismatch,
}

impl CdVerdict {
    fn of(lhs: &[Rational], rhs: &[Rational]) -> Self {
        if lhs == rhs {
            CdVerdict::Exact
        } else if lhs.iter().zip(rhs).all(|(a, b)| *a == -b) {
            CdVerdict::UpToSign
        } else {
            CdVerdict::Mismatch
        }
    }

    fn combine(self, other: CdVerdict) -> CdVerdict {
        match (self, other) {
            (CdVerdict::Mismatch, _) | (_, CdVerdict::Mismatch) => CdVerdict::Mismatch,
            (CdVerdict::Exact, CdVerdict::Exact) => CdVerdict::Exact,
            (CdVerdict::UpToSign, CdVerdict::UpToSign) => CdVerdict::UpToSign,
            _ => CdVerdict::Mismatch,
        }
    }
}

impl fmt::Display for CdVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CdVerdict::Exact => "exact",
            CdVerdict::UpToSign => "up-to-sign",
            CdVerdict::Mismatch => "mismatch",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdRow {
    pub label: String,
    pub lhs: QVector,
    pub rhs: QVector,
    pub verdict: CdVerdict,
}

#[derive(Debug, Clone)]
pub struct CdReport {
    pub n: usize,
    pub retained: Retained,
    pub rows: Vec<CdRow>,
    pub verdict: CdVerdict,
}

impl CdReport {
    pub fn exact(&self) -> bool {
        self.verdict == CdVerdict::Exact
    }
}

/// Matrix of the projection from level `n` to level `n - 1` in the monomial bases.
pub fn projection_matrix(r: usize, n: usize) -> QMatrix {
    let rows = algebra_dim(r, n - 1);
    let mut m = QMatrix::zeros(rows, algebra_dim(r, n));
    for i in 0..rows {
        m.set(i, i, Rational::one());
    }
    m
}

/// Compares `κ_n ∘ τ^(n)` with `τ^(n-1) ∘ proj` on every basis monomial and
/// on each given word.
pub fn verify_cd(
    prev: &Level,
    cur: &Level,
    transition: &Transition,
    setup: &GroupoidSetup,
    words: &[Word],
) -> Result<CdReport, BeilinsonError> {
    let n = cur.n();
    let r = setup.rank();
    let t_cur = tau_matrix(cur, setup)?;
    let t_prev = tau_matrix(prev, setup)?;
    let lhs = transition.kappa.mul(&t_cur)?;
    let rhs = t_prev.mul(&projection_matrix(r, n))?;
    let mut rows = Vec::new();
    for (i, m) in monomial_basis(r, n).iter().enumerate() {
        let (l, rr) = (lhs.column(i), rhs.column(i));
        rows.push(CdRow {
            label: crate::grpalg::format_monomial(m),
            verdict: CdVerdict::of(&l, &rr),
            lhs: l,
            rhs: rr,
        });
    }
    for w in words {
        w.check_rank(r)?;
        let (l, rr) = match realize_word(setup, w, n) {
            Some(paths) => (
                transition.kappa.mul_vec(&tau_paths(cur, &paths)?)?,
                tau_paths(prev, &paths)?,
            ),
            None => {
                let a = magnus(w, n).to_vector(r)?;
                let b = magnus(w, n - 1).to_vector(r)?;
                (lhs.mul_vec(&a)?, t_prev.mul_vec(&b)?)
            }
        };
        rows.push(CdRow {
            label: w.to_string(),
            verdict: CdVerdict::of(&l, &rr),
            lhs: l,
            rhs: rr,
        });
    }
    let nonzero = rows.iter().any(|row| row.lhs.iter().any(|v| !v.is_zero()));
    let verdict = rows
        .iter()
        .map(|row| match row.verdict {
            // a zero row is consistent with either sign
            CdVerdict::Exact if row.lhs.iter().all(Zero::is_zero) => None,
            v => Some(v),
        })
        .fold(None, |acc: Option<CdVerdict>, v| match (acc, v) {
            (a, None) => a,
            (None, Some(v)) => Some(v),
            (Some(a), Some(v)) => Some(a.combine(v)),
        })
        .unwrap_or(if nonzero { CdVerdict::Mismatch } else { CdVerdict::Exact });
    Ok(CdReport {
        n,
        retained: cur.family.retained,
        rows,
        verdict,
    })
}

/// `(g_1 - 1) ... (g_k - 1) · u` for monomial `m = (g_1, ..., g_k)`, as a
/// combination of positive words; the loop factor is traversed first.
pub fn ideal_element(m: &[usize], u: &Word) -> Vec<(Word, Rational)> {
    basis_lift(m)
        .into_iter()
        .map(|(w, c)| (w.concat(u), c))
        .collect()
}

/// `τ^(n)` of a combination of words.
pub fn tau_words(level: &Level, setup: &GroupoidSetup, combo: &[(Word, Rational)]) -> Result<QVector, BeilinsonError> {
    let mut paths: HashMap<Vec<usize>, (EdgePath, Rational)> = HashMap::new();
    for (w, c) in combo {
        let realized = realize_word(setup, w, level.n()).ok_or(BeilinsonError::Unrealizable(level.n()))?;
        for (p, pc) in realized {
            let entry = paths
                .entry(p.edges.clone())
                .or_insert_with(|| (p.clone(), Rational::zero()));
            entry.1 += c * &pc;
        }
    }
    let mut combo: Vec<(EdgePath, Rational)> = paths.into_values().collect();
    combo.sort_by(|a, b| a.0.edges.cmp(&b.0.edges));
    tau_paths(level, &combo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::is_zero_vector;
    use crate::sset::{standard_model, Model};

    fn levels(model: &Model, x: usize, y: usize, top: usize, retained: Retained) -> (FiniteSimplicialSet, Vec<Level>) {
        let base = standard_model(model).unwrap();
        let ls = (0..=top)
            .map(|n| {
                Level::build(&base, x, y, n, retained, &ResourceGuard::default(), StaircaseSigns::Standard).unwrap()
            })
            .collect();
        (base, ls)
    }

    #[test]
    fn level_zero_pairs() {
        let base = standard_model(&Model::TwoVertexCircle).unwrap();
        let g = ResourceGuard::default();
        let l = Level::build(&base, 0, 1, 0, Retained::First, &g, StaircaseSigns::Standard).unwrap();
        assert_eq!(l.dimension(), 1);
        let l = Level::build(&base, 0, 0, 0, Retained::First, &g, StaircaseSigns::Standard).unwrap();
        assert_eq!(l.dimension(), 0);
    }

    #[test]
    fn torus_level_has_dimension_two() {
        let (_, ls) = levels(&Model::Wedge(1), 0, 0, 2, Retained::First);
        assert_eq!(ls[2].dimension(), 2);
    }

    #[test]
    fn masks_are_face_closed() {
        let (_, ls) = levels(&Model::TwoVertexCircle, 0, 1, 3, Retained::Last);
        for l in &ls {
            let s = l.family.set();
            for m in l.family.parts() {
                m.check_face_closed(s).unwrap();
            }
            l.family.z_mask().check_face_closed(s).unwrap();
            l.family.a_mask().check_face_closed(s).unwrap();
            assert!(l.family.z_mask().is_subset_of(l.family.y_mask()));
        }
    }

    #[test]
    fn staircase_n1_is_sum_of_edges() {
        let (base, ls) = levels(&Model::TwoVertexCircle, 0, 1, 1, Retained::First);
        let path = EdgePath::new(0, vec![0, 1, 0]);
        let sc = ls[1].staircase(&path).unwrap();
        // a twice, b once
        assert_eq!(sc.chain.len(), 2);
        let id_a = ls[1].family.power().id_of(&[SimplexKey::nondegenerate(1, 0)]).unwrap();
        assert_eq!(sc.chain.coefficient(id_a), q(2));
        assert!(sc.boundary_in_y(&ls[1].family).unwrap());
        let _ = base;
    }

    #[test]
    fn staircase_n2_single_simplex() {
        let (base, ls) = levels(&Model::Wedge(1), 0, 0, 2, Retained::First);
        let pf = &ls[2].family;
        let sc = ls[2].staircase(&EdgePath::new(0, vec![0])).unwrap();
        assert_eq!(sc.chain.len(), 1);
        let (&id, c) = sc.chain.terms().iter().next().unwrap();
        assert_eq!(*c, q(1));
        let e = SimplexKey::nondegenerate(1, 0);
        assert_eq!(pf.power().components(2, id), &[e.degenerate(0), e.degenerate(1)]);
        // deleting vertex i of (0,0) (0,1) (1,1) lands in Y_{2-i}
        for i in 0..=2 {
            let f = pf.set().nondeg_face(2, id, i).unwrap();
            assert!(pf.parts()[2 - i].contains_key(f), "face {i}");
        }
        let _ = base;
    }

    #[test]
    fn staircase_n2_length_two_signs() {
        let (_, ls) = levels(&Model::Wedge(2), 0, 0, 2, Retained::First);
        let pf = &ls[2].family;
        let sc = ls[2].staircase(&EdgePath::new(0, vec![0, 1])).unwrap();
        assert_eq!(sc.chain.len(), 4);
        let e1 = SimplexKey::nondegenerate(1, 0);
        let e2 = SimplexKey::nondegenerate(1, 1);
        let sign = |a: &SimplexKey, b: &SimplexKey| sc.chain.coefficient(pf.power().id_of(&[a.clone(), b.clone()]).unwrap());
        // cells (0,0), (0,1) twice, (1,1)
        assert_eq!(sign(&e1.degenerate(0), &e1.degenerate(1)), q(1));
        assert_eq!(sign(&e1.degenerate(0), &e2.degenerate(1)), q(1));
        assert_eq!(sign(&e1.degenerate(1), &e2.degenerate(0)), q(-1));
        assert_eq!(sign(&e2.degenerate(0), &e2.degenerate(1)), q(1));
        assert!(sc.boundary_in_y(pf).unwrap());
    }

    #[test]
    fn staircase_rejects_wrong_endpoints() {
        let (_, ls) = levels(&Model::TwoVertexCircle, 0, 1, 1, Retained::First);
        assert!(matches!(
            ls[1].staircase(&EdgePath::new(0, vec![0, 1])),
            Err(BeilinsonError::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn constant_path_has_zero_class() {
        let (_, ls) = levels(&Model::Wedge(1), 0, 0, 3, Retained::First);
        for l in &ls[1..] {
            assert!(is_zero_vector(&tau(l, &EdgePath::constant(0)).unwrap()));
        }
    }

    #[test]
    fn tau_matrix_shapes() {
        let m = Model::Wedge(1);
        let (base, ls) = levels(&m, 0, 0, 1, Retained::First);
        let setup = GroupoidSetup::for_model(&base, &m, 0, 0).unwrap();
        let t = tau_matrix(&ls[1], &setup).unwrap();
        assert_eq!((t.rows(), t.cols()), (1, 2));
        assert!(check_tau_rank(&t, true).pass);

        let m = Model::TwoVertexCircle;
        let (base, ls) = levels(&m, 0, 1, 1, Retained::First);
        let setup = GroupoidSetup::for_model(&base, &m, 0, 1).unwrap();
        let t = tau_matrix(&ls[1], &setup).unwrap();
        assert_eq!((t.rows(), t.cols()), (2, 2));
        assert!(check_tau_rank(&t, false).pass);
    }

    #[test]
    fn identification_is_bijective() {
        for retained in [Retained::First, Retained::Last] {
            let (_, ls) = levels(&Model::TwoVertexCircle, 0, 1, 2, retained);
            assert!(check_identification(&ls[0].family, &ls[1].family).unwrap());
            assert!(check_identification(&ls[1].family, &ls[2].family).unwrap());
            let (_, ls) = levels(&Model::Wedge(1), 0, 0, 2, retained);
            assert!(check_identification(&ls[1].family, &ls[2].family).unwrap());
        }
    }

    #[test]
    fn excision_examples() {
        let (_, ls) = levels(&Model::TwoVertexCircle, 0, 1, 2, Retained::First);
        let (g, _) = excision_iso(&ls[0], &ls[1]).unwrap();
        assert_eq!(g, QMatrix::identity(1));
        let (g, _) = excision_iso(&ls[1], &ls[2]).unwrap();
        assert_eq!(g.rows(), 2);
        let (_, ls) = levels(&Model::Wedge(1), 0, 0, 2, Retained::First);
        let (g, _) = excision_iso(&ls[1], &ls[2]).unwrap();
        assert_eq!((g.rows(), g.rank()), (1, 1));
    }

    #[test]
    fn kappa_level_one() {
        let (_, ls) = levels(&Model::Wedge(1), 0, 0, 1, Retained::First);
        let t = kappa(&ls[0], &ls[1]).unwrap();
        assert_eq!((t.kappa.rows(), t.kappa.cols()), (0, 1));

        let (_, ls) = levels(&Model::TwoVertexCircle, 0, 1, 1, Retained::First);
        let t = kappa(&ls[0], &ls[1]).unwrap();
        assert_eq!((t.kappa.rows(), t.kappa.cols()), (1, 2));
        // ∂a = y - x and ∂b = x - y; modulo Z = {y} these are -[x] and [x].
        let a = tau(&ls[1], &EdgePath::new(0, vec![0])).unwrap();
        let b_loop = tau(&ls[1], &EdgePath::new(0, vec![0, 1, 0])).unwrap();
        let ka = t.kappa.mul_vec(&a).unwrap();
        assert_eq!(ka, vec![q(-1)]);
        assert_eq!(ka, tau(&ls[0], &EdgePath::new(0, vec![0])).unwrap());
        assert_eq!(t.kappa.mul_vec(&b_loop).unwrap(), ka);
        assert_eq!(t.trace.len(), 2);
    }

    #[test]
    fn diagram_commutes_small_models() {
        let words: Vec<Word> = ["1", "g1", "g1 g1"].iter().map(|s| s.parse().unwrap()).collect();
        for (m, x, y, top) in [
            (Model::Wedge(1), 0, 0, 3),
            (Model::TwoVertexCircle, 0, 1, 2),
            (Model::Wedge(2), 0, 0, 2),
        ] {
            let (base, ls) = levels(&m, x, y, top, Retained::First);
            let setup = GroupoidSetup::for_model(&base, &m, x, y).unwrap();
            for n in 1..=top {
                let t = kappa(&ls[n - 1], &ls[n]).unwrap();
                let rep = verify_cd(&ls[n - 1], &ls[n], &t, &setup, &words).unwrap();
                assert!(rep.exact(), "{m:?} n={n}: {:?}", rep.rows);
            }
        }
    }

    #[test]
    fn retained_last_commutes_up_to_sign() {
        let m = Model::Wedge(1);
        let (base, ls) = levels(&m, 0, 0, 3, Retained::Last);
        let setup = GroupoidSetup::for_model(&base, &m, 0, 0).unwrap();
        for n in 1..=3 {
            let t = kappa(&ls[n - 1], &ls[n]).unwrap();
            let rep = verify_cd(&ls[n - 1], &ls[n], &t, &setup, &[]).unwrap();
            let expected = if n % 2 == 0 { CdVerdict::Exact } else { CdVerdict::UpToSign };
            // level 1 on a loop maps into zero, so any sign passes
            if n > 1 {
                assert_eq!(rep.verdict, expected, "n={n}");
            } else {
                assert_ne!(rep.verdict, CdVerdict::Mismatch);
            }
        }
    }

    #[test]
    fn corrupted_signs_break_the_cycle_property() {
        let base = standard_model(&Model::Wedge(2)).unwrap();
        let l = Level::build(&base, 0, 0, 2, Retained::First, &ResourceGuard::default(), StaircaseSigns::Corrupted)
            .unwrap();
        // the interior face (e1, e2) no longer cancels
        let sc = l.staircase(&EdgePath::new(0, vec![0, 1])).unwrap();
        assert!(!sc.boundary_in_y(&l.family).unwrap());
    }

    #[test]
    fn ideal_elements_vanish() {
        let m = Model::Wedge(2);
        let (base, ls) = levels(&m, 0, 0, 2, Retained::First);
        let setup = GroupoidSetup::for_model(&base, &m, 0, 0).unwrap();
        let u: Word = "g2".parse().unwrap();
        for n in 1..=2 {
            let elem = ideal_element(&vec![1; n + 1], &u);
            assert!(is_zero_vector(&tau_words(&ls[n], &setup, &elem).unwrap()));
        }
    }

    #[test]
    fn backtrack_does_not_change_tau() {
        let m = Model::WedgeInv(1);
        let (_, ls) = levels(&m, 0, 0, 2, Retained::First);
        for l in &ls[1..] {
            let plain = tau(l, &EdgePath::new(0, vec![0])).unwrap();
            let detour = tau(l, &EdgePath::new(0, vec![0, 0, 1])).unwrap();
            assert_eq!(plain, detour);
        }
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[2, 1, 0]), -1);
        assert_eq!(permutations(3).len(), 6);
    }
}
