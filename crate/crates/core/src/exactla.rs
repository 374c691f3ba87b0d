//! Exact rational linear algebra.
//!
//! Every homology computation in this crate bottoms out here: boundary
//! matrices, kernels, ranks and coordinate solves are all carried out over
//! arbitrary-precision rationals, so results are exact and reproducible.
//!
//! Matrices are stored sparse, one ordered map per row. Elimination is plain
//! Gauss-Jordan with deterministic pivoting: columns left to right, and within
//! a column the smallest eligible row index.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number; always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Dense vector of rationals.
pub type QVector = Vec<Rational>;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn q_frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero_vector(len: usize) -> QVector {
    vec![Rational::zero(); len]
}

pub fn unit_vector(len: usize, index: usize) -> QVector {
    let mut v = zero_vector(len);
    v[index] = Rational::one();
    v
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("right-hand side is not in the column space")]
    NoSolution,
    #[error("vector is not in the span of the given basis")]
    NotInSpan,
    #[error("matrix is singular")]
    Singular,
}

/// Sparse matrix over the rationals. No zero entries are ever stored.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].insert(i, Rational::one());
        }
        m
    }

    /// Builds a matrix from dense rows. All rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, v) in row.into_iter().enumerate() {
                if !v.is_zero() {
                    m.data[r].insert(c, v);
                }
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| q(x)).collect())
                .collect(),
        )
    }

    /// Builds a `rows x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[QVector]) -> Result<Self, LinAlgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LinAlgError::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (r, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    m.data[r].insert(c, v.clone());
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.data[r].get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    /// Adds `v` to entry `(r, c)`, dropping the entry if it cancels.
    pub fn add_to(&mut self, r: usize, c: usize, v: &Rational) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        add_into(&mut self.data[r], c, v);
    }

    pub fn row(&self, r: usize) -> &BTreeMap<usize, Rational> {
        &self.data[r]
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn column(&self, c: usize) -> QVector {
        assert!(c < self.cols, "column out of range");
        self.data
            .iter()
            .map(|row| row.get(&c).cloned().unwrap_or_else(Rational::zero))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|r| {
                let mut row = zero_vector(self.cols);
                for (&c, v) in &self.data[r] {
                    row[c] = v.clone();
                }
                row
            })
            .collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    pub fn neg(&self) -> QMatrix {
        let mut m = self.clone();
        for row in &mut m.data {
            for v in row.values_mut() {
                *v = -v.clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for (&k, a) in row {
                for (&c, b) in &other.data[k] {
                    add_into(&mut out.data[r], c, &(a * b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<QVector, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .filter(|(&c, _)| !v[c].is_zero())
                    .fold(Rational::zero(), |acc, (&c, a)| acc + a * &v[c])
            })
            .collect())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &QMatrix) -> Result<QMatrix, LinAlgError> {
        if self.rows != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut out = self.clone();
        out.cols += other.cols;
        for (r, row) in other.data.iter().enumerate() {
            for (&c, v) in row {
                out.data[r].insert(self.cols + c, v.clone());
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, columns: &[usize]) -> QMatrix {
        let mut out = Self::zeros(self.rows, columns.len());
        for (new_c, &c) in columns.iter().enumerate() {
            for (r, row) in self.data.iter().enumerate() {
                if let Some(v) = row.get(&c) {
                    out.data[r].insert(new_c, v.clone());
                }
            }
        }
        out
    }

    /// Reduced row-echelon form together with the (strictly increasing) pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = gauss_jordan(&mut m.data, m.cols, None);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        gauss_jordan(&mut data, self.cols, None).len()
    }

    /// Basis of the null space, one vector per free column of the RREF.
    pub fn kernel_basis(&self) -> Vec<QVector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = unit_vector(self.cols, free);
                for (i, &p) in pivots.iter().enumerate() {
                    if let Some(a) = r.data[i].get(&free) {
                        v[p] = -a.clone();
                    }
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self * x = b`, free variables set to zero.
    pub fn solve(&self, b: &[Rational]) -> Result<QVector, LinAlgError> {
        LinearSolver::new(self).solve(b)
    }

    pub fn inverse(&self) -> Result<QMatrix, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let solver = LinearSolver::new(self);
        if solver.rank() != self.rows {
            return Err(LinAlgError::Singular);
        }
        let columns: Vec<QVector> = (0..self.rows)
            .map(|i| solver.solve(&unit_vector(self.rows, i)))
            .collect::<Result<_, _>>()?;
        QMatrix::from_columns(self.rows, &columns)
    }
}

/// Coefficients `c` with `v = sum c_i basis_i`, or `NotInSpan`.
pub fn coordinates_in_span(basis: &[QVector], v: &[Rational]) -> Result<QVector, LinAlgError> {
    let m = QMatrix::from_columns(v.len(), basis)?;
    m.solve(v).map_err(|e| match e {
        LinAlgError::NoSolution => LinAlgError::NotInSpan,
        other => other,
    })
}

fn add_into(row: &mut BTreeMap<usize, Rational>, c: usize, v: &Rational) {
    if v.is_zero() {
        return;
    }
    match row.get_mut(&c) {
        Some(x) => {
            *x += v;
            if x.is_zero() {
                row.remove(&c);
            }
        }
        None => {
            row.insert(c, v.clone());
        }
    }
}

#[derive(Debug, Clone)]
enum RowOp {
    Swap(usize, usize),
    Scale(usize, Rational),
    /// `target += factor * source`
    AddMul {
        target: usize,
        source: usize,
        factor: Rational,
    },
}

/// In-place Gauss-Jordan elimination. Returns pivot columns; optionally
/// records the row operations so they can be replayed on right-hand sides.
fn gauss_jordan(
    data: &mut [BTreeMap<usize, Rational>],
    cols: usize,
    mut ops: Option<&mut Vec<RowOp>>,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        if next == data.len() {
            break;
        }
        let Some(found) = (next..data.len()).find(|&r| data[r].contains_key(&c)) else {
            continue;
        };
        if found != next {
            data.swap(found, next);
            if let Some(ops) = ops.as_deref_mut() {
                ops.push(RowOp::Swap(found, next));
            }
        }
        let pivot = data[next][&c].clone();
        if !pivot.is_one() {
            let inv = pivot.recip();
            for v in data[next].values_mut() {
                *v *= &inv;
            }
            if let Some(ops) = ops.as_deref_mut() {
                ops.push(RowOp::Scale(next, inv));
            }
        }
        let pivot_row = data[next].clone();
        for r in 0..data.len() {
            if r == next {
                continue;
            }
            let Some(a) = data[r].get(&c) else { continue };
            let factor = -a.clone();
            for (&k, v) in &pivot_row {
                add_into(&mut data[r], k, &(&factor * v));
            }
            if let Some(ops) = ops.as_deref_mut() {
                ops.push(RowOp::AddMul {
                    target: r,
                    source: next,
                    factor,
                });
            }
        }
        pivots.push(c);
        next += 1;
    }
    pivots
}

/// A matrix reduced once so that many right-hand sides can be solved cheaply.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    rows: usize,
    cols: usize,
    ops: Vec<RowOp>,
    pivots: Vec<usize>,
}

impl LinearSolver {
    pub fn new(m: &QMatrix) -> Self {
        let mut data = m.data.clone();
        let mut ops = Vec::new();
        let pivots = gauss_jordan(&mut data, m.cols, Some(&mut ops));
        LinearSolver {
            rows: m.rows,
            cols: m.cols,
            ops,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn solve(&self, b: &[Rational]) -> Result<QVector, LinAlgError> {
        if b.len() != self.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let mut y = b.to_vec();
        for op in &self.ops {
            match op {
                RowOp::Swap(a, b) => y.swap(*a, *b),
                RowOp::Scale(r, f) => y[*r] *= f,
                RowOp::AddMul {
                    target,
                    source,
                    factor,
                } => {
                    if !y[*source].is_zero() {
                        let delta = factor * &y[*source];
                        y[*target] += delta;
                    }
                }
            }
        }
        if y[self.pivots.len()..].iter().any(|v| !v.is_zero()) {
            return Err(LinAlgError::NoSolution);
        }
        let mut x = zero_vector(self.cols);
        for (i, &p) in self.pivots.iter().enumerate() {
            x[p] = y[i].clone();
        }
        Ok(x)
    }
}

/// Renders a rational as `a` or `a/b`, with the sign on the numerator.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else if x.is_negative() {
        format!("-{}/{}", x.numer().abs(), x.denom())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_i64_rows(rows)
    }

    fn det(a: &[Vec<Rational>]) -> Rational {
        // Leibniz expansion; independent of the elimination code.
        let n = a.len();
        if n == 0 {
            return Rational::one();
        }
        let mut total = Rational::zero();
        let mut perm: Vec<usize> = (0..n).collect();
        permutations(&mut perm, 0, &mut |p| {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if p[i] > p[j] {
                        inversions += 1;
                    }
                }
            }
            let mut prod = if inversions % 2 == 0 { q(1) } else { q(-1) };
            for i in 0..n {
                prod *= &a[i][p[i]];
            }
            total += prod;
        });
        total
    }

    fn permutations(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permutations(p, k + 1, f);
            p.swap(k, i);
        }
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    fn minor_rank(a: &QMatrix) -> usize {
        let dense = a.to_dense();
        let max = a.rows().min(a.cols());
        for k in (1..=max).rev() {
            for rs in subsets(a.rows(), k) {
                for cs in subsets(a.cols(), k) {
                    let sub: Vec<Vec<Rational>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| dense[r][c].clone()).collect())
                        .collect();
                    if !det(&sub).is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rref_identity() {
        let (r, p) = QMatrix::identity(2).rref();
        assert_eq!(r, QMatrix::identity(2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn rref_rank_one() {
        let (r, p) = m(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rank_basic_cases() {
        assert_eq!(QMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(QMatrix::identity(5).rank(), 5);
        // d1 of the two-vertex circle: columns a: x->y, b: y->x
        assert_eq!(m(&[&[-1, 1], &[1, -1]]).rank(), 1);
    }

    #[test]
    fn kernel_cases() {
        assert!(QMatrix::identity(3).kernel_basis().is_empty());
        let k = m(&[&[1, -1]]).kernel_basis();
        assert_eq!(k, vec![vec![q(1), q(1)]]);
    }

    #[test]
    fn kernel_of_composite_boundary() {
        // Filled triangle: d2 then d1.
        let d1 = m(&[&[-1, -1, 0], &[1, 0, -1], &[0, 1, 1]]);
        let d2 = m(&[&[1], &[-1], &[1]]);
        assert!(d1.mul(&d2).unwrap().is_zero());
        for v in d1.kernel_basis() {
            assert!(is_zero_vector(&d1.mul_vec(&v).unwrap()));
        }
        assert_eq!(d1.kernel_basis().len(), 1);
    }

    #[test]
    fn solve_cases() {
        let b = vec![q(3), q_frac(-1, 2)];
        assert_eq!(QMatrix::identity(2).solve(&b).unwrap(), b);
        assert_eq!(
            m(&[&[1], &[1]]).solve(&[q(1), q(2)]),
            Err(LinAlgError::NoSolution)
        );
        assert!(matches!(
            QMatrix::identity(2).solve(&[q(1)]),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_consistent_with_augmented_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        for b in [vec![q(1), q(2), q(0)], vec![q(1), q(3), q(0)]] {
            let aug = a
                .hstack(&QMatrix::from_columns(3, std::slice::from_ref(&b)).unwrap())
                .unwrap();
            let consistent = aug.rank() == a.rank();
            assert_eq!(a.solve(&b).is_ok(), consistent);
        }
    }

    #[test]
    fn span_coordinates() {
        let basis = vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]];
        assert_eq!(
            coordinates_in_span(&basis, &basis[0]).unwrap(),
            vec![q(1), q(0)]
        );
        assert_eq!(
            coordinates_in_span(&basis, &zero_vector(3)).unwrap(),
            vec![q(0), q(0)]
        );
        let outside = vec![q(1), q(0), q(0)];
        assert_eq!(
            coordinates_in_span(&basis, &outside),
            Err(LinAlgError::NotInSpan)
        );
        let mut cols = basis.clone();
        cols.push(outside);
        assert_eq!(QMatrix::from_columns(3, &cols).unwrap().rank(), 3);
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), QMatrix::identity(2));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(LinAlgError::Singular));
    }

    #[test]
    fn rendering() {
        assert_eq!(format_rational(&q_frac(-3, 6)), "-1/2");
        assert_eq!(format_rational(&q(7)), "7");
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec((-3i64..=3, 1i64..=3), rows * cols).prop_map(move |cells| {
            let dense = cells
                .chunks(cols)
                .map(|row| row.iter().map(|&(n, d)| q_frac(n, d)).collect())
                .collect();
            QMatrix::from_rows(dense)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rank_matches_minor_rank(a in small_matrix(6, 6)) {
            prop_assert_eq!(a.rank(), minor_rank(&a));
        }

        #[test]
        fn rank_nullity(a in small_matrix(4, 7)) {
            prop_assert_eq!(a.rank() + a.kernel_basis().len(), a.cols());
            for v in a.kernel_basis() {
                prop_assert!(is_zero_vector(&a.mul_vec(&v).unwrap()));
            }
        }

        #[test]
        fn rref_idempotent(a in small_matrix(5, 4)) {
            let (r, p) = a.rref();
            let (rr, pp) = r.rref();
            prop_assert_eq!(&r, &rr);
            prop_assert_eq!(p, pp);
        }

        #[test]
        fn solve_recovers_image(a in small_matrix(5, 4), x in proptest::collection::vec(-4i64..=4, 4)) {
            let x: QVector = x.into_iter().map(q).collect();
            let b = a.mul_vec(&x).unwrap();
            let x2 = a.solve(&b).unwrap();
            prop_assert_eq!(a.mul_vec(&x2).unwrap(), b);
        }

        #[test]
        fn entry_order_does_not_matter(a in small_matrix(4, 4)) {
            let mut rebuilt = QMatrix::zeros(4, 4);
            let mut entries: Vec<_> = a.entries().map(|(r, c, v)| (r, c, v.clone())).collect();
            entries.reverse();
            for (r, c, v) in entries {
                rebuilt.set(r, c, v);
            }
            prop_assert_eq!(rebuilt.rref(), a.rref());
        }
    }
}
