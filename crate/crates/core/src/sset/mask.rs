use super::{FiniteSimplicialSet, PowerSet, SimplexKey, SsetError};

/// A simplicial subset, recorded as membership of nondegenerate simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetMask {
    parent: u64,
    members: Vec<Vec<bool>>,
}

impl SubsetMask {
    pub fn from_fn(set: &FiniteSimplicialSet, mut pred: impl FnMut(usize, usize) -> bool) -> Self {
        let members = (0..=set.cap())
            .map(|d| (0..set.count(d)).map(|id| pred(d, id)).collect())
            .collect();
        SubsetMask {
            parent: set.uid(),
            members,
        }
    }

    pub fn full(set: &FiniteSimplicialSet) -> Self {
        Self::from_fn(set, |_, _| true)
    }

    pub fn empty(set: &FiniteSimplicialSet) -> Self {
        Self::from_fn(set, |_, _| false)
    }

    pub fn parent(&self) -> u64 {
        self.parent
    }

    pub fn belongs_to(&self, set: &FiniteSimplicialSet) -> bool {
        self.parent == set.uid()
    }

    pub fn contains(&self, d: usize, id: usize) -> bool {
        self.members
            .get(d)
            .and_then(|m| m.get(id))
            .copied()
            .unwrap_or(false)
    }

    /// Membership of an arbitrary simplex: a degenerate simplex lies in the
    /// subset exactly when its nondegenerate base does.
    pub fn contains_key(&self, key: &SimplexKey) -> bool {
        self.contains(key.base_dim(), key.base())
    }

    pub fn count(&self, d: usize) -> usize {
        self.members
            .get(d)
            .map_or(0, |m| m.iter().filter(|&&b| b).count())
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..self.members.len()).map(|d| self.count(d)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.members.iter().flatten().all(|&b| !b)
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        self.parent == other.parent
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(a, b)| a.iter().zip(b).all(|(&x, &y)| !x || y))
    }

    pub fn members(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        self.members
            .get(d)
            .into_iter()
            .flat_map(|m| m.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    fn combine(&self, other: &SubsetMask, op: impl Fn(bool, bool) -> bool) -> Result<Self, SsetError> {
        if self.parent != other.parent {
            return Err(SsetError::ParentMismatch);
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect())
            .collect();
        Ok(SubsetMask {
            parent: self.parent,
            members,
        })
    }

    pub fn union(&self, other: &SubsetMask) -> Result<Self, SsetError> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &SubsetMask) -> Result<Self, SsetError> {
        self.combine(other, |a, b| a && b)
    }

    /// Verifies that every face of a member normalizes into the subset.
    pub fn check_face_closed(&self, set: &FiniteSimplicialSet) -> Result<(), SsetError> {
        if !self.belongs_to(set) {
            return Err(SsetError::ParentMismatch);
        }
        for d in 1..=set.cap() {
            for id in self.members(d) {
                for i in 0..=d {
                    if !self.contains_key(set.nondeg_face(d, id, i)?) {
                        return Err(SsetError::NotFaceClosed { degree: d, id });
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn union_subsets(masks: &[&SubsetMask]) -> Result<SubsetMask, SsetError> {
    let (first, rest) = masks
        .split_first()
        .ok_or_else(|| SsetError::InvalidParameter("empty subset list".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, m| acc.union(m))
}

pub fn intersect_subsets(masks: &[&SubsetMask]) -> Result<SubsetMask, SsetError> {
    let (first, rest) = masks
        .split_first()
        .ok_or_else(|| SsetError::InvalidParameter("empty subset list".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, m| acc.intersect(m))
}

/// Coordinate conditions on a power `X^n`. Components are numbered `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Components `i` and `j` coincide as simplices of `X`.
    Eq(usize, usize),
    /// Component `i` is the totally degenerate simplex on vertex `v`.
    PinnedTo(usize, usize),
}

pub fn coordinate_constraint_subset(
    power: &PowerSet,
    base: &FiniteSimplicialSet,
    constraint: Constraint,
) -> Result<SubsetMask, SsetError> {
    let n = power.factors();
    let check = |c: usize| {
        if c == 0 || c > n {
            Err(SsetError::ComponentOutOfRange {
                component: c,
                factors: n,
            })
        } else {
            Ok(c - 1)
        }
    };
    if power.base_uid() != base.uid() {
        return Err(SsetError::ParentMismatch);
    }
    let set = power.set();
    let mask = match constraint {
        Constraint::Eq(i, j) => {
            let (i, j) = (check(i)?, check(j)?);
            SubsetMask::from_fn(set, |d, id| {
                let comps = power.components(d, id);
                comps[i] == comps[j]
            })
        }
        Constraint::PinnedTo(i, v) => {
            let i = check(i)?;
            if v >= base.vertex_count() {
                return Err(SsetError::NotAVertex(v));
            }
            SubsetMask::from_fn(set, |d, id| {
                let c = &power.components(d, id)[i];
                c.is_vertex_like() && c.base() == v
            })
        }
    };
    mask.check_face_closed(set)?;
    Ok(mask)
}
