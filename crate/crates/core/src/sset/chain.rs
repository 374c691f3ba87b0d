use std::collections::BTreeMap;

use num_traits::Zero;

use super::{FiniteSimplicialSet, SubsetMask};
use crate::exactla::Rational;
use crate::homology::{ChainComplex, HomologyError};

/// A formal rational combination of nondegenerate simplices of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    degree: usize,
    terms: BTreeMap<usize, Rational>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(degree: usize, id: usize, coeff: Rational) -> Self {
        let mut c = Self::zero(degree);
        c.add_term(id, &coeff);
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<usize, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, id: usize) -> Rational {
        self.terms.get(&id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, id: usize, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(id).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&id);
        }
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, other: &Chain, factor: &Rational) {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        for (&id, c) in &other.terms {
            self.add_term(id, &(c * factor));
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Chain {
        let mut out = Chain::zero(self.degree);
        out.add_scaled(self, factor);
        out
    }

    /// Terms whose simplex is not in `mask`.
    pub fn outside<'a>(&'a self, mask: &'a SubsetMask) -> impl Iterator<Item = (usize, &'a Rational)> + 'a {
        let d = self.degree;
        self.terms
            .iter()
            .filter(move |(&id, _)| !mask.contains(d, id))
            .map(|(&id, c)| (id, c))
    }

    pub fn supported_in(&self, mask: &SubsetMask) -> bool {
        self.outside(mask).next().is_none()
    }
}

/// Normalized chains of `set` relative to `rel`, built through degree `top`.
pub fn normalized_chain_complex(
    set: &FiniteSimplicialSet,
    rel: Option<&SubsetMask>,
    top: usize,
) -> Result<ChainComplex, HomologyError> {
    ChainComplex::new(set, None, rel, top)
}
