use super::{FiniteSimplicialSet, SsetError};

/// A path made of nondegenerate edges, each traversed from `d_1` to `d_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePath {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl EdgePath {
    pub fn constant(v: usize) -> Self {
        EdgePath {
            start: v,
            edges: Vec::new(),
        }
    }

    pub fn new(start: usize, edges: Vec<usize>) -> Self {
        EdgePath { start, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The vertex sequence `gamma(0), ..., gamma(L)`, checking that
    /// consecutive edges meet.
    pub fn vertices(&self, x: &FiniteSimplicialSet) -> Result<Vec<usize>, SsetError> {
        if self.start >= x.vertex_count() {
            return Err(SsetError::NotAVertex(self.start));
        }
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        out.push(self.start);
        for (k, &e) in self.edges.iter().enumerate() {
            let (from, to) = x.edge_endpoints(e)?;
            let here = out[k];
            if from != here {
                return Err(SsetError::InvalidPath(format!(
                    "step {k}: edge {} starts at {}, path is at {}",
                    x.name(1, e),
                    x.name(0, from),
                    x.name(0, here)
                )));
            }
            out.push(to);
        }
        Ok(out)
    }

    pub fn end(&self, x: &FiniteSimplicialSet) -> Result<usize, SsetError> {
        Ok(*self.vertices(x)?.last().unwrap_or(&self.start))
    }

    /// Traverse `self`, then `other`.
    pub fn then(&self, other: &EdgePath) -> EdgePath {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        EdgePath {
            start: self.start,
            edges,
        }
    }

    pub fn describe(&self, x: &FiniteSimplicialSet) -> String {
        if self.edges.is_empty() {
            return format!("const({})", x.name(0, self.start));
        }
        self.edges
            .iter()
            .map(|&e| x.name(1, e))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{standard_model, Model};

    #[test]
    fn path_endpoints() {
        let x = standard_model(&Model::TwoVertexCircle).unwrap();
        let aba = EdgePath::new(0, vec![0, 1, 0]);
        assert_eq!(aba.vertices(&x).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(aba.end(&x).unwrap(), 1);
        assert!(EdgePath::new(0, vec![1]).vertices(&x).is_err());
        assert_eq!(EdgePath::constant(1).end(&x).unwrap(), 1);
        assert_eq!(aba.describe(&x), "a b a");
    }
}
