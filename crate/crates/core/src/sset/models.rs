use std::collections::HashSet;

use super::{FiniteSimplicialSet, SimplexKey, SimplicialSetBuilder, SsetError};

/// The test spaces the rest of the crate is exercised on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    /// One vertex `v` and loops `e1 .. er`.
    Wedge(usize),
    /// `Wedge(r)` plus inverse loops `f_i` and 2-simplices `t_i` with
    /// `d0 t_i = f_i`, `d1 t_i = s0 v`, `d2 t_i = e_i`, so that `e_i f_i` is
    /// null-homotopic.
    WedgeInv(usize),
    /// Vertices `x`, `y`; edges `a: x -> y` and `b: y -> x`.
    TwoVertexCircle,
    /// Vertices `0 .. L` and edges `k -> k + 1`.
    IntervalChain(usize),
    CustomGraph {
        vertices: Vec<String>,
        /// `(label, from, to)`
        edges: Vec<(String, String, String)>,
    },
}

pub fn standard_model(model: &Model) -> Result<FiniteSimplicialSet, SsetError> {
    let mut b = SimplicialSetBuilder::new();
    match model {
        Model::Wedge(r) | Model::WedgeInv(r) => {
            if *r == 0 {
                return Err(SsetError::InvalidParameter("wedge rank must be positive".into()));
            }
            let v = b.add_vertex("v");
            let mut loops = Vec::with_capacity(*r);
            for i in 1..=*r {
                loops.push(b.add_edge(v, v, format!("e{i}"))?);
            }
            if matches!(model, Model::WedgeInv(_)) {
                for i in 1..=*r {
                    let f = b.add_edge(v, v, format!("f{i}"))?;
                    b.add_simplex(
                        2,
                        vec![
                            SimplexKey::nondegenerate(1, f),
                            SimplexKey::totally_degenerate(v, 1),
                            SimplexKey::nondegenerate(1, loops[i - 1]),
                        ],
                        Some(format!("t{i}")),
                    )?;
                }
            }
        }
        Model::TwoVertexCircle => {
            let x = b.add_vertex("x");
            let y = b.add_vertex("y");
            b.add_edge(x, y, "a")?;
            b.add_edge(y, x, "b")?;
        }
        Model::IntervalChain(len) => {
            if *len == 0 {
                return Err(SsetError::InvalidParameter("interval length must be positive".into()));
            }
            let vs: Vec<usize> = (0..=*len).map(|k| b.add_vertex(k.to_string())).collect();
            for k in 0..*len {
                b.add_edge(vs[k], vs[k + 1], format!("i{k}"))?;
            }
        }
        Model::CustomGraph { vertices, edges } => {
            if vertices.is_empty() {
                return Err(SsetError::MalformedGraph("no vertices".into()));
            }
            let mut seen = HashSet::new();
            for v in vertices {
                if !seen.insert(v.as_str()) {
                    return Err(SsetError::MalformedGraph(format!("duplicate vertex {v:?}")));
                }
                b.add_vertex(v.clone());
            }
            let lookup = |name: &str| {
                vertices
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| SsetError::MalformedGraph(format!("unknown vertex {name:?}")))
            };
            let mut seen_edges = HashSet::new();
            for (label, from, to) in edges {
                if !seen_edges.insert(label.as_str()) {
                    return Err(SsetError::MalformedGraph(format!("duplicate edge {label:?}")));
                }
                b.add_edge(lookup(from)?, lookup(to)?, label.clone())?;
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_counts() {
        let w1 = standard_model(&Model::Wedge(1)).unwrap();
        assert_eq!(w1.counts(), vec![1, 1]);
        assert_eq!(w1.count(2), 0);
        let wi2 = standard_model(&Model::WedgeInv(2)).unwrap();
        assert_eq!(wi2.counts(), vec![1, 4, 2]);
        let c = standard_model(&Model::TwoVertexCircle).unwrap();
        assert_eq!(c.counts(), vec![2, 2]);
        assert_eq!(c.edge_endpoints(0).unwrap(), (0, 1));
        assert_eq!(c.edge_endpoints(1).unwrap(), (1, 0));
        let i = standard_model(&Model::IntervalChain(3)).unwrap();
        assert_eq!(i.counts(), vec![4, 3]);
    }

    #[test]
    fn invalid_parameters() {
        assert!(standard_model(&Model::Wedge(0)).is_err());
        assert!(standard_model(&Model::WedgeInv(0)).is_err());
        assert!(standard_model(&Model::IntervalChain(0)).is_err());
        let bad = Model::CustomGraph {
            vertices: vec!["p".into()],
            edges: vec![("e".into(), "p".into(), "q".into())],
        };
        assert!(matches!(standard_model(&bad), Err(SsetError::MalformedGraph(_))));
        let dup = Model::CustomGraph {
            vertices: vec!["p".into(), "p".into()],
            edges: vec![],
        };
        assert!(standard_model(&dup).is_err());
    }

    #[test]
    fn wedge_inv_gadget_faces() {
        let x = standard_model(&Model::WedgeInv(1)).unwrap();
        let t = SimplexKey::nondegenerate(2, 0);
        assert_eq!(x.face(&t, 0).unwrap(), SimplexKey::nondegenerate(1, 1));
        assert_eq!(x.face(&t, 1).unwrap(), SimplexKey::totally_degenerate(0, 1));
        assert_eq!(x.face(&t, 2).unwrap(), SimplexKey::nondegenerate(1, 0));
        assert_eq!(x.label(1, 1), Some("f1"));
    }
}
