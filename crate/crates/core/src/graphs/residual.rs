use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

/// Largest connected piece left after deleting vertices and edges from a parent graph.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualGraph {
    /// Parent indices of the kept vertices, ascending.
    pub vertices: Vec<usize>,
    /// Parent indices of the kept edges, ascending.
    pub edges: Vec<usize>,
    /// The piece relabelled onto `0..vertices.len()`. Relabelling is monotone, so
    /// child edge `j` is parent edge `edges[j]`.
    pub graph: Graph,
    pub vertex_fraction: f64,
    pub edge_fraction: f64,
}

/// Keeps the edges of `kept_edges` whose endpoints both lie in `kept_vertices`, then
/// returns the largest connected component. Ties go to the component holding the
/// smallest vertex index.
pub fn maximal_connected_residual(
    g: &Graph,
    kept_vertices: &[usize],
    kept_edges: &[usize],
) -> Result<ResidualGraph, GraphError> {
    let mut vkeep = vec![false; g.n()];
    for &v in kept_vertices {
        if v >= g.n() {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: g.n(),
            });
        }
        vkeep[v] = true;
    }
    let mut ekeep: Vec<usize> = kept_edges
        .iter()
        .copied()
        .filter(|&e| {
            let (u, v) = g.edge(e);
            vkeep[u] && vkeep[v]
        })
        .collect();
    ekeep.sort_unstable();
    ekeep.dedup();

    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &e in &ekeep {
        let (u, v) = g.edge(e);
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut size = vec![0usize; g.n()];
    for v in (0..g.n()).filter(|&v| vkeep[v]) {
        let r = find(&mut parent, v);
        size[r] += 1;
    }
    // Roots are the smallest vertex of their component, so scanning upward breaks ties.
    let root = (0..g.n())
        .filter(|&v| vkeep[v] && size[v] > 0)
        .fold(None, |best: Option<usize>, v| match best {
            Some(b) if size[b] >= size[v] => Some(b),
            _ => Some(v),
        })
        .ok_or(GraphError::EmptyResidual)?;

    let vertices: Vec<usize> = (0..g.n())
        .filter(|&v| vkeep[v] && find(&mut parent, v) == root)
        .collect();
    let edges: Vec<usize> = ekeep
        .into_iter()
        .filter(|&e| find(&mut parent, g.edge(e).0) == root)
        .collect();
    let mut relabel = vec![usize::MAX; g.n()];
    for (i, &v) in vertices.iter().enumerate() {
        relabel[v] = i;
    }
    let graph = Graph::new(
        vertices.len(),
        edges.iter().map(|&e| {
            let (u, v) = g.edge(e);
            (relabel[u], relabel[v])
        }),
    )?;
    debug_assert_eq!(graph.m(), edges.len());
    Ok(ResidualGraph {
        vertex_fraction: vertices.len() as f64 / g.n() as f64,
        edge_fraction: if g.m() == 0 {
            1.0
        } else {
            edges.len() as f64 / g.m() as f64
        },
        vertices,
        edges,
        graph,
    })
}

/// Lower bounds on the surviving fractions when at most an `eps` fraction of the
/// vertices and of the edges of a `d`-regular expander is deleted.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidualBounds {
    pub eps: f64,
    pub d: usize,
    /// Normalized spectral gap used in place of `1 - 2 sqrt(d-1)/d`.
    pub gap: f64,
    /// `eps (d+1) / gap`.
    pub eps_prime: f64,
    /// `1 - eps'`.
    pub vertex_lb: f64,
    /// `1 - 2 eps'`, the form quoted for the edge count.
    pub edge_lb_stated: f64,
    /// `1 - eps' - eps (d+1)`, the form the counting argument yields.
    pub edge_lb_counted: f64,
}

impl ResidualBounds {
    /// Bounds at the Ramanujan gap `1 - 2 sqrt(d-1)/d`.
    #[must_use]
    pub fn ramanujan(eps: f64, d: usize) -> Self {
        let df = d as f64;
        Self::with_gap(eps, d, 1.0 - 2.0 * (df - 1.0).sqrt() / df)
    }

    /// Bounds at a measured gap `(d - lambda2)/d`.
    #[must_use]
    pub fn spectral(eps: f64, d: usize, lambda2: f64) -> Self {
        Self::with_gap(eps, d, (d as f64 - lambda2) / d as f64)
    }

    #[must_use]
    pub fn with_gap(eps: f64, d: usize, gap: f64) -> Self {
        let spread = eps * (d as f64 + 1.0);
        let eps_prime = spread / gap;
        Self {
            eps,
            d,
            gap,
            eps_prime,
            vertex_lb: 1.0 - eps_prime,
            edge_lb_stated: 1.0 - 2.0 * eps_prime,
            edge_lb_counted: 1.0 - eps_prime - spread,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{cycle_graph, disjoint_union};

    #[test]
    fn cycle_minus_vertex_is_path() {
        let g = cycle_graph(4);
        let all_edges: Vec<usize> = (0..g.m()).collect();
        let r = maximal_connected_residual(&g, &[0, 1, 2], &all_edges).unwrap();
        assert_eq!(r.vertices, vec![0, 1, 2]);
        assert_eq!(r.graph.m(), 2);
        assert_eq!(r.graph.edges(), &[(0, 1), (1, 2)]);
        assert!((r.vertex_fraction - 0.75).abs() < 1e-15);
    }

    #[test]
    fn tie_goes_to_smallest_vertex() {
        let g = disjoint_union(&cycle_graph(3), &cycle_graph(3));
        let all_edges: Vec<usize> = (0..g.m()).collect();
        let r = maximal_connected_residual(&g, &[3, 4, 5, 0, 1, 2], &all_edges).unwrap();
        assert_eq!(r.vertices, vec![0, 1, 2]);
    }

    #[test]
    fn empty_residual_is_error() {
        let g = cycle_graph(3);
        assert_eq!(
            maximal_connected_residual(&g, &[], &[0, 1, 2]),
            Err(GraphError::EmptyResidual)
        );
    }

    #[test]
    fn eps_prime_at_degree_fourteen() {
        let b = ResidualBounds::ramanujan(0.01, 14);
        assert!(b.eps_prime <= 31.0 * 0.01);
        assert!(b.eps_prime > 30.0 * 0.01);
    }
}
