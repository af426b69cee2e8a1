//! Undirected simple graphs, regular-graph generators, spectral and Cheeger
//! expansion, and residual subgraphs after vertex/edge deletion.

mod residual;
mod spectral;

pub use residual::{maximal_connected_residual, ResidualBounds, ResidualGraph};
pub use spectral::{
    cheeger_exhaustive, cheeger_witness, spectral_report, symmetric_eigenvalues, CheegerWitness,
    SpectralReport, EIGEN_TOL, MAX_EIGEN_N,
};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2::BitMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("no {d}-regular graph on {n} vertices: {reason}")]
    InvalidRegularParams {
        n: usize,
        d: usize,
        reason: &'static str,
    },
    #[error("failed to sample a connected {d}-regular graph on {n} vertices")]
    GenerationFailed { n: usize, d: usize },
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph has {n} vertices, limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("residual graph is empty")]
    EmptyResidual,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Simple undirected graph. Edges are stored as `(u, v)` with `u < v`, sorted,
/// and edge indices follow that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Normalizes, sorts and deduplicates `edges`.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut es = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            es.push((u.min(v), u.max(v)));
        }
        es.sort_unstable();
        es.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &es {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self { n, edges: es, adj })
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[must_use]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[must_use]
    pub fn edge(&self, i: usize) -> (usize, usize) {
        self.edges[i]
    }

    #[must_use]
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    #[must_use]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[must_use]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[must_use]
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Common degree, if every vertex has the same one.
    #[must_use]
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first()?.len();
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    #[must_use]
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    #[must_use]
    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    /// Vertex-edge incidence matrix with one row per edge.
    #[must_use]
    pub fn incidence(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.m(), self.n);
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            m.set(i, u, true);
            m.set(i, v, true);
        }
        m
    }

    /// Number of edges with exactly one endpoint in `set`.
    #[must_use]
    pub fn edge_boundary(&self, in_set: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| in_set[u] != in_set[v])
            .count()
    }

    /// Parses `n m` followed by `m` lines `u v`.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let pair = |line: &str| -> Result<(usize, usize), GraphError> {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(GraphError::Parse(format!(
                    "expected two integers, got {line:?}"
                ))),
            }
        };
        let (n, m) = pair(
            lines
                .next()
                .ok_or_else(|| GraphError::Parse("empty input".into()))?,
        )?;
        let edges = lines.map(pair).collect::<Result<Vec<_>, _>>()?;
        if edges.len() != m {
            return Err(GraphError::Parse(format!(
                "header declares {m} edges, found {}",
                edges.len()
            )));
        }
        Self::new(n, edges)
    }

    #[must_use]
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

/// Cycle on `n >= 3` vertices.
///
/// # Panics
/// If `n < 3`.
#[must_use]
pub fn cycle_graph(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
}

#[must_use]
pub fn complete_graph(n: usize) -> Graph {
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid clique")
}

#[must_use]
pub fn path_graph(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

/// Disjoint union, with `b`'s vertices shifted past `a`'s.
#[must_use]
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let shift = a.n();
    let edges = a
        .edges()
        .iter()
        .copied()
        .chain(b.edges().iter().map(|&(u, v)| (u + shift, v + shift)));
    Graph::new(a.n() + b.n(), edges).expect("valid union")
}

const MAX_REGULAR_ATTEMPTS: usize = 10_000;

/// Connected simple `d`-regular graph from the configuration (pairing) model.
///
/// Stubs are matched one random pair at a time; pairs that would create a loop or a
/// repeated edge are rejected and redrawn, and a dead end or a disconnected result
/// restarts the whole matching. Deterministic in `seed`.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
    if d == 0 {
        return Err(GraphError::InvalidRegularParams {
            n,
            d,
            reason: "degree must be positive",
        });
    }
    if d >= n {
        return Err(GraphError::InvalidRegularParams {
            n,
            d,
            reason: "degree must be below n",
        });
    }
    if (n * d) % 2 == 1 {
        return Err(GraphError::InvalidRegularParams {
            n,
            d,
            reason: "n*d is odd",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REGULAR_ATTEMPTS {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            let g = Graph::new(n, edges).expect("pairing yields valid edges");
            if g.is_connected() {
                return Ok(g);
            }
        }
    }
    Err(GraphError::GenerationFailed { n, d })
}

fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    stubs.shuffle(rng);
    let mut adjacent = vec![false; n * n];
    let mut edges = Vec::with_capacity(n * d / 2);
    while !stubs.is_empty() {
        let len = stubs.len();
        let suitable = |a: usize, b: usize| a != b && !adjacent[a * n + b];
        let mut pick = None;
        for _ in 0..(4 * len) {
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            if i != j && suitable(stubs[i], stubs[j]) {
                pick = Some((i, j));
                break;
            }
        }
        if pick.is_none() {
            let options: Vec<(usize, usize)> = (0..len)
                .flat_map(|i| (i + 1..len).map(move |j| (i, j)))
                .filter(|&(i, j)| suitable(stubs[i], stubs[j]))
                .collect();
            pick = Some(*options.get(rng.gen_range(0..options.len().max(1)))?);
        }
        let (i, j) = pick?;
        let (a, b) = (stubs[i], stubs[j]);
        adjacent[a * n + b] = true;
        adjacent[b * n + a] = true;
        edges.push((a, b));
        let (hi, lo) = (i.max(j), i.min(j));
        stubs.swap_remove(hi);
        stubs.swap_remove(lo);
    }
    Some(edges)
}
